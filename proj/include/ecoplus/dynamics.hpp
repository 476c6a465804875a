#ifndef ECOPLUS_DYNAMICS_HPP
#define ECOPLUS_DYNAMICS_HPP

#include "ecoplus/types.hpp"

#include <span>

namespace ecoplus {

/// Per-constraint residual entry of a trajectory validation.
struct ResidualEntry {
    double magnitude = 0.0; ///< worst violation, 0 when satisfied
    int index = -1;         ///< step at which the worst violation occurs
    bool pass = true;
};

/// Feasibility audit of a complete trajectory against dynamics, boundary
/// conditions, bounds and (optionally) the safety constraint.
struct ValidationReport {
    double tolerance = 1e-6;
    ResidualEntry dynamics_position;
    ResidualEntry dynamics_velocity;
    ResidualEntry dynamics_jerk;
    ResidualEntry control_identity; ///< |u_i - (a_i + a_r(v_i))|
    ResidualEntry boundary;
    ResidualEntry velocity_bounds;
    ResidualEntry control_bounds;
    ResidualEntry accel_bounds;
    ResidualEntry jerk_bounds;
    ResidualEntry safety_min_gap;
    ResidualEntry safety_time_gap;
    bool pass = true;

    /// Names of the failed checks, for reporting.
    std::vector<std::string> failures() const;
};

/// Maps vehicle/model parameters and road geometry to the coefficients of
/// the equivalent resistive deceleration d1 + d2 v + d3 v^2.
ResistanceCoefficients derive_resistance_coefficients(const CpemParams& params, const RoadSpec& road);
ResistanceCoefficients derive_resistance_coefficients(const KmmkParams& params, const RoadSpec& road);

/// Simulates the third-order longitudinal dynamics forward with Euler steps:
///   x_{i+1} = x_i + dt v_i,  v_{i+1} = v_i + dt a_i,
///   a_i = u_i - (d1 + d2 v_i + d3 v_i^2),  jerk_i = (a_{i+1} - a_i)/dt.
/// The control array has H+1 entries; the rollout is total (no feasibility
/// checks here).
Trajectory rollout(std::span<const double> u, double v0, const ResistanceCoefficients& coeffs, double dt);

/// Recovers the eliminated control input from states via
/// u_i = a_i + d1 + d2 v_i + d3 v_i^2.
std::vector<double> recover_control_input(const Trajectory& traj, const ResistanceCoefficients& coeffs);

/// Control input that holds velocity vbar exactly (cruise equilibrium).
inline double cruise_control(double vbar, const ResistanceCoefficients& coeffs) {
    return coeffs.eval(vbar);
}

/// Checks a complete trajectory against every problem constraint and
/// reports the worst residual per constraint family.
ValidationReport validate_trajectory(const Trajectory& traj, const BoundarySpec& boundary,
                                     const RoadSpec& road, const Limits& limits,
                                     const ResistanceCoefficients& coeffs,
                                     const SafetySpec* safety = nullptr, double tol = 1e-6);

} // namespace ecoplus

#endif // ECOPLUS_DYNAMICS_HPP
