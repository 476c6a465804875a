#ifndef ECOPLUS_DC_HPP
#define ECOPLUS_DC_HPP

#include "ecoplus/consumption.hpp"
#include "ecoplus/problem.hpp"

#include <array>
#include <functional>

namespace ecoplus {

/// Six-coefficient quadratic fit of an instantaneous consumption rate in
/// (v, a), together with its PSD convex/concave Hessian split
/// H = H_plus - H_minus (2x2, entries ordered vv, va, aa).
struct QuadraticSurrogate {
    double qaa = 0.0, qvv = 0.0, qav = 0.0;
    double la = 0.0, lv = 0.0, k = 0.0;
    std::array<double, 3> hess_plus{0.0, 0.0, 0.0};
    std::array<double, 3> hess_minus{0.0, 0.0, 0.0};
    double fit_rms = 0.0;
    double fit_max_error = 0.0;
    int fit_points = 0;

    double eval(double v, double a) const {
        return qaa * a * a + qvv * v * v + qav * a * v + la * a + lv * v + k;
    }
};

struct DcOptions {
    double v_min = 0.0, v_max = 15.0; ///< fit grid velocity range
    double a_min = -3.5, a_max = 2.5; ///< fit grid acceleration range (control limits)
    int grid_v = 60, grid_a = 60;
    int max_iterations = 50;
    double decrease_tolerance = 1e-6;
};

struct DcTrace {
    std::vector<double> objectives; ///< surrogate trip cost per CCP iterate
    bool converged = false;
};

using RateFn = std::function<double(double, double)>;    ///< (v, a) -> rate
using IncludeFn = std::function<bool(double, double)>;   ///< fit-region mask

/// Least-squares fit of the quadratic surrogate over a uniform grid,
/// restricted to the points accepted by the mask. Rejects degenerate grids.
QuadraticSurrogate fit_surrogate(const RateFn& rate, const IncludeFn& include, const DcOptions& opts);

/// Rate closures for the two consumption models, expressed in (v, a).
RateFn make_cpem_rate(const CpemParams& params, double slope);
RateFn make_kmmk_rate(const KmmkParams& params, const ResistanceCoefficients& coeffs, double slope);
/// Mask selecting the nonzero-fuel window 0 < u = a + a_r(v) <= u_max.
IncludeFn positive_control_mask(const ResistanceCoefficients& coeffs, double u_max);

/// Installs the convex part of the split objective (constant across CCP
/// iterations) into a program built for the DC strategy.
void install_dc_convex_part(ConvexProgram& prog, const QuadraticSurrogate& s, double dt);

/// Rewrites the linear/constant cost for the concave part linearized at the
/// incumbent trajectory.
void apply_ccp_linearization(ConvexProgram& prog, const QuadraticSurrogate& s,
                             const Trajectory& incumbent, double dt);

/// Trip cost of the (unsplit) surrogate along a trajectory.
double surrogate_trip_cost(const QuadraticSurrogate& s, const Trajectory& traj);

/// Convex-concave procedure: starting from the velocity-minimization
/// solution, repeatedly linearize the concave part and solve the convex QP
/// until the surrogate trip cost stops decreasing.
SolutionBundle dc_solve(const ScenarioSpec& spec, const QuadraticSurrogate& s, const DcOptions& opts,
                        const PwaSegments& pwa, const SolverOptions& solver_opts = {},
                        DcTrace* trace = nullptr);

} // namespace ecoplus

#endif // ECOPLUS_DC_HPP
