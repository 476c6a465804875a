#ifndef ECOPLUS_TYPES_HPP
#define ECOPLUS_TYPES_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecoplus {

/// Road segment under consideration: fixed length, constant slope.
struct RoadSpec {
    double length = 100.0;   ///< segment length [m]
    double slope = 0.0;      ///< constant grade angle [rad]
    double gravity = 9.8066; ///< gravitational acceleration [m/s^2]

    void validate() const {
        if (!(length > 0.0)) throw std::invalid_argument("road length must be positive");
        if (!(std::abs(slope) < M_PI / 2.0)) throw std::invalid_argument("slope must satisfy |theta| < pi/2");
        if (!(gravity > 0.0)) throw std::invalid_argument("gravity must be positive");
    }
};

/// Endpoint conditions of a trip: enter at v0, exit at vd after tm seconds.
/// Initial position is 0 and terminal position is the road length; the
/// control input is zero at both endpoints.
struct BoundarySpec {
    double v0 = 8.0; ///< entry velocity [m/s]
    double vd = 8.0; ///< exit velocity [m/s]
    double tm = 18.0; ///< imposed travel time [s]

    void validate() const {
        if (v0 < 0.0 || vd < 0.0) throw std::invalid_argument("boundary velocities must be nonnegative");
        if (!(tm > 0.0)) throw std::invalid_argument("travel time must be positive");
    }
};

/// Physical and comfort limits. Acceleration bounds are optional and only
/// used in tight-comfort scenarios.
struct Limits {
    double v_max = 15.0;
    double u_min = -3.5;
    double u_max = 2.5;
    double j_min = -10.0;
    double j_max = 10.0;
    std::optional<double> a_min; ///< comfort scenarios only
    std::optional<double> a_max;

    void validate() const {
        if (!(v_max > 0.0)) throw std::invalid_argument("v_max must be positive");
        if (!(u_min < 0.0 && 0.0 < u_max)) throw std::invalid_argument("control bounds must straddle zero");
        if (!(j_min < 0.0 && 0.0 < j_max)) throw std::invalid_argument("jerk bounds must straddle zero");
        if (a_min.has_value() != a_max.has_value())
            throw std::invalid_argument("acceleration bounds must be given as a pair");
        if (a_min && !(*a_min < 0.0 && 0.0 < *a_max))
            throw std::invalid_argument("acceleration bounds must straddle zero");
    }
};

/// Coefficients of the equivalent resistive deceleration
/// a_r(v) = d1 + d2 v + d3 v^2 (rolling resistance, drag, slope).
struct ResistanceCoefficients {
    double d1 = 0.0; ///< [m/s^2]
    double d2 = 0.0; ///< [1/s]
    double d3 = 0.0; ///< [1/m], must be positive (convexity of a_r)

    double eval(double v) const { return d1 + d2 * v + d3 * v * v; }
};

/// Electric-vehicle power model parameters (drivetrain of a compact EV).
struct CpemParams {
    double c1 = 0.0328;  ///< rolling-resistance velocity coefficient
    double c2 = 4.575;   ///< rolling-resistance constant coefficient
    double cr = 1.75;    ///< surface coefficient
    double rho = 1.2256; ///< air density [kg/m^3]
    double area = 2.3316; ///< frontal area [m^2]
    double cd = 0.28;    ///< drag coefficient
    double mass = 1521.0; ///< vehicle mass [kg]; not part of the published set, see config notes
    double eta_d = 0.92;  ///< driveline efficiency
    double eta_em = 0.91; ///< electric-motor efficiency
    double eta_b = 0.9;   ///< battery efficiency
    double regen_coeff = 0.0411; ///< exponent constant of the regenerative-braking fit

    void validate() const {
        if (!(mass > 0.0)) throw std::invalid_argument("cpem mass must be positive");
        if (!(rho > 0.0 && area > 0.0 && cd > 0.0))
            throw std::invalid_argument("cpem drag parameters must be positive");
        auto eff = [](double e) { return e > 0.0 && e <= 1.0; };
        if (!eff(eta_d) || !eff(eta_em) || !eff(eta_b))
            throw std::invalid_argument("cpem efficiencies must lie in (0,1]");
    }
};

/// Polynomial fuel-rate model parameters (curve fit of a small ICE car).
struct KmmkParams {
    double c0 = 0.1569;
    double c1 = 0.0245;
    double c2 = -7.415e-4;
    double c3 = 5.975e-5;
    double c4 = 0.07224;
    double c5 = 0.09681;
    double c6 = 1.075e-3;
    double mass = 1200.0; ///< [kg]
    double rho = 1.184;   ///< [kg/m^3]
    double cd = 0.32;
    double area = 2.5;    ///< [m^2]
    double mu = 0.015;    ///< rolling-resistance coefficient
    double u_max = 2.5;   ///< indicator upper limit [m/s^2]

    void validate() const {
        if (!(mass > 0.0)) throw std::invalid_argument("kmmk mass must be positive");
        if (!(rho > 0.0 && area > 0.0 && cd > 0.0))
            throw std::invalid_argument("kmmk drag parameters must be positive");
    }
};

/// Time-indexed state/control record over a horizon of H uniform steps.
/// x, v, a, u carry H+1 samples; jerk carries H forward differences.
struct Trajectory {
    double dt = 0.1;
    int horizon = 0; ///< H
    std::vector<double> x;    ///< position [m]
    std::vector<double> v;    ///< velocity [m/s]
    std::vector<double> a;    ///< acceleration [m/s^2]
    std::vector<double> u;    ///< control input [m/s^2]
    std::vector<double> jerk; ///< (a_{i+1} - a_i)/dt [m/s^3]

    void resize(int h) {
        horizon = h;
        x.assign(h + 1, 0.0);
        v.assign(h + 1, 0.0);
        a.assign(h + 1, 0.0);
        u.assign(h + 1, 0.0);
        jerk.assign(h, 0.0);
    }
    bool shape_consistent() const {
        const std::size_t n = static_cast<std::size_t>(horizon) + 1;
        return x.size() == n && v.size() == n && a.size() == n && u.size() == n &&
               jerk.size() == static_cast<std::size_t>(horizon);
    }
};

/// Leading-vehicle data aligned to the ego time grid, plus gap parameters.
struct SafetySpec {
    std::vector<double> leader_x; ///< leader position per ego step [m]
    std::vector<double> leader_v; ///< leader velocity per ego step [m/s]
    double min_gap = 2.0;     ///< fixed minimum distance delta [m]
    double time_gap = 4.0;    ///< speed-dependent gap t_g [s]
    double entry_delay = 0.0; ///< ego entry time relative to the leader [s]

    void validate(int horizon) const {
        if (!(min_gap > 0.0)) throw std::invalid_argument("minimum gap must be positive");
        if (time_gap < 0.0) throw std::invalid_argument("time gap must be nonnegative");
        const std::size_t need = static_cast<std::size_t>(horizon) + 1;
        if (leader_x.size() < need || leader_v.size() < need)
            throw std::invalid_argument("leader arrays must cover the ego horizon");
    }
};

/// Number of Euler steps for a travel time: H = ceil(tm/dt), with a guard
/// against spurious round-up when tm is an exact grid multiple.
inline int horizon_steps(double tm, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    return static_cast<int>(std::ceil(tm / dt - 1e-9));
}

} // namespace ecoplus

#endif // ECOPLUS_TYPES_HPP
