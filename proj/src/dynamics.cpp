#include "ecoplus/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace ecoplus {

namespace {

void require_convex_d3(double d3) {
    if (!(d3 > 0.0))
        throw std::invalid_argument("resistive coefficient d3 must be positive (convexity of a_r)");
}

} // namespace

ResistanceCoefficients derive_resistance_coefficients(const CpemParams& params, const RoadSpec& road) {
    params.validate();
    road.validate();
    const double g = road.gravity;
    const double ct = std::cos(road.slope);
    const double st = std::sin(road.slope);
    ResistanceCoefficients coeffs;
    coeffs.d1 = g * ct * (params.cr / 1000.0) * params.c2 + g * st;
    coeffs.d2 = g * ct * (params.cr / 1000.0) * params.c1;
    coeffs.d3 = params.rho * params.area * params.cd / (2.0 * params.mass);
    require_convex_d3(coeffs.d3);
    return coeffs;
}

ResistanceCoefficients derive_resistance_coefficients(const KmmkParams& params, const RoadSpec& road) {
    params.validate();
    road.validate();
    const double g = road.gravity;
    ResistanceCoefficients coeffs;
    coeffs.d1 = params.mu * g * std::cos(road.slope) + g * std::sin(road.slope);
    coeffs.d2 = 0.0;
    coeffs.d3 = params.cd * params.rho * params.area / (2.0 * params.mass);
    require_convex_d3(coeffs.d3);
    return coeffs;
}

Trajectory rollout(std::span<const double> u, double v0, const ResistanceCoefficients& coeffs, double dt) {
    if (u.empty()) throw std::invalid_argument("control array must have at least one entry");
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    const int h = static_cast<int>(u.size()) - 1;
    Trajectory traj;
    traj.dt = dt;
    traj.resize(h);
    traj.v[0] = v0;
    traj.x[0] = 0.0;
    for (int i = 0; i <= h; ++i) {
        traj.u[i] = u[i];
        traj.a[i] = u[i] - coeffs.eval(traj.v[i]);
        if (i < h) {
            traj.x[i + 1] = traj.x[i] + dt * traj.v[i];
            traj.v[i + 1] = traj.v[i] + dt * traj.a[i];
        }
    }
    for (int i = 0; i < h; ++i) traj.jerk[i] = (traj.a[i + 1] - traj.a[i]) / dt;
    return traj;
}

std::vector<double> recover_control_input(const Trajectory& traj, const ResistanceCoefficients& coeffs) {
    std::vector<double> u(traj.v.size());
    for (std::size_t i = 0; i < traj.v.size(); ++i) u[i] = traj.a[i] + coeffs.eval(traj.v[i]);
    return u;
}

std::vector<std::string> ValidationReport::failures() const {
    std::vector<std::string> out;
    auto add = [&out](const ResidualEntry& e, const char* name) {
        if (!e.pass) out.push_back(name);
    };
    add(dynamics_position, "dynamics:position");
    add(dynamics_velocity, "dynamics:velocity");
    add(dynamics_jerk, "dynamics:jerk");
    add(control_identity, "dynamics:control-identity");
    add(boundary, "boundary");
    add(velocity_bounds, "bounds:velocity");
    add(control_bounds, "bounds:control");
    add(accel_bounds, "bounds:acceleration");
    add(jerk_bounds, "bounds:jerk");
    add(safety_min_gap, "safety:min-gap");
    add(safety_time_gap, "safety:time-gap");
    return out;
}

namespace {

void track(ResidualEntry& entry, double violation, int index) {
    if (violation > entry.magnitude) {
        entry.magnitude = violation;
        entry.index = index;
    }
}

void finish(ResidualEntry& entry, double tol, bool& all_pass) {
    entry.pass = entry.magnitude <= tol;
    if (!entry.pass) all_pass = false;
}

} // namespace

ValidationReport validate_trajectory(const Trajectory& traj, const BoundarySpec& boundary,
                                     const RoadSpec& road, const Limits& limits,
                                     const ResistanceCoefficients& coeffs,
                                     const SafetySpec* safety, double tol) {
    if (!traj.shape_consistent()) throw std::invalid_argument("trajectory arrays inconsistent with horizon");
    ValidationReport rep;
    rep.tolerance = tol;
    const int h = traj.horizon;
    const double dt = traj.dt;

    for (int i = 0; i < h; ++i) {
        track(rep.dynamics_position, std::abs(traj.x[i + 1] - traj.x[i] - dt * traj.v[i]), i);
        track(rep.dynamics_velocity, std::abs(traj.v[i + 1] - traj.v[i] - dt * traj.a[i]), i);
        track(rep.dynamics_jerk, std::abs(traj.jerk[i] * dt - (traj.a[i + 1] - traj.a[i])), i);
    }
    for (int i = 0; i <= h; ++i)
        track(rep.control_identity, std::abs(traj.u[i] - (traj.a[i] + coeffs.eval(traj.v[i]))), i);

    track(rep.boundary, std::abs(traj.x[0]), 0);
    track(rep.boundary, std::abs(traj.x[h] - road.length), h);
    track(rep.boundary, std::abs(traj.v[0] - boundary.v0), 0);
    track(rep.boundary, std::abs(traj.v[h] - boundary.vd), h);
    track(rep.boundary, std::abs(traj.u[0]), 0);
    track(rep.boundary, std::abs(traj.u[h]), h);

    for (int i = 0; i <= h; ++i) {
        track(rep.velocity_bounds, std::max(-traj.v[i], traj.v[i] - limits.v_max), i);
        track(rep.control_bounds, std::max(limits.u_min - traj.u[i], traj.u[i] - limits.u_max), i);
        if (limits.a_min)
            track(rep.accel_bounds, std::max(*limits.a_min - traj.a[i], traj.a[i] - *limits.a_max), i);
    }
    for (int i = 0; i < h; ++i)
        track(rep.jerk_bounds, std::max(limits.j_min - traj.jerk[i], traj.jerk[i] - limits.j_max), i);

    if (safety) {
        safety->validate(h);
        for (int i = 0; i <= h; ++i) {
            const double gap = safety->leader_x[i] - traj.x[i];
            track(rep.safety_min_gap, safety->min_gap - gap, i);
            track(rep.safety_time_gap, (traj.v[i] - safety->leader_v[i]) * safety->time_gap - gap, i);
        }
    }

    bool all = true;
    finish(rep.dynamics_position, tol, all);
    finish(rep.dynamics_velocity, tol, all);
    finish(rep.dynamics_jerk, tol, all);
    finish(rep.control_identity, tol, all);
    finish(rep.boundary, tol, all);
    finish(rep.velocity_bounds, tol, all);
    finish(rep.control_bounds, tol, all);
    finish(rep.accel_bounds, tol, all);
    finish(rep.jerk_bounds, tol, all);
    finish(rep.safety_min_gap, tol, all);
    finish(rep.safety_time_gap, tol, all);
    rep.pass = all;
    return rep;
}

} // namespace ecoplus
