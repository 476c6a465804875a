#include "ecoplus/consumption.hpp"

#include <algorithm>
#include <cmath>

namespace ecoplus {

double cpem_power(double v, double a, const CpemParams& params, double slope) {
    if (v < 0.0) throw std::invalid_argument("cpem_power: velocity must be nonnegative");
    const double g = 9.8066;
    const double wheels = (params.mass * a +
                           params.mass * g * std::cos(slope) * (params.cr / 1000.0) * (params.c1 * v + params.c2) +
                           0.5 * params.rho * params.area * params.cd * v * v +
                           params.mass * g * std::sin(slope)) *
                          v;
    // The driveline/motor efficiency chain follows the power direction:
    // traction divides by it, recuperation multiplies (the battery can only
    // receive less than the wheels deliver).
    if (wheels >= 0.0) return wheels / (params.eta_d * params.eta_em) * params.eta_b;
    const double eta_rb = a < 0.0 ? std::exp(-params.regen_coeff / std::abs(a)) : 0.0;
    return wheels * params.eta_d * params.eta_em * eta_rb * params.eta_b;
}

ConsumptionReport cpem_energy(const Trajectory& traj, const CpemParams& params, double slope) {
    ConsumptionReport rep;
    rep.model = "cpem";
    rep.rates.resize(traj.horizon);
    double joules = 0.0;
    for (int i = 0; i < traj.horizon; ++i) {
        rep.rates[i] = cpem_power(traj.v[i], traj.a[i], params, slope);
        joules += rep.rates[i] * traj.dt;
    }
    rep.total = joules / 3.6e6;
    return rep;
}

double kmmk_rate(double v, double u, const KmmkParams& params, double slope) {
    if (v < 0.0) throw std::invalid_argument("kmmk_rate: velocity must be nonnegative");
    if (u <= 0.0 || u > params.u_max) return 0.0;
    const double g = 9.8066;
    const double cruise = params.c0 + params.c1 * v + params.c2 * v * v + params.c3 * v * v * v;
    // Apparent acceleration: a_v + a_theta; the slope terms cancel.
    const double a_hat = u - params.cd * params.rho * params.area * v * v / (2.0 * params.mass) -
                         params.mu * g * std::cos(slope);
    const double accel = a_hat * (params.c4 + params.c5 * v + params.c6 * v * v);
    return cruise + accel;
}

ConsumptionReport kmmk_fuel(const Trajectory& traj, const KmmkParams& params, double slope) {
    ConsumptionReport rep;
    rep.model = "kmmk";
    rep.rates.resize(traj.horizon);
    double total = 0.0;
    for (int i = 0; i < traj.horizon; ++i) {
        if (traj.u[i] > params.u_max) ++rep.anomalous_steps;
        rep.rates[i] = kmmk_rate(traj.v[i], traj.u[i], params, slope);
        total += rep.rates[i] * traj.dt;
    }
    rep.total = total;
    return rep;
}

double relative_difference(double x, double y) {
    const double denom = std::max(std::abs(x), std::abs(y));
    if (denom == 0.0) return 0.0;
    return std::abs(x - y) / denom * 100.0;
}

} // namespace ecoplus
