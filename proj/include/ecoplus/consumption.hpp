#ifndef ECOPLUS_CONSUMPTION_HPP
#define ECOPLUS_CONSUMPTION_HPP

#include "ecoplus/types.hpp"

namespace ecoplus {

/// Trip-total consumption plus the per-step rate series that produced it.
struct ConsumptionReport {
    double total = 0.0;             ///< kWh (electric) or mL (fuel)
    std::vector<double> rates;      ///< one rate per integration step (length H)
    std::string model;              ///< "cpem" or "kmmk"
    int anomalous_steps = 0;        ///< steps with u above the indicator limit
};

/// Battery-side electric power draw [W] at a given operating point.
/// Positive while propelling; negative (recuperation) while braking, scaled
/// by the exponential regenerative-braking efficiency fit.
double cpem_power(double v, double a, const CpemParams& params, double slope);

/// Trip energy [kWh]: left-Riemann integral of cpem_power over the horizon.
ConsumptionReport cpem_energy(const Trajectory& traj, const CpemParams& params, double slope);

/// Instantaneous fuel rate [mL/s]: cruise polynomial plus apparent-
/// acceleration term, zero whenever the control input is outside (0, u_max].
double kmmk_rate(double v, double u, const KmmkParams& params, double slope);

/// Trip fuel [mL]: left-Riemann integral of kmmk_rate over the horizon.
ConsumptionReport kmmk_fuel(const Trajectory& traj, const KmmkParams& params, double slope);

/// |x - y| / max(|x|, |y|) * 100; defined as 0 when both are zero.
double relative_difference(double x, double y);

} // namespace ecoplus

#endif // ECOPLUS_CONSUMPTION_HPP
