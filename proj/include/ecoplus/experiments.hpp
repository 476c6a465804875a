#ifndef ECOPLUS_EXPERIMENTS_HPP
#define ECOPLUS_EXPERIMENTS_HPP

#include "ecoplus/config.hpp"
#include "ecoplus/consumption.hpp"
#include "ecoplus/dc.hpp"
#include "ecoplus/problem.hpp"

#include <iosfwd>

namespace ecoplus {

enum class ModelKind { Cpem, Kmmk };
enum class ScenarioFamily { Single, Leading, Comfort };

const char* model_name(ModelKind model);
ModelKind model_from_name(const std::string& name);
const char* family_name(ScenarioFamily family);
ScenarioFamily family_from_name(const std::string& name);

/// Comfort-scenario overrides (tight jerk and acceleration limits).
constexpr double kComfortJerkLimit = 1.0;
constexpr double kComfortAccelLimit = 1.25;

/// One (travel time, strategy) solve outcome of a sweep.
struct SweepRecord {
    int grid_index = 0; ///< tm = grid_index * tm_step
    double tm = 0.0;
    StrategyKind strategy = StrategyKind::EcoPlus;
    ModelKind model = ModelKind::Cpem;
    SolveStatus status = SolveStatus::NumericalFailure;
    double consumption = 0.0; ///< kWh or mL; meaningful only when optimal
    double objective = 0.0;
    double pci = 0.0;         ///< achieved positive-control integral of the solution
    double solve_ms = 0.0;
    bool valid = false;              ///< validate_trajectory pass at 1e-6
    double max_residual = 0.0;       ///< worst validation residual
    double u_bound_violation = 0.0;  ///< recovered-control excursion
    int anomalous_steps = 0;         ///< fuel-model indicator anomalies
};

struct TradeoffCurve {
    ModelKind model = ModelKind::Cpem;
    ScenarioFamily family = ScenarioFamily::Single;
    double vd = 0.0;
    double tm_step = 0.1;
    std::vector<SweepRecord> records;
    bool feasibility_monotone = true;

    /// Optimal records of one strategy ordered by travel time.
    std::vector<const SweepRecord*> series(StrategyKind strategy) const;
};

/// Consumption comparison of `other` against `base` over the common
/// feasible grid: the relative difference of the summed (sweep-aggregate)
/// consumption, plus per-point dominance accounting. The aggregate form is
/// the one whose values line up with the published averages; a pointwise
/// mean saturates beyond 100% wherever a curve crosses zero.
struct PairComparison {
    StrategyKind base = StrategyKind::EcoPlus;
    StrategyKind other = StrategyKind::VelocityMin;
    int points = 0;
    double avg_rel_diff_pct = 0.0; ///< relative difference of summed consumption
    double max_rel_diff_pct = 0.0; ///< worst pointwise relative difference
    int dominance_violations = 0;  ///< points where base consumed measurably more
};

struct VdReport {
    double vd = 0.0;
    TradeoffCurve curve;
    std::vector<PairComparison> comparisons; ///< each strategy vs the first listed
};

struct ScenarioReport {
    ScenarioFamily family = ScenarioFamily::Single;
    ModelKind model = ModelKind::Cpem;
    std::vector<VdReport> by_vd;
    int solutions_audited = 0;
    int audit_failures = 0;
    double worst_residual = 0.0;
};

/// Sweep/scenario request on top of a Config (zeros mean config defaults).
struct ExperimentConfig {
    ScenarioFamily family = ScenarioFamily::Single;
    ModelKind model = ModelKind::Cpem;
    std::vector<StrategyKind> strategies{StrategyKind::EcoPlus, StrategyKind::VelocityMin};
    std::vector<double> vd_list{8.0};
    int pwa_segments = 0;
    double tm_max = 0.0;
    double tm_step = 0.0;
    int threads = 0;
    unsigned seed = 0;
};

/// Resistance coefficients consistent with the evaluated model.
ResistanceCoefficients model_coefficients(const Config& cfg, ModelKind model);

/// Scenario assembly for a given travel time; the leader trajectory is
/// required (and sliced to the ego grid) for the leading family.
ScenarioSpec make_scenario(const Config& cfg, ModelKind model, ScenarioFamily family, double vd,
                           double tm, const Trajectory* leader);

/// Leading-vehicle profile on the global time grid: enters at 6 m/s, brakes
/// at the control floor so it stops exactly at 10.5 s, stands half a second,
/// then accelerates with minimum squared acceleration to 8 m/s at 21 s.
Trajectory build_leading_profile(const Config& cfg, ModelKind model);

/// Leader arrays aligned to an ego grid that starts entry_delay later.
SafetySpec slice_leader(const Trajectory& leader, const SafetySection& section, int horizon, double dt);

ConsumptionReport evaluate_consumption(const Config& cfg, ModelKind model, const Trajectory& traj);

/// Smallest grid travel time whose constraint set is feasible (quiet NaN
/// when none is within tm_max).
double find_min_feasible_tm(const Config& cfg, ModelKind model, ScenarioFamily family, double vd,
                            const Trajectory* leader, const PwaSegments& pwa);

/// Solves every strategy over the feasible travel-time grid.
TradeoffCurve tradeoff_sweep(const Config& cfg, const ExperimentConfig& exp, double vd);

/// Full study: sweeps per terminal velocity plus pairwise comparisons
/// against the first listed strategy and a constraint audit.
ScenarioReport run_scenario(const Config& cfg, const ExperimentConfig& exp);

/// True when the series descends to a single interior minimum and rises
/// after it (differences below `noise` are ignored).
bool is_unimodal(const std::vector<double>& series, double noise = 1e-6);

void write_sweep_csv(std::ostream& os, const TradeoffCurve& curve);
void write_summary(std::ostream& os, const ScenarioReport& report);

} // namespace ecoplus

#endif // ECOPLUS_EXPERIMENTS_HPP
