#include "ecoplus/experiments.hpp"

#include "ecoplus/csv.hpp"
#include "ecoplus/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace ecoplus {

const char* model_name(ModelKind model) { return model == ModelKind::Cpem ? "cpem" : "kmmk"; }

ModelKind model_from_name(const std::string& name) {
    if (name == "cpem") return ModelKind::Cpem;
    if (name == "kmmk") return ModelKind::Kmmk;
    throw std::invalid_argument("unknown model: " + name);
}

const char* family_name(ScenarioFamily family) {
    switch (family) {
        case ScenarioFamily::Single: return "single";
        case ScenarioFamily::Leading: return "leading";
        case ScenarioFamily::Comfort: return "comfort";
    }
    return "unknown";
}

ScenarioFamily family_from_name(const std::string& name) {
    if (name == "single") return ScenarioFamily::Single;
    if (name == "leading") return ScenarioFamily::Leading;
    if (name == "comfort") return ScenarioFamily::Comfort;
    throw std::invalid_argument("unknown scenario family: " + name);
}

ResistanceCoefficients model_coefficients(const Config& cfg, ModelKind model) {
    return model == ModelKind::Cpem ? derive_resistance_coefficients(cfg.cpem, cfg.road)
                                    : derive_resistance_coefficients(cfg.kmmk, cfg.road);
}

ScenarioSpec make_scenario(const Config& cfg, ModelKind model, ScenarioFamily family, double vd,
                           double tm, const Trajectory* leader) {
    ScenarioSpec spec;
    spec.road = cfg.road;
    spec.boundary = cfg.boundary;
    spec.boundary.vd = vd;
    spec.boundary.tm = tm;
    spec.limits = cfg.limits;
    if (family == ScenarioFamily::Comfort) {
        spec.limits.j_min = -kComfortJerkLimit;
        spec.limits.j_max = kComfortJerkLimit;
        spec.limits.a_min = -kComfortAccelLimit;
        spec.limits.a_max = kComfortAccelLimit;
    }
    spec.coeffs = model_coefficients(cfg, model);
    spec.dt = cfg.experiment.dt;
    if (family == ScenarioFamily::Leading) {
        if (!leader) throw std::invalid_argument("leading scenario requires a leader profile");
        spec.safety = slice_leader(*leader, cfg.safety, spec.horizon(), spec.dt);
    }
    return spec;
}

ConsumptionReport evaluate_consumption(const Config& cfg, ModelKind model, const Trajectory& traj) {
    return model == ModelKind::Cpem ? cpem_energy(traj, cfg.cpem, cfg.road.slope)
                                    : kmmk_fuel(traj, cfg.kmmk, cfg.road.slope);
}

namespace {

/// Velocity one Euler step before v_next under floor braking (u = u_min):
/// the smaller root of dt d3 v^2 - (1 - dt d2) v + (v_next + dt(d1 - u_min)).
double backward_braking_step(double v_next, const ResistanceCoefficients& c, double u_min, double dt) {
    const double qa = dt * c.d3;
    const double qb = -(1.0 - dt * c.d2);
    const double qc = v_next + dt * (c.d1 - u_min);
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc <= 0.0) throw std::runtime_error("braking profile: discriminant collapsed");
    return (-qb - std::sqrt(disc)) / (2.0 * qa);
}

} // namespace

Trajectory build_leading_profile(const Config& cfg, ModelKind model) {
    const double dt = cfg.experiment.dt;
    const ResistanceCoefficients coeffs = model_coefficients(cfg, model);
    const double total_time = cfg.safety.entry_delay + cfg.experiment.tm_max + 5.0;
    const int h = horizon_steps(total_time, dt);

    const double enter_speed = 6.0;
    const double exit_speed = 8.0;
    const int i_stop = static_cast<int>(std::lround(10.5 / dt));
    const int i_go = static_cast<int>(std::lround(11.0 / dt));
    const int i_exit = static_cast<int>(std::lround(21.0 / dt));
    if (i_exit >= h) throw std::invalid_argument("leading profile needs a longer global horizon");

    std::vector<double> v(h + 1, exit_speed);

    // Deceleration curve ending exactly at the stop time.
    std::vector<double> braking{0.0};
    for (;;) {
        const double prev = backward_braking_step(braking.back(), coeffs, cfg.limits.u_min, dt);
        if (prev >= enter_speed || static_cast<int>(braking.size()) > i_stop) break;
        braking.push_back(prev);
    }
    const int n_brake = static_cast<int>(braking.size()) - 1;
    for (int i = 0; i < i_stop - n_brake; ++i) v[i] = enter_speed;
    for (int j = 0; j <= n_brake; ++j) v[i_stop - j] = braking[j];
    for (int i = i_stop; i <= i_go; ++i) v[i] = 0.0;

    // Smooth pull-away: minimum squared acceleration from standstill to the
    // exit speed, no terminal-position pin.
    ScenarioSpec am;
    am.road = cfg.road;
    am.boundary.v0 = 0.0;
    am.boundary.vd = exit_speed;
    am.boundary.tm = (i_exit - i_go) * dt;
    am.limits = cfg.limits;
    am.coeffs = coeffs;
    am.dt = dt;
    am.pin_terminal_position = false;
    am.pin_boundary_control = false; // zero control cannot hold standstill
    const PwaSegments pwa = build_pwa(coeffs, cfg.limits.v_max, cfg.pwa.segments);
    ConvexProgram prog = build_problem(am, StrategyKind::AccelMin, pwa);
    SolveResult res = solve(prog);
    if (res.status != SolveStatus::Optimal)
        throw std::runtime_error("leading profile: acceleration segment infeasible");
    SolutionBundle seg = extract_solution(prog, res, am, StrategyKind::AccelMin, pwa);
    for (int k = 0; k <= seg.trajectory.horizon; ++k) v[i_go + k] = seg.trajectory.v[k];

    Trajectory leader;
    leader.dt = dt;
    leader.resize(h);
    leader.v = v;
    for (int i = 0; i < h; ++i) {
        leader.x[i + 1] = leader.x[i] + dt * v[i];
        leader.a[i] = (v[i + 1] - v[i]) / dt;
    }
    leader.a[h] = 0.0;
    leader.u = recover_control_input(leader, coeffs);
    for (int i = 0; i < h; ++i) leader.jerk[i] = (leader.a[i + 1] - leader.a[i]) / dt;
    return leader;
}

SafetySpec slice_leader(const Trajectory& leader, const SafetySection& section, int horizon, double dt) {
    SafetySpec spec;
    spec.min_gap = section.min_gap;
    spec.time_gap = section.time_gap;
    spec.entry_delay = section.entry_delay;
    spec.leader_x.resize(horizon + 1);
    spec.leader_v.resize(horizon + 1);
    const int shift = static_cast<int>(std::lround(section.entry_delay / dt));
    const int last = leader.horizon;
    for (int i = 0; i <= horizon; ++i) {
        const int gi = shift + i;
        if (gi <= last) {
            spec.leader_x[i] = leader.x[gi];
            spec.leader_v[i] = leader.v[gi];
        } else {
            spec.leader_x[i] = leader.x[last] + (gi - last) * dt * leader.v[last];
            spec.leader_v[i] = leader.v[last];
        }
    }
    return spec;
}

double find_min_feasible_tm(const Config& cfg, ModelKind model, ScenarioFamily family, double vd,
                            const Trajectory* leader, const PwaSegments& pwa) {
    const double step = cfg.experiment.tm_step;
    const int j_max = static_cast<int>(std::lround(cfg.experiment.tm_max / step));
    int j = std::max(1, static_cast<int>(std::floor(cfg.road.length / cfg.limits.v_max / step)));
    for (; j <= j_max; ++j) {
        const double tm = j * step;
        const ScenarioSpec spec = make_scenario(cfg, model, family, vd, tm, leader);
        ConvexProgram prog = build_problem(spec, StrategyKind::VelocityMin, pwa);
        if (check_feasible(prog)) return tm;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::vector<const SweepRecord*> TradeoffCurve::series(StrategyKind strategy) const {
    std::vector<const SweepRecord*> out;
    for (const auto& rec : records)
        if (rec.strategy == strategy && rec.status == SolveStatus::Optimal) out.push_back(&rec);
    std::sort(out.begin(), out.end(),
              [](const SweepRecord* a, const SweepRecord* b) { return a->grid_index < b->grid_index; });
    return out;
}

TradeoffCurve tradeoff_sweep(const Config& cfg_in, const ExperimentConfig& exp, double vd) {
    Config cfg = cfg_in;
    if (exp.tm_max > 0.0) cfg.experiment.tm_max = exp.tm_max;
    if (exp.tm_step > 0.0) cfg.experiment.tm_step = exp.tm_step;
    const int segments = exp.pwa_segments > 0 ? exp.pwa_segments : cfg.pwa.segments;

    TradeoffCurve curve;
    curve.model = exp.model;
    curve.family = exp.family;
    curve.vd = vd;
    curve.tm_step = cfg.experiment.tm_step;

    const ResistanceCoefficients coeffs = model_coefficients(cfg, exp.model);
    const PwaSegments pwa = build_pwa(coeffs, cfg.limits.v_max, segments);
    // Feasibility probing never needs the full secant family.
    const PwaSegments probe_pwa =
        segments <= 12 ? pwa : build_pwa(coeffs, cfg.limits.v_max, 12);

    Trajectory leader;
    const Trajectory* leader_ptr = nullptr;
    if (exp.family == ScenarioFamily::Leading) {
        leader = build_leading_profile(cfg, exp.model);
        leader_ptr = &leader;
    }

    // The DC surrogate depends only on the model and the operating ranges;
    // fit it once per sweep.
    QuadraticSurrogate surrogate;
    DcOptions dc_opts;
    const bool wants_dc = std::find(exp.strategies.begin(), exp.strategies.end(),
                                    StrategyKind::DcSurrogate) != exp.strategies.end();
    if (wants_dc) {
        dc_opts.v_min = 0.0;
        dc_opts.v_max = cfg.limits.v_max;
        dc_opts.a_min = cfg.limits.u_min;
        dc_opts.a_max = cfg.limits.u_max;
        // Both fits run over the full operating box against the model's
        // indicated rate; restricting the fuel fit to the positive-control
        // window leaves the quadratic extrapolating negative fuel into
        // braking states, which the minimization then exploits.
        const RateFn rate = exp.model == ModelKind::Cpem
                                ? make_cpem_rate(cfg.cpem, cfg.road.slope)
                                : make_kmmk_rate(cfg.kmmk, coeffs, cfg.road.slope);
        surrogate = fit_surrogate(rate, [](double, double) { return true; }, dc_opts);
    }

    const double tm_min = find_min_feasible_tm(cfg, exp.model, exp.family, vd, leader_ptr, probe_pwa);
    if (std::isnan(tm_min)) {
        curve.feasibility_monotone = true;
        return curve; // nothing feasible within tm_max
    }
    const double step = cfg.experiment.tm_step;
    const int j_lo = static_cast<int>(std::lround(tm_min / step));
    const int j_hi = static_cast<int>(std::lround(cfg.experiment.tm_max / step));
    const int n_points = j_hi - j_lo + 1;
    if (n_points <= 0) return curve;

    const int n_strats = static_cast<int>(exp.strategies.size());
    std::vector<SweepRecord> slots(static_cast<std::size_t>(n_points) * n_strats);

    parallel_for(n_points, exp.threads, [&](int point) {
        const int j = j_lo + point;
        const double tm = j * step;
        const ScenarioSpec spec = make_scenario(cfg, exp.model, exp.family, vd, tm, leader_ptr);
        for (int sidx = 0; sidx < n_strats; ++sidx) {
            const StrategyKind strategy = exp.strategies[sidx];
            SweepRecord& rec = slots[static_cast<std::size_t>(point) * n_strats + sidx];
            rec.grid_index = j;
            rec.tm = tm;
            rec.strategy = strategy;
            rec.model = exp.model;
            SolutionBundle bundle;
            if (strategy == StrategyKind::DcSurrogate) {
                bundle = dc_solve(spec, surrogate, dc_opts, pwa);
            } else if (strategy == StrategyKind::EcoPlus) {
                bundle = solve_ecoplus(spec, pwa);
                if (bundle.status != SolveStatus::Optimal) {
                    rec.status = bundle.status;
                    rec.solve_ms = bundle.wall_ms;
                    continue;
                }
            } else {
                ConvexProgram prog = build_problem(spec, strategy, pwa);
                SolveResult res = solve(prog);
                if (res.status != SolveStatus::Optimal) {
                    rec.status = res.status;
                    rec.solve_ms = res.wall_ms;
                    continue;
                }
                bundle = extract_solution(prog, res, spec, strategy, pwa);
            }
            rec.status = bundle.status;
            rec.solve_ms = bundle.wall_ms;
            if (bundle.status != SolveStatus::Optimal) continue;
            rec.objective = bundle.objective;
            for (int i = 0; i < bundle.trajectory.horizon; ++i)
                rec.pci += std::max(bundle.trajectory.u[i], 0.0) * spec.dt;
            rec.u_bound_violation = bundle.u_bound_violation;
            const ValidationReport audit =
                validate_trajectory(bundle.trajectory, spec.boundary, spec.road, spec.limits,
                                    spec.coeffs, spec.safety ? &*spec.safety : nullptr, 1e-6);
            rec.valid = audit.pass;
            for (const ResidualEntry* e :
                 {&audit.dynamics_position, &audit.dynamics_velocity, &audit.dynamics_jerk,
                  &audit.control_identity, &audit.boundary, &audit.velocity_bounds,
                  &audit.control_bounds, &audit.accel_bounds, &audit.jerk_bounds,
                  &audit.safety_min_gap, &audit.safety_time_gap})
                rec.max_residual = std::max(rec.max_residual, e->magnitude);
            const ConsumptionReport consumption = evaluate_consumption(cfg, exp.model, bundle.trajectory);
            rec.consumption = consumption.total;
            rec.anomalous_steps = consumption.anomalous_steps;
        }
    });

    curve.records = std::move(slots);
    bool seen_feasible = false;
    for (int point = 0; point < n_points; ++point) {
        bool any_optimal = false;
        for (int sidx = 0; sidx < n_strats; ++sidx)
            any_optimal |= curve.records[static_cast<std::size_t>(point) * n_strats + sidx].status ==
                           SolveStatus::Optimal;
        if (any_optimal) seen_feasible = true;
        else if (seen_feasible) curve.feasibility_monotone = false;
    }
    return curve;
}

namespace {

PairComparison compare_pair(const TradeoffCurve& curve, StrategyKind base, StrategyKind other) {
    PairComparison cmp;
    cmp.base = base;
    cmp.other = other;
    const auto base_series = curve.series(base);
    const auto other_series = curve.series(other);
    std::size_t bi = 0;
    double base_sum = 0.0;
    double other_sum = 0.0;
    for (const SweepRecord* orec : other_series) {
        while (bi < base_series.size() && base_series[bi]->grid_index < orec->grid_index) ++bi;
        if (bi >= base_series.size()) break;
        if (base_series[bi]->grid_index != orec->grid_index) continue;
        const double b = base_series[bi]->consumption;
        const double o = orec->consumption;
        base_sum += b;
        other_sum += o;
        cmp.max_rel_diff_pct = std::max(cmp.max_rel_diff_pct, relative_difference(b, o));
        if (b > o + 1e-6 * std::max(1.0, std::abs(o))) ++cmp.dominance_violations;
        ++cmp.points;
    }
    cmp.avg_rel_diff_pct = cmp.points > 0 ? relative_difference(base_sum, other_sum) : 0.0;
    return cmp;
}

} // namespace

ScenarioReport run_scenario(const Config& cfg, const ExperimentConfig& exp) {
    ScenarioReport report;
    report.family = exp.family;
    report.model = exp.model;
    for (double vd : exp.vd_list) {
        VdReport vr;
        vr.vd = vd;
        vr.curve = tradeoff_sweep(cfg, exp, vd);
        if (!exp.strategies.empty()) {
            const StrategyKind base = exp.strategies.front();
            for (std::size_t s = 1; s < exp.strategies.size(); ++s)
                vr.comparisons.push_back(compare_pair(vr.curve, base, exp.strategies[s]));
        }
        for (const auto& rec : vr.curve.records) {
            if (rec.status != SolveStatus::Optimal) continue;
            ++report.solutions_audited;
            if (!rec.valid) ++report.audit_failures;
            report.worst_residual = std::max(report.worst_residual, rec.max_residual);
        }
        report.by_vd.push_back(std::move(vr));
    }
    return report;
}

bool is_unimodal(const std::vector<double>& series, double noise) {
    bool rising = false;
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double diff = series[i] - series[i - 1];
        if (diff > noise) rising = true;
        else if (diff < -noise && rising) return false;
    }
    return true;
}

void write_sweep_csv(std::ostream& os, const TradeoffCurve& curve) {
    os << "tm,strategy,model,consumption,objective,status,solve_ms\n";
    for (const auto& rec : curve.records) {
        os << format_g9(rec.tm) << ',' << strategy_name(rec.strategy) << ',' << model_name(rec.model)
           << ',';
        if (rec.status == SolveStatus::Optimal) os << format_g9(rec.consumption);
        os << ',';
        if (rec.status == SolveStatus::Optimal) os << format_g9(rec.objective);
        os << ',' << to_string(rec.status) << ',' << format_g9(rec.solve_ms) << "\n";
    }
}

void write_summary(std::ostream& os, const ScenarioReport& report) {
    os << "scenario " << family_name(report.family) << " model " << model_name(report.model) << "\n";
    for (const auto& vr : report.by_vd) {
        os << "  vd " << format_g9(vr.vd) << ": ";
        const auto base_series =
            vr.comparisons.empty() ? vr.curve.series(StrategyKind::EcoPlus)
                                   : vr.curve.series(vr.comparisons.front().base);
        os << base_series.size() << " feasible points\n";
        for (const auto& cmp : vr.comparisons) {
            os << "    " << strategy_name(cmp.other) << " vs " << strategy_name(cmp.base)
               << ": avg relative difference " << format_g9(cmp.avg_rel_diff_pct) << "% over "
               << cmp.points << " points";
            if (cmp.dominance_violations > 0)
                os << " (base worse at " << cmp.dominance_violations << " points)";
            os << "\n";
        }
    }
    os << "  audit: " << report.solutions_audited << " solutions, " << report.audit_failures
       << " failures, worst residual " << format_g9(report.worst_residual) << "\n";
}

} // namespace ecoplus
