#include "ecoplus/problem.hpp"

#include "ecoplus/dc.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ecoplus {

const char* strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::EcoPlus: return "ecoplus";
        case StrategyKind::VelocityMin: return "vm";
        case StrategyKind::JerkMin: return "jm";
        case StrategyKind::AccelMin: return "am";
        case StrategyKind::DcSurrogate: return "dc";
    }
    return "unknown";
}

StrategyKind strategy_from_name(const std::string& name) {
    if (name == "ecoplus" || name == "eco+") return StrategyKind::EcoPlus;
    if (name == "vm") return StrategyKind::VelocityMin;
    if (name == "jm") return StrategyKind::JerkMin;
    if (name == "am") return StrategyKind::AccelMin;
    if (name == "dc") return StrategyKind::DcSurrogate;
    throw std::invalid_argument("unknown strategy: " + name);
}

namespace {

/// Affine under-estimate of a_r used for the lower control bound: the
/// tangent at v_max/2 (parallel to the endpoint chord). Enforcing
/// a_i + t(v_i) >= u_min then implies u_i = a_i + a_r(v_i) >= u_min, so the
/// recovered control never undershoots the bound.
struct TangentUnderestimate {
    double slope;
    double intercept;
};

TangentUnderestimate control_floor_tangent(const ResistanceCoefficients& coeffs, double v_max) {
    const double v_mid = 0.5 * v_max;
    TangentUnderestimate t;
    t.slope = coeffs.d2 + 2.0 * coeffs.d3 * v_mid;
    t.intercept = coeffs.eval(v_mid) - t.slope * v_mid;
    return t;
}

} // namespace

namespace {

/// Optional per-step working sets restricting which secant rows enter the
/// program (row generation); null means the full family everywhere.
using SegmentSets = std::vector<std::vector<int>>;

ConvexProgram build_problem_impl(const ScenarioSpec& spec, StrategyKind strategy,
                                 const PwaSegments& pwa, const QuadraticSurrogate* surrogate,
                                 const SegmentSets* working);

} // namespace

ConvexProgram build_problem(const ScenarioSpec& spec, StrategyKind strategy, const PwaSegments& pwa,
                            const QuadraticSurrogate* surrogate) {
    return build_problem_impl(spec, strategy, pwa, surrogate, nullptr);
}

namespace {

ConvexProgram build_problem_impl(const ScenarioSpec& spec, StrategyKind strategy,
                                 const PwaSegments& pwa, const QuadraticSurrogate* surrogate,
                                 const SegmentSets* working) {
    spec.road.validate();
    spec.boundary.validate();
    spec.limits.validate();
    if (!(spec.dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!(spec.coeffs.d3 > 0.0)) throw std::invalid_argument("d3 must be positive");
    if (spec.boundary.v0 > spec.limits.v_max || spec.boundary.vd > spec.limits.v_max)
        throw std::invalid_argument("boundary velocities must lie within [0, v_max]");
    if (std::abs(pwa.v_max - spec.limits.v_max) > 1e-9)
        throw std::invalid_argument("pwa domain must match v_max");
    if (strategy == StrategyKind::DcSurrogate && surrogate == nullptr)
        throw std::invalid_argument("dc strategy requires a quadratic surrogate");

    const int h = spec.horizon();
    const double dt = spec.dt;
    const bool eco = strategy == StrategyKind::EcoPlus;
    if (spec.safety) spec.safety->validate(h);

    ConvexProgram prog;
    VariableLayout& lay = prog.layout;
    lay.x.assign(h + 1, -1);
    lay.v.assign(h + 1, -1);
    lay.a.assign(h + 1, -1);
    lay.jerk.assign(h, -1);
    lay.z.assign(h, -1);
    int next = 0;
    for (int i = 0; i <= h; ++i) {
        lay.x[i] = next++;
        lay.v[i] = next++;
        lay.a[i] = next++;
        if (i < h) {
            if (eco) lay.z[i] = next++;
            lay.jerk[i] = next++;
        }
    }
    prog.resize(next);

    // Dynamics equalities and the jerk definition.
    for (int i = 0; i < h; ++i) {
        {
            const std::array<int, 3> idx{lay.x[i + 1], lay.x[i], lay.v[i]};
            const std::array<double, 3> val{1.0, -1.0, -dt};
            prog.add_eq(idx, val, 0.0);
        }
        {
            const std::array<int, 3> idx{lay.v[i + 1], lay.v[i], lay.a[i]};
            const std::array<double, 3> val{1.0, -1.0, -dt};
            prog.add_eq(idx, val, 0.0);
        }
        {
            const std::array<int, 3> idx{lay.jerk[i], lay.a[i + 1], lay.a[i]};
            const std::array<double, 3> val{dt, -1.0, 1.0};
            prog.add_eq(idx, val, 0.0);
        }
    }

    // Boundary rows; u_0 = u_H = 0 pins the endpoint accelerations since the
    // endpoint velocities are fixed.
    auto pin = [&prog](int var, double value) {
        const std::array<int, 1> idx{var};
        const std::array<double, 1> val{1.0};
        prog.add_eq(idx, val, value);
    };
    pin(lay.x[0], 0.0);
    if (spec.pin_terminal_position) pin(lay.x[h], spec.road.length);
    pin(lay.v[0], spec.boundary.v0);
    pin(lay.v[h], spec.boundary.vd);
    if (spec.pin_boundary_control) {
        pin(lay.a[0], -spec.coeffs.eval(spec.boundary.v0));
        pin(lay.a[h], -spec.coeffs.eval(spec.boundary.vd));
    }

    // Epigraph rows (ECO+ only): z_i >= a_i + b1_k v_i + b2_k.
    std::vector<int> all_segments(pwa.segments);
    for (int k = 0; k < pwa.segments; ++k) all_segments[k] = k;
    auto segments_at = [&](int i) -> const std::vector<int>& {
        return working ? (*working)[i] : all_segments;
    };
    if (eco) {
        for (int i = 0; i < h; ++i) {
            for (int k : segments_at(i)) {
                const std::array<int, 3> idx{lay.a[i], lay.v[i], lay.z[i]};
                const std::array<double, 3> val{1.0, pwa.b1[k], -1.0};
                prog.add_in(idx, val, -pwa.b2[k]);
            }
        }
    }

    // Control bounds on the eliminated u, shared by every strategy.
    // Upper side through the secant over-approximation (conservative);
    // lower side through a single tangent under-estimate.
    const TangentUnderestimate floor_tan = control_floor_tangent(spec.coeffs, spec.limits.v_max);
    for (int i = 0; i <= h; ++i) {
        for (int k : segments_at(i)) {
            const std::array<int, 2> idx{lay.a[i], lay.v[i]};
            const std::array<double, 2> val{1.0, pwa.b1[k]};
            prog.add_in(idx, val, spec.limits.u_max - pwa.b2[k]);
        }
        {
            const std::array<int, 2> idx{lay.a[i], lay.v[i]};
            const std::array<double, 2> val{-1.0, -floor_tan.slope};
            prog.add_in(idx, val, floor_tan.intercept - spec.limits.u_min);
        }
    }

    // Leading-vehicle rows: the fixed gap folds into position upper bounds;
    // the speed-dependent time gap needs a row per step.
    if (spec.safety) {
        const SafetySpec& safe = *spec.safety;
        for (int i = 0; i <= h; ++i) {
            prog.upper[lay.x[i]] = safe.leader_x[i] - safe.min_gap;
            if (safe.time_gap > 0.0) {
                const std::array<int, 2> idx{lay.x[i], lay.v[i]};
                const std::array<double, 2> val{1.0, safe.time_gap};
                prog.add_in(idx, val, safe.leader_x[i] + safe.time_gap * safe.leader_v[i]);
            }
        }
    }

    for (int i = 0; i <= h; ++i) {
        prog.lower[lay.v[i]] = 0.0;
        prog.upper[lay.v[i]] = spec.limits.v_max;
        if (spec.limits.a_min) {
            prog.lower[lay.a[i]] = *spec.limits.a_min;
            prog.upper[lay.a[i]] = *spec.limits.a_max;
        }
        if (i < h) {
            prog.lower[lay.jerk[i]] = spec.limits.j_min;
            prog.upper[lay.jerk[i]] = spec.limits.j_max;
            if (eco) prog.lower[lay.z[i]] = 0.0;
        }
    }

    switch (strategy) {
        case StrategyKind::EcoPlus:
            for (int i = 0; i < h; ++i) prog.linear_cost[lay.z[i]] = dt;
            break;
        case StrategyKind::VelocityMin:
            for (int i = 0; i < h; ++i) prog.quadratic_cost.push_back({lay.v[i], lay.v[i], 2.0 * dt});
            break;
        case StrategyKind::JerkMin:
            for (int i = 0; i < h; ++i) prog.quadratic_cost.push_back({lay.jerk[i], lay.jerk[i], 2.0 * dt});
            break;
        case StrategyKind::AccelMin:
            for (int i = 0; i < h; ++i) prog.quadratic_cost.push_back({lay.a[i], lay.a[i], 2.0 * dt});
            break;
        case StrategyKind::DcSurrogate:
            install_dc_convex_part(prog, *surrogate, dt);
            break;
    }

    // Coarse sanity warnings; the solver decides true feasibility.
    if (std::abs(spec.boundary.vd - spec.boundary.v0) > spec.limits.u_max * spec.boundary.tm)
        prog.build_warnings.push_back("terminal speed change exceeds crude control authority");
    if (spec.pin_terminal_position && spec.road.length > spec.limits.v_max * spec.boundary.tm)
        prog.build_warnings.push_back("segment length unreachable within the travel time at v_max");
    return prog;
}

} // namespace

double recompute_objective(const Trajectory& traj, StrategyKind strategy, const PwaSegments& pwa) {
    double obj = 0.0;
    switch (strategy) {
        case StrategyKind::EcoPlus:
            for (int i = 0; i < traj.horizon; ++i)
                obj += std::max(0.0, traj.a[i] + pwa_eval(pwa, std::clamp(traj.v[i], 0.0, pwa.v_max))) *
                       traj.dt;
            break;
        case StrategyKind::VelocityMin:
            for (int i = 0; i < traj.horizon; ++i) obj += traj.v[i] * traj.v[i] * traj.dt;
            break;
        case StrategyKind::JerkMin:
            for (int i = 0; i < traj.horizon; ++i) obj += traj.jerk[i] * traj.jerk[i] * traj.dt;
            break;
        case StrategyKind::AccelMin:
            for (int i = 0; i < traj.horizon; ++i) obj += traj.a[i] * traj.a[i] * traj.dt;
            break;
        case StrategyKind::DcSurrogate:
            throw std::invalid_argument("dc objective is recomputed through the program layout");
    }
    return obj;
}

SolutionBundle extract_solution(const ConvexProgram& prog, const SolveResult& raw,
                                const ScenarioSpec& spec, StrategyKind strategy,
                                const PwaSegments& pwa) {
    if (raw.status != SolveStatus::Optimal && raw.status != SolveStatus::IterationLimit)
        throw std::invalid_argument("extract_solution requires a primal iterate");
    const int h = spec.horizon();
    const VariableLayout& lay = prog.layout;
    if (static_cast<int>(lay.x.size()) != h + 1 || lay.empty())
        throw std::logic_error("variable layout does not cover the horizon");
    if (static_cast<int>(raw.x.size()) != prog.num_vars)
        throw std::logic_error("solver vector size does not match the program");

    SolutionBundle bundle;
    bundle.status = raw.status;
    bundle.kkt = raw.kkt;
    bundle.iterations = raw.iterations;
    bundle.wall_ms = raw.wall_ms;
    bundle.diagnostics = raw.message;

    Trajectory& traj = bundle.trajectory;
    traj.dt = spec.dt;
    traj.resize(h);
    for (int i = 0; i <= h; ++i) {
        traj.x[i] = raw.x[lay.x[i]];
        traj.v[i] = raw.x[lay.v[i]];
        traj.a[i] = raw.x[lay.a[i]];
    }
    for (int i = 0; i < h; ++i) traj.jerk[i] = raw.x[lay.jerk[i]];
    traj.u = recover_control_input(traj, spec.coeffs);

    for (int i = 0; i <= h; ++i) {
        bundle.u_bound_violation = std::max(bundle.u_bound_violation, spec.limits.u_min - traj.u[i]);
        bundle.u_bound_violation = std::max(bundle.u_bound_violation, traj.u[i] - spec.limits.u_max);
    }
    bundle.u_bound_violation = std::max(bundle.u_bound_violation, 0.0);

    bundle.objective = raw.objective;
    double recomputed;
    if (strategy == StrategyKind::DcSurrogate) {
        std::vector<double> vec(prog.num_vars, 0.0);
        for (int i = 0; i <= h; ++i) {
            vec[lay.x[i]] = traj.x[i];
            vec[lay.v[i]] = traj.v[i];
            vec[lay.a[i]] = traj.a[i];
        }
        for (int i = 0; i < h; ++i) vec[lay.jerk[i]] = traj.jerk[i];
        recomputed = prog.objective_value(vec);
    } else {
        recomputed = recompute_objective(traj, strategy, pwa) + prog.constant_cost;
    }
    // The epigraph variables sit above the pointwise max by complementarity
    // slack; its trajectory-sum is bounded by the duality gap times the
    // number of barrier terms.
    const double barrier_terms = static_cast<double>(prog.in.rows()) + 2.0 * prog.num_vars;
    const double obj_scale = 1.0 + std::abs(bundle.objective);
    const double tol = 1e-8 * obj_scale + raw.kkt.gap * obj_scale * barrier_terms + 1e-10;
    if (std::abs(recomputed - bundle.objective) > tol)
        throw std::runtime_error("objective cross-check failed: solver " +
                                 std::to_string(bundle.objective) + " vs recomputed " +
                                 std::to_string(recomputed));
    return bundle;
}

namespace {

/// The positive-control objective is piecewise linear and its optimal face
/// can be wide: schedules differing only in when propulsion is applied tie
/// exactly, and an interior-point solver lands mid-face on a different
/// representative at every horizon. A slightly sloped weighting selects one
/// extreme point deterministically (the early-pulse-then-glide vertex a
/// crossover would report) at the cost of at most kPulseSlope relative
/// positive-control suboptimality.
constexpr double kPulseSlope = 1e-3;

void apply_pulse_weights(ConvexProgram& prog, double dt) {
    const VariableLayout& lay = prog.layout;
    const int h = static_cast<int>(lay.jerk.size());
    for (int i = 0; i < h; ++i)
        prog.linear_cost[lay.z[i]] = dt * (1.0 + kPulseSlope * (i + 1.0) / (h + 1.0));
}

/// Unweighted positive-control objective of a raw vector via the layout.
double pci_objective(const ConvexProgram& prog, const std::vector<double>& x, double dt) {
    double obj = 0.0;
    for (int zi : prog.layout.z)
        if (zi >= 0) obj += dt * x[zi];
    return obj;
}

} // namespace

SolutionBundle solve_ecoplus(const ScenarioSpec& spec, const PwaSegments& pwa,
                             const SolverOptions& opts) {
    if (pwa.segments >= 64) return solve_ecoplus_refined(spec, pwa, opts);
    ConvexProgram prog = build_problem(spec, StrategyKind::EcoPlus, pwa);
    apply_pulse_weights(prog, spec.dt);
    SolveResult res = solve(prog, opts);
    if (res.status != SolveStatus::Optimal) {
        SolutionBundle bundle;
        bundle.status = res.status;
        bundle.wall_ms = res.wall_ms;
        bundle.diagnostics = res.message;
        return bundle;
    }
    res.objective = pci_objective(prog, res.x, spec.dt);
    return extract_solution(prog, res, spec, StrategyKind::EcoPlus, pwa);
}

SolutionBundle solve_ecoplus_refined(const ScenarioSpec& spec, const PwaSegments& pwa,
                                     const SolverOptions& opts) {
    const int h = spec.horizon();
    const int k_total = pwa.segments;
    constexpr double kViolationTol = 1e-9;

    // Seed the working sets around a cheap uniform-family solution so the
    // first relaxation already hugs the active geometry; thin evenly spaced
    // secants alone leave it loose enough to wander into degenerate corners.
    double total_ms = 0.0;
    std::vector<int> seed;
    for (int j = 0; j < 10; ++j) seed.push_back(static_cast<int>(static_cast<long>(j) * (k_total - 1) / 9));
    std::sort(seed.begin(), seed.end());
    seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
    SegmentSets working(h + 1, seed);
    {
        // The coarse family is a restriction (its secants over-estimate a_r
        // more), so only an optimal warm solve is usable; any failure just
        // leaves the uniform seeds in place.
        const PwaSegments coarse = build_pwa(spec.coeffs, pwa.v_max, std::min(12, k_total));
        ConvexProgram warm = build_problem_impl(spec, StrategyKind::EcoPlus, coarse, nullptr, nullptr);
        SolveResult warm_res = solve(warm, opts);
        total_ms += warm_res.wall_ms;
        if (warm_res.status == SolveStatus::Optimal) {
            const VariableLayout& lay = warm.layout;
            for (int i = 0; i <= h; ++i) {
                const double v = std::clamp(warm_res.x[lay.v[i]], 0.0, pwa.v_max);
                const int k = std::clamp(static_cast<int>(v / pwa.dv), 0, k_total - 1);
                std::vector<int>& set = working[i];
                for (int cand = k - 2; cand <= k + 2; ++cand)
                    if (cand >= 0 && cand < k_total) set.push_back(cand);
                std::sort(set.begin(), set.end());
                set.erase(std::unique(set.begin(), set.end()), set.end());
            }
        }
    }
    int rounds = 0;
    for (; rounds < 30; ++rounds) {
        ConvexProgram prog = build_problem_impl(spec, StrategyKind::EcoPlus, pwa, nullptr, &working);
        apply_pulse_weights(prog, spec.dt);
        SolveResult res = solve(prog, opts);
        total_ms += res.wall_ms;
        if (res.status == SolveStatus::Infeasible) {
            // The working-set program is a relaxation, so its infeasibility
            // certifies infeasibility of the full program.
            SolutionBundle bundle;
            bundle.status = res.status;
            bundle.wall_ms = total_ms;
            bundle.diagnostics = "row generation: infeasible relaxation";
            return bundle;
        }
        if (res.status != SolveStatus::Optimal) {
            // Numerical trouble on a working-set program: fall back to the
            // assembled full family once.
            ConvexProgram full = build_problem_impl(spec, StrategyKind::EcoPlus, pwa, nullptr, nullptr);
            apply_pulse_weights(full, spec.dt);
            SolveResult full_res = solve(full, opts);
            total_ms += full_res.wall_ms;
            if (full_res.status != SolveStatus::Optimal) {
                SolutionBundle bundle;
                bundle.status = full_res.status;
                bundle.wall_ms = total_ms;
                bundle.diagnostics = "row generation fallback: " +
                                     std::string(to_string(full_res.status)) +
                                     (full_res.message.empty() ? "" : " (" + full_res.message + ")");
                return bundle;
            }
            full_res.objective = pci_objective(full, full_res.x, spec.dt);
            SolutionBundle bundle = extract_solution(full, full_res, spec, StrategyKind::EcoPlus, pwa);
            bundle.wall_ms = total_ms;
            bundle.diagnostics = "row generation fell back to the full family";
            return bundle;
        }

        // The binding secant at v is the one containing v, so checking it
        // certifies the whole family.
        const VariableLayout& lay = prog.layout;
        bool violated = false;
        for (int i = 0; i <= h; ++i) {
            const double v = std::clamp(res.x[lay.v[i]], 0.0, pwa.v_max);
            const double a = res.x[lay.a[i]];
            const int k = std::clamp(static_cast<int>(v / pwa.dv), 0, k_total - 1);
            const double expr = a + pwa.b1[k] * v + pwa.b2[k];
            bool add = expr > spec.limits.u_max + kViolationTol;
            if (i < h) add = add || expr - res.x[lay.z[i]] > kViolationTol;
            if (!add) continue;
            std::vector<int>& set = working[i];
            for (int cand : {k - 1, k, k + 1}) {
                if (cand < 0 || cand >= k_total) continue;
                if (!std::binary_search(set.begin(), set.end(), cand)) {
                    set.insert(std::upper_bound(set.begin(), set.end(), cand), cand);
                    violated = true;
                }
            }
        }
        if (!violated) {
            res.objective = pci_objective(prog, res.x, spec.dt);
            SolutionBundle bundle = extract_solution(prog, res, spec, StrategyKind::EcoPlus, pwa);
            bundle.wall_ms = total_ms;
            if (rounds > 0)
                bundle.diagnostics = "row generation: " + std::to_string(rounds + 1) + " rounds";
            return bundle;
        }
    }
    throw std::runtime_error("row generation did not settle after " + std::to_string(rounds) +
                             " rounds");
}

} // namespace ecoplus
