#include "ecoplus/dc.hpp"

#include <algorithm>
#include <cmath>

namespace ecoplus {

namespace {

/// Gaussian elimination with partial pivoting for the 6x6 normal equations.
void solve_small_dense(std::vector<double>& mat, std::vector<double>& rhs, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(mat[r * n + col]) > std::abs(mat[pivot * n + col])) pivot = r;
        if (std::abs(mat[pivot * n + col]) < 1e-12)
            throw std::invalid_argument("degenerate fit grid: rank-deficient design matrix");
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(mat[pivot * n + c], mat[col * n + c]);
            std::swap(rhs[pivot], rhs[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = mat[r * n + col] / mat[col * n + col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) mat[r * n + c] -= f * mat[col * n + c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double acc = rhs[r];
        for (int c = r + 1; c < n; ++c) acc -= mat[r * n + c] * rhs[c];
        rhs[r] = acc / mat[r * n + r];
    }
}

/// Eigen-split of the symmetric 2x2 Hessian into PSD plus/minus parts.
void split_hessian(double hvv, double hva, double haa, std::array<double, 3>& plus,
                   std::array<double, 3>& minus) {
    plus = {0.0, 0.0, 0.0};
    minus = {0.0, 0.0, 0.0};
    const double tr = hvv + haa;
    const double diff = hvv - haa;
    const double rad = std::sqrt(diff * diff + 4.0 * hva * hva);
    const double lam1 = 0.5 * (tr + rad);
    const double lam2 = 0.5 * (tr - rad);
    auto accumulate = [&](double lam, double ux, double uy) {
        const double norm = std::hypot(ux, uy);
        if (norm < 1e-300) return;
        ux /= norm;
        uy /= norm;
        auto& target = lam >= 0.0 ? plus : minus;
        const double mag = std::abs(lam);
        target[0] += mag * ux * ux;
        target[1] += mag * ux * uy;
        target[2] += mag * uy * uy;
    };
    if (std::abs(hva) < 1e-300) {
        accumulate(hvv, 1.0, 0.0);
        accumulate(haa, 0.0, 1.0);
        return;
    }
    accumulate(lam1, hva, lam1 - hvv);
    accumulate(lam2, hva, lam2 - hvv);
}

} // namespace

QuadraticSurrogate fit_surrogate(const RateFn& rate, const IncludeFn& include, const DcOptions& opts) {
    if (opts.grid_v < 10 || opts.grid_a < 10)
        throw std::invalid_argument("fit grid must be at least 10x10");
    if (!(opts.v_max > opts.v_min) || !(opts.a_max > opts.a_min))
        throw std::invalid_argument("fit grid ranges must be nonempty");

    // Normal equations for the basis [a^2, v^2, a v, a, v, 1].
    std::vector<double> ata(36, 0.0), atb(6, 0.0);
    std::vector<std::array<double, 7>> rows; // basis + target, kept for residuals
    for (int iv = 0; iv < opts.grid_v; ++iv) {
        const double v = opts.v_min + (opts.v_max - opts.v_min) * iv / (opts.grid_v - 1);
        for (int ia = 0; ia < opts.grid_a; ++ia) {
            const double a = opts.a_min + (opts.a_max - opts.a_min) * ia / (opts.grid_a - 1);
            if (!include(v, a)) continue;
            const std::array<double, 6> phi{a * a, v * v, a * v, a, v, 1.0};
            const double y = rate(v, a);
            for (int r = 0; r < 6; ++r) {
                for (int c = 0; c < 6; ++c) ata[r * 6 + c] += phi[r] * phi[c];
                atb[r] += phi[r] * y;
            }
            rows.push_back({phi[0], phi[1], phi[2], phi[3], phi[4], phi[5], y});
        }
    }
    if (rows.size() < 6) throw std::invalid_argument("degenerate fit grid: too few included points");
    solve_small_dense(ata, atb, 6);

    QuadraticSurrogate s;
    s.qaa = atb[0];
    s.qvv = atb[1];
    s.qav = atb[2];
    s.la = atb[3];
    s.lv = atb[4];
    s.k = atb[5];
    s.fit_points = static_cast<int>(rows.size());
    double sq = 0.0;
    for (const auto& row : rows) {
        double pred = 0.0;
        for (int b = 0; b < 6; ++b) pred += atb[b] * row[b];
        const double err = pred - row[6];
        sq += err * err;
        s.fit_max_error = std::max(s.fit_max_error, std::abs(err));
    }
    s.fit_rms = std::sqrt(sq / rows.size());
    split_hessian(2.0 * s.qvv, s.qav, 2.0 * s.qaa, s.hess_plus, s.hess_minus);
    return s;
}

RateFn make_cpem_rate(const CpemParams& params, double slope) {
    return [params, slope](double v, double a) { return cpem_power(std::max(v, 0.0), a, params, slope); };
}

RateFn make_kmmk_rate(const KmmkParams& params, const ResistanceCoefficients& coeffs, double slope) {
    return [params, coeffs, slope](double v, double a) {
        const double u = a + coeffs.eval(std::max(v, 0.0));
        return kmmk_rate(std::max(v, 0.0), u, params, slope);
    };
}

IncludeFn positive_control_mask(const ResistanceCoefficients& coeffs, double u_max) {
    return [coeffs, u_max](double v, double a) {
        const double u = a + coeffs.eval(std::max(v, 0.0));
        return u > 0.0 && u <= u_max;
    };
}

void install_dc_convex_part(ConvexProgram& prog, const QuadraticSurrogate& s, double dt) {
    const VariableLayout& lay = prog.layout;
    const int h = static_cast<int>(lay.jerk.size());
    for (int i = 0; i < h; ++i) {
        if (s.hess_plus[0] != 0.0)
            prog.quadratic_cost.push_back({lay.v[i], lay.v[i], dt * s.hess_plus[0]});
        if (s.hess_plus[2] != 0.0)
            prog.quadratic_cost.push_back({lay.a[i], lay.a[i], dt * s.hess_plus[2]});
        if (s.hess_plus[1] != 0.0)
            prog.quadratic_cost.push_back({lay.a[i], lay.v[i], dt * s.hess_plus[1]});
    }
}

void apply_ccp_linearization(ConvexProgram& prog, const QuadraticSurrogate& s,
                             const Trajectory& incumbent, double dt) {
    const VariableLayout& lay = prog.layout;
    const int h = static_cast<int>(lay.jerk.size());
    if (incumbent.horizon != h) throw std::invalid_argument("incumbent horizon mismatch");
    std::fill(prog.linear_cost.begin(), prog.linear_cost.end(), 0.0);
    double constant = 0.0;
    for (int i = 0; i < h; ++i) {
        const double vb = incumbent.v[i];
        const double ab = incumbent.a[i];
        const double gv = s.hess_minus[0] * vb + s.hess_minus[1] * ab;
        const double ga = s.hess_minus[1] * vb + s.hess_minus[2] * ab;
        prog.linear_cost[lay.v[i]] = dt * (s.lv - gv);
        prog.linear_cost[lay.a[i]] = dt * (s.la - ga);
        constant += dt * (s.k + 0.5 * (vb * gv + ab * ga));
    }
    prog.constant_cost = constant;
}

double surrogate_trip_cost(const QuadraticSurrogate& s, const Trajectory& traj) {
    double total = 0.0;
    for (int i = 0; i < traj.horizon; ++i) total += s.eval(traj.v[i], traj.a[i]) * traj.dt;
    return total;
}

SolutionBundle dc_solve(const ScenarioSpec& spec, const QuadraticSurrogate& s, const DcOptions& opts,
                        const PwaSegments& pwa, const SolverOptions& solver_opts, DcTrace* trace) {
    // Neutral feasible starting point.
    ConvexProgram warm = build_problem(spec, StrategyKind::VelocityMin, pwa);
    SolveResult warm_res = solve(warm, solver_opts);
    if (warm_res.status != SolveStatus::Optimal) {
        SolutionBundle bundle;
        bundle.status = warm_res.status;
        bundle.diagnostics = "dc initialization failed: " + warm_res.message;
        return bundle;
    }
    SolutionBundle incumbent = extract_solution(warm, warm_res, spec, StrategyKind::VelocityMin, pwa);

    ConvexProgram prog = build_problem(spec, StrategyKind::DcSurrogate, pwa, &s);
    double current = surrogate_trip_cost(s, incumbent.trajectory);
    if (trace) trace->objectives.push_back(current);

    SolutionBundle best = incumbent;
    bool converged = false;
    int iterations_used = 0;
    double total_ms = warm_res.wall_ms;
    for (int it = 0; it < opts.max_iterations; ++it) {
        iterations_used = it + 1;
        apply_ccp_linearization(prog, s, best.trajectory, spec.dt);
        SolveResult res = solve(prog, solver_opts);
        total_ms += res.wall_ms;
        if (res.status == SolveStatus::Infeasible)
            throw std::runtime_error("dc subproblem infeasible over a fixed feasible set");
        if (res.status != SolveStatus::Optimal) {
            best.diagnostics = "dc subproblem did not converge: " + res.message;
            break;
        }
        SolutionBundle candidate = extract_solution(prog, res, spec, StrategyKind::DcSurrogate, pwa);
        const double value = surrogate_trip_cost(s, candidate.trajectory);
        if (trace) trace->objectives.push_back(value);
        const double decrease = current - value;
        best = candidate;
        current = value;
        if (decrease < opts.decrease_tolerance * (1.0 + std::abs(value))) {
            converged = true;
            break;
        }
    }
    if (trace) trace->converged = converged;
    best.objective = current;
    best.iterations = iterations_used;
    best.wall_ms = total_ms;
    if (!converged && best.diagnostics.empty())
        best.diagnostics = "ccp iteration limit reached";
    return best;
}

} // namespace ecoplus
