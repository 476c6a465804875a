#include "ecoplus/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>

namespace ecoplus {

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::IterationLimit: return "iteration-limit";
        case SolveStatus::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

namespace {

// ---------------------------------------------------------------------------
// Presolve: iterated elimination of variables fixed by equality rows with a
// single unfixed entry (boundary rows) or by coincident bounds. Dropped rows
// are consistency-checked; conflicting fixes mean the program is infeasible.
// ---------------------------------------------------------------------------

struct PresolveResult {
    bool infeasible = false;
    std::string message;
    double conflict = 0.0;

    std::vector<char> fixed;          // per original var
    std::vector<double> fixed_value;  // valid where fixed
    std::vector<int> fixer_row;       // eq row that fixed the var, -1 for bounds
    std::vector<int> fix_order;       // vars in the order they were fixed
    std::vector<int> var_map;         // original var -> reduced var (-1 if fixed)
    std::vector<int> var_back;        // reduced var -> original var
    std::vector<int> eq_map;          // original eq row -> reduced row (-1 if dropped)
    std::vector<int> in_map;          // original in row -> reduced row (-1 if dropped)
    ConvexProgram reduced;
};

PresolveResult run_presolve(const ConvexProgram& prog) {
    PresolveResult ps;
    const int n = prog.num_vars;
    const int p = prog.eq.rows();
    ps.fixed.assign(n, 0);
    ps.fixed_value.assign(n, 0.0);
    ps.fixer_row.assign(n, -1);

    for (int j = 0; j < n; ++j) {
        const double lo = prog.lower[j], hi = prog.upper[j];
        if (lo > -kInf && hi < kInf) {
            if (lo > hi + 1e-9 * (1.0 + std::abs(lo))) {
                ps.infeasible = true;
                ps.conflict = lo - hi;
                ps.message = "bounds cross on variable " + std::to_string(j);
                return ps;
            }
            if (lo >= hi) {
                ps.fixed[j] = 1;
                ps.fixed_value[j] = lo;
                ps.fix_order.push_back(j);
            }
        }
    }

    std::vector<char> row_dropped(p, 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int r = 0; r < p; ++r) {
            if (row_dropped[r]) continue;
            int live = -1;
            int live_count = 0;
            double shift = 0.0;
            for (int k = prog.eq.row_start[r]; k < prog.eq.row_start[r + 1]; ++k) {
                const int j = prog.eq.col[k];
                if (ps.fixed[j]) {
                    shift += prog.eq.val[k] * ps.fixed_value[j];
                } else {
                    ++live_count;
                    live = k;
                }
            }
            if (live_count == 0) {
                const double resid = std::abs(prog.eq_rhs[r] - shift);
                const double tol = 1e-8 * (1.0 + std::abs(prog.eq_rhs[r]) + std::abs(shift));
                if (resid > tol) {
                    ps.infeasible = true;
                    ps.conflict = resid;
                    ps.message = "inconsistent equality row " + std::to_string(r);
                    return ps;
                }
                row_dropped[r] = 1;
                changed = true;
            } else if (live_count == 1) {
                const int j = prog.eq.col[live];
                const double coef = prog.eq.val[live];
                if (std::abs(coef) < 1e-14) continue;
                const double value = (prog.eq_rhs[r] - shift) / coef;
                ps.fixed[j] = 1;
                ps.fixed_value[j] = value;
                ps.fixer_row[j] = r;
                ps.fix_order.push_back(j);
                row_dropped[r] = 1;
                changed = true;
                const double lo = prog.lower[j], hi = prog.upper[j];
                const double btol = 1e-8 * (1.0 + std::abs(value));
                if (value < lo - btol || value > hi + btol) {
                    ps.infeasible = true;
                    ps.conflict = std::max(lo - value, value - hi);
                    ps.message = "fixed variable " + std::to_string(j) + " violates its bounds";
                    return ps;
                }
            }
        }
    }

    // Build the reduced program. Pure renumbering plus rhs/objective shifts.
    ps.var_map.assign(n, -1);
    for (int j = 0; j < n; ++j) {
        if (!ps.fixed[j]) {
            ps.var_map[j] = static_cast<int>(ps.var_back.size());
            ps.var_back.push_back(j);
        }
    }
    const int n_red = static_cast<int>(ps.var_back.size());
    ConvexProgram& red = ps.reduced;
    red.resize(n_red);
    red.constant_cost = prog.constant_cost;
    for (int j = 0; j < n; ++j) {
        if (ps.fixed[j]) red.constant_cost += prog.linear_cost[j] * ps.fixed_value[j];
        else red.linear_cost[ps.var_map[j]] = prog.linear_cost[j];
    }
    for (const auto& t : prog.quadratic_cost) {
        const bool fr = ps.fixed[t.row], fc = ps.fixed[t.col];
        if (!fr && !fc) {
            red.quadratic_cost.push_back({ps.var_map[t.row], ps.var_map[t.col], t.value});
        } else if (fr && fc) {
            const double prod = t.value * ps.fixed_value[t.row] * ps.fixed_value[t.col];
            red.constant_cost += t.row == t.col ? 0.5 * prod : prod;
        } else if (fr) {
            red.linear_cost[ps.var_map[t.col]] += t.value * ps.fixed_value[t.row];
        } else {
            red.linear_cost[ps.var_map[t.row]] += t.value * ps.fixed_value[t.col];
        }
    }
    for (int j = 0; j < n_red; ++j) {
        red.lower[j] = prog.lower[ps.var_back[j]];
        red.upper[j] = prog.upper[ps.var_back[j]];
    }

    ps.eq_map.assign(p, -1);
    std::vector<int> idx;
    std::vector<double> val;
    for (int r = 0; r < p; ++r) {
        if (row_dropped[r]) continue;
        idx.clear();
        val.clear();
        double rhs = prog.eq_rhs[r];
        for (int k = prog.eq.row_start[r]; k < prog.eq.row_start[r + 1]; ++k) {
            const int j = prog.eq.col[k];
            if (ps.fixed[j]) rhs -= prog.eq.val[k] * ps.fixed_value[j];
            else {
                idx.push_back(ps.var_map[j]);
                val.push_back(prog.eq.val[k]);
            }
        }
        ps.eq_map[r] = red.eq.rows();
        red.add_eq(idx, val, rhs);
    }

    const int m = prog.in.rows();
    ps.in_map.assign(m, -1);
    for (int r = 0; r < m; ++r) {
        idx.clear();
        val.clear();
        double rhs = prog.in_rhs[r];
        for (int k = prog.in.row_start[r]; k < prog.in.row_start[r + 1]; ++k) {
            const int j = prog.in.col[k];
            if (ps.fixed[j]) rhs -= prog.in.val[k] * ps.fixed_value[j];
            else {
                idx.push_back(ps.var_map[j]);
                val.push_back(prog.in.val[k]);
            }
        }
        if (idx.empty()) {
            if (rhs < -1e-8 * (1.0 + std::abs(prog.in_rhs[r]))) {
                ps.infeasible = true;
                ps.conflict = -rhs;
                ps.message = "inconsistent inequality row " + std::to_string(r);
                return ps;
            }
            continue;
        }
        ps.in_map[r] = red.in.rows();
        red.add_in(idx, val, rhs);
    }
    return ps;
}

// ---------------------------------------------------------------------------
// Fill-reducing order: reverse Cuthill-McKee on the aggregate pattern of the
// augmented KKT matrix [[H, A'], [A, 0]], where H collects Q, the inequality
// row cliques and the bound diagonal. Deterministic tie-breaking by degree
// then index.
// ---------------------------------------------------------------------------

std::vector<int> rcm_order(int n_vars, int n_rows, const ConvexProgram& prog) {
    const int total = n_vars + n_rows;
    std::vector<std::vector<int>> adj(total);
    auto connect = [&adj](int a, int b) {
        if (a == b) return;
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    for (const auto& t : prog.quadratic_cost) connect(t.row, t.col);
    for (int r = 0; r < n_rows; ++r)
        for (int k = prog.eq.row_start[r]; k < prog.eq.row_start[r + 1]; ++k)
            connect(n_vars + r, prog.eq.col[k]);
    for (int r = 0; r < prog.in.rows(); ++r)
        for (int k1 = prog.in.row_start[r]; k1 < prog.in.row_start[r + 1]; ++k1)
            for (int k2 = k1 + 1; k2 < prog.in.row_start[r + 1]; ++k2)
                connect(prog.in.col[k1], prog.in.col[k2]);
    for (auto& nb : adj) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }

    std::vector<int> degree(total);
    for (int i = 0; i < total; ++i) degree[i] = static_cast<int>(adj[i].size());
    std::vector<char> visited(total, 0);
    std::vector<int> order;
    order.reserve(total);
    std::vector<int> queue;
    for (;;) {
        int start = -1;
        for (int i = 0; i < total; ++i) {
            if (visited[i]) continue;
            if (start == -1 || degree[i] < degree[start]) start = i;
        }
        if (start == -1) break;
        queue.clear();
        queue.push_back(start);
        visited[start] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int u = queue[head];
            order.push_back(u);
            std::vector<int> next;
            for (int w : adj[u])
                if (!visited[w]) {
                    visited[w] = 1;
                    next.push_back(w);
                }
            std::sort(next.begin(), next.end(), [&degree](int a, int b) {
                return degree[a] != degree[b] ? degree[a] < degree[b] : a < b;
            });
            queue.insert(queue.end(), next.begin(), next.end());
        }
    }
    std::reverse(order.begin(), order.end());
    std::vector<int> perm(total); // old index -> new position
    for (int pos = 0; pos < total; ++pos) perm[order[pos]] = pos;
    return perm;
}

// ---------------------------------------------------------------------------
// Envelope (skyline) LDL' factorization of the quasidefinite KKT matrix.
// The pattern is fixed per program; numeric values are re-assembled and
// re-factored every interior-point iteration.
// ---------------------------------------------------------------------------

class KktSolver {
public:
    KktSolver(const ConvexProgram& prog, int n_vars, int n_rows)
        : n_(n_vars), p_(n_rows), total_(n_vars + n_rows), prog_(prog) {
        perm_ = rcm_order(n_vars, n_rows, prog);
        first_.assign(total_, 0);
        for (int i = 0; i < total_; ++i) first_[i] = i;
        auto touch = [this](int a, int b) {
            const int pa = perm_[a], pb = perm_[b];
            const int hi = std::max(pa, pb), lo = std::min(pa, pb);
            first_[hi] = std::min(first_[hi], lo);
        };
        for (const auto& t : prog.quadratic_cost) touch(t.row, t.col);
        for (int r = 0; r < p_; ++r)
            for (int k = prog.eq.row_start[r]; k < prog.eq.row_start[r + 1]; ++k)
                touch(n_ + r, prog.eq.col[k]);
        for (int r = 0; r < prog.in.rows(); ++r)
            for (int k1 = prog.in.row_start[r]; k1 < prog.in.row_start[r + 1]; ++k1)
                for (int k2 = k1; k2 < prog.in.row_start[r + 1]; ++k2)
                    touch(prog.in.col[k1], prog.in.col[k2]);

        env_start_.assign(total_ + 1, 0);
        for (int i = 0; i < total_; ++i) env_start_[i + 1] = env_start_[i] + (i - first_[i] + 1);
        base_.assign(env_start_[total_], 0.0);
        work_.assign(env_start_[total_], 0.0);
        dvals_.assign(total_, 0.0);
        node_sign_.assign(total_, 1);
        for (int r = 0; r < p_; ++r) node_sign_[perm_[n_ + r]] = -1;

        // Static part: Q entries and equality rows never change.
        for (const auto& t : prog.quadratic_cost) base_[slot(t.row, t.col)] += t.value;
        for (int r = 0; r < p_; ++r)
            for (int k = prog.eq.row_start[r]; k < prog.eq.row_start[r + 1]; ++k)
                base_[slot(n_ + r, prog.eq.col[k])] += prog.eq.val[k];

        // Precomputed scatter lists for the inequality barrier term G' W G.
        const auto& in = prog.in;
        pair_start_.assign(in.rows() + 1, 0);
        for (int r = 0; r < in.rows(); ++r) {
            const int len = in.row_start[r + 1] - in.row_start[r];
            pair_start_[r + 1] = pair_start_[r] + len * (len + 1) / 2;
        }
        pair_slot_.resize(pair_start_.back());
        pair_coef_.resize(pair_start_.back());
        int cursor = 0;
        for (int r = 0; r < in.rows(); ++r) {
            for (int k1 = in.row_start[r]; k1 < in.row_start[r + 1]; ++k1)
                for (int k2 = k1; k2 < in.row_start[r + 1]; ++k2) {
                    pair_slot_[cursor] = slot(in.col[k1], in.col[k2]);
                    pair_coef_[cursor] = in.val[k1] * in.val[k2];
                    ++cursor;
                }
        }
        diag_scale_ = 1.0;
        for (const auto& t : prog.quadratic_cost)
            if (t.row == t.col) diag_scale_ = std::max(diag_scale_, std::abs(t.value));
    }

    /// Assembles and factors the KKT matrix for the given diagonal weights:
    /// H = Q + G' diag(in_weight) G + diag(bound_weight), lower-right -delta.
    /// Returns false when the factorization is unusable even after pivot
    /// perturbation.
    bool factor(std::span<const double> in_weight, std::span<const double> bound_weight,
                double static_reg) {
        std::copy(base_.begin(), base_.end(), work_.begin());
        for (int r = 0; r < prog_.in.rows(); ++r) {
            const double w = in_weight[r];
            for (int k = pair_start_[r]; k < pair_start_[r + 1]; ++k)
                work_[pair_slot_[k]] += w * pair_coef_[k];
        }
        for (int j = 0; j < n_; ++j) work_[diag_slot(j)] += bound_weight[j] + static_reg;
        for (int r = 0; r < p_; ++r) work_[diag_slot(n_ + r)] -= static_reg;

        bumps_ = 0;
        const double piv_floor = 1e-13 * std::max(1.0, diag_scale_);
        const double bump = 1e-8 * std::max(1.0, diag_scale_);
        for (int i = 0; i < total_; ++i) {
            double* row_i = &work_[env_start_[i]] - first_[i];
            for (int j = first_[i]; j < i; ++j) {
                const double* row_j = &work_[env_start_[j]] - first_[j];
                const int lo = std::max(first_[i], first_[j]);
                double sum = row_i[j];
                for (int k = lo; k < j; ++k) sum -= row_i[k] * row_j[k] * dvals_[k];
                row_i[j] = sum / dvals_[j];
            }
            double d = row_i[i];
            for (int k = first_[i]; k < i; ++k) d -= row_i[k] * row_i[k] * dvals_[k];
            const int sign = node_sign_[i];
            if (!(d * sign > piv_floor)) {
                d = sign * bump;
                ++bumps_;
            }
            dvals_[i] = d;
            row_i[i] = d;
        }
        return bumps_ < total_;
    }

    /// Solves K [dx; dy] = [r1; r2] through the current factorization.
    void solve(std::span<const double> r1, std::span<const double> r2, std::span<double> dx,
               std::span<double> dy) const {
        std::vector<double> rhs(total_);
        for (int j = 0; j < n_; ++j) rhs[perm_[j]] = r1[j];
        for (int r = 0; r < p_; ++r) rhs[perm_[n_ + r]] = r2[r];
        for (int i = 0; i < total_; ++i) {
            const double* row_i = &work_[env_start_[i]] - first_[i];
            double sum = rhs[i];
            for (int k = first_[i]; k < i; ++k) sum -= row_i[k] * rhs[k];
            rhs[i] = sum;
        }
        for (int i = 0; i < total_; ++i) rhs[i] /= dvals_[i];
        for (int i = total_ - 1; i >= 0; --i) {
            const double* row_i = &work_[env_start_[i]] - first_[i];
            const double zi = rhs[i];
            for (int k = first_[i]; k < i; ++k) rhs[k] -= row_i[k] * zi;
        }
        for (int j = 0; j < n_; ++j) dx[j] = rhs[perm_[j]];
        for (int r = 0; r < p_; ++r) dy[r] = rhs[perm_[n_ + r]];
    }

    int bumps() const { return bumps_; }

private:
    int slot(int a, int b) const {
        const int pa = perm_[a], pb = perm_[b];
        const int hi = std::max(pa, pb), lo = std::min(pa, pb);
        return env_start_[hi] + (lo - first_[hi]);
    }
    int diag_slot(int a) const {
        const int pa = perm_[a];
        return env_start_[pa] + (pa - first_[pa]);
    }

    int n_, p_, total_;
    const ConvexProgram& prog_;
    std::vector<int> perm_, first_, env_start_;
    std::vector<double> base_, work_, dvals_;
    std::vector<int> node_sign_;
    std::vector<int> pair_start_;
    std::vector<int32_t> pair_slot_;
    std::vector<double> pair_coef_;
    double diag_scale_ = 1.0;
    int bumps_ = 0;
};

// ---------------------------------------------------------------------------
// Interior-point method on the reduced program.
// ---------------------------------------------------------------------------

struct IpmSolution {
    SolveStatus status = SolveStatus::NumericalFailure;
    std::vector<double> x, y, z, zl, zu;
    int iterations = 0;
    std::vector<IterateInfo> trace;
    std::string message;
};

struct IpmScales {
    double rhs_norm = 1.0;
    double cost_norm = 1.0;
};

IpmScales compute_scales(const ConvexProgram& prog) {
    IpmScales s;
    double rn = 0.0;
    for (double b : prog.eq_rhs) rn = std::max(rn, std::abs(b));
    for (double h : prog.in_rhs) rn = std::max(rn, std::abs(h));
    for (int j = 0; j < prog.num_vars; ++j) {
        if (prog.lower[j] > -kInf) rn = std::max(rn, std::abs(prog.lower[j]));
        if (prog.upper[j] < kInf) rn = std::max(rn, std::abs(prog.upper[j]));
    }
    double cn = 0.0;
    for (double c : prog.linear_cost) cn = std::max(cn, std::abs(c));
    for (const auto& t : prog.quadratic_cost) cn = std::max(cn, std::abs(t.value));
    s.rhs_norm = 1.0 + rn;
    s.cost_norm = 1.0 + cn;
    return s;
}

// Single streaming pass over a CSR matrix: ax = A x and/or grad += A' z.
// The inequality block carries hundreds of thousands of rows, so every full
// sweep over its value array is the dominant cost of an iteration.
void sweep_mult(const CsrMatrix& A, const double* x, double* ax) {
    const int m = A.rows();
    const int* rs = A.row_start.data();
    const int* col = A.col.data();
    const double* val = A.val.data();
    for (int r = 0; r < m; ++r) {
        double acc = 0.0;
        for (int k = rs[r]; k < rs[r + 1]; ++k) acc += val[k] * x[col[k]];
        ax[r] = acc;
    }
}

void sweep_mult_and_taddscaled(const CsrMatrix& A, const double* x, double* ax, const double* z,
                               double zscale, double* grad) {
    const int m = A.rows();
    const int* rs = A.row_start.data();
    const int* col = A.col.data();
    const double* val = A.val.data();
    for (int r = 0; r < m; ++r) {
        double acc = 0.0;
        const double zr = zscale * z[r];
        for (int k = rs[r]; k < rs[r + 1]; ++k) {
            acc += val[k] * x[col[k]];
            grad[col[k]] += val[k] * zr;
        }
        ax[r] = acc;
    }
}

void sweep_taddscaled(const CsrMatrix& A, const double* z, double zscale, double* grad) {
    const int m = A.rows();
    const int* rs = A.row_start.data();
    const int* col = A.col.data();
    const double* val = A.val.data();
    for (int r = 0; r < m; ++r) {
        const double zr = zscale * z[r];
        if (zr == 0.0) continue;
        for (int k = rs[r]; k < rs[r + 1]; ++k) grad[col[k]] += val[k] * zr;
    }
}

// out += A' (w o (A dx)) in one pass, optionally recording A dx. The row dot
// completes before the scatter of the same row, so no second sweep is needed.
void sweep_barrier_apply(const CsrMatrix& A, const double* w, const double* dx, double* out,
                         double* adx_store) {
    const int m = A.rows();
    const int* rs = A.row_start.data();
    const int* col = A.col.data();
    const double* val = A.val.data();
    for (int r = 0; r < m; ++r) {
        double acc = 0.0;
        for (int k = rs[r]; k < rs[r + 1]; ++k) acc += val[k] * dx[col[k]];
        if (adx_store) adx_store[r] = acc;
        const double scaled = w[r] * acc;
        if (scaled != 0.0)
            for (int k = rs[r]; k < rs[r + 1]; ++k) out[col[k]] += val[k] * scaled;
    }
}

IpmSolution run_ipm(const ConvexProgram& prog, const SolverOptions& opts) {
    const int n = prog.num_vars;
    const int p = prog.eq.rows();
    const int m = prog.in.rows();
    IpmSolution sol;
    sol.x.assign(n, 0.0);
    sol.y.assign(p, 0.0);
    sol.z.assign(m, 0.0);
    sol.zl.assign(n, 0.0);
    sol.zu.assign(n, 0.0);

    std::vector<int> lo_idx, hi_idx;
    for (int j = 0; j < n; ++j) {
        if (prog.lower[j] > -kInf) lo_idx.push_back(j);
        if (prog.upper[j] < kInf) hi_idx.push_back(j);
    }
    const int total_barrier = m + static_cast<int>(lo_idx.size() + hi_idx.size());
    const IpmScales scales = compute_scales(prog);

    KktSolver kkt(prog, n, p);

    auto apply_kkt = [&](std::span<const double> dx, std::span<const double> dy,
                         std::span<const double> in_w, std::span<const double> bw,
                         std::span<double> out1, std::span<double> out2,
                         std::vector<double>& scratch_m) {
        prog.quadratic_product(dx, out1);
        for (int j = 0; j < n; ++j) out1[j] += bw[j] * dx[j];
        sweep_barrier_apply(prog.in, in_w.data(), dx.data(), out1.data(), scratch_m.data());
        prog.eq.multiply_transpose_add(dy, out1);
        prog.eq.multiply(dx, out2);
    };

    // Pure equality-constrained QP: a single Newton solve is exact.
    if (total_barrier == 0) {
        std::vector<double> in_w, bw(n, 0.0), rhs1(n), rhs2(p), scratch;
        if (!kkt.factor(in_w, bw, 1e-12)) {
            sol.message = "kkt factorization failed";
            return sol;
        }
        for (int j = 0; j < n; ++j) rhs1[j] = -prog.linear_cost[j];
        for (int r = 0; r < p; ++r) rhs2[r] = prog.eq_rhs[r];
        kkt.solve(rhs1, rhs2, sol.x, sol.y);
        // One refinement round against the unregularized system.
        std::vector<double> res1(n), res2(p), cor1(n), cor2(p);
        scratch.assign(m, 0.0);
        apply_kkt(sol.x, sol.y, in_w, bw, res1, res2, scratch);
        for (int j = 0; j < n; ++j) res1[j] = rhs1[j] - res1[j];
        for (int r = 0; r < p; ++r) res2[r] = rhs2[r] - res2[r];
        kkt.solve(res1, res2, cor1, cor2);
        for (int j = 0; j < n; ++j) sol.x[j] += cor1[j];
        for (int r = 0; r < p; ++r) sol.y[r] += cor2[r];
        sol.status = SolveStatus::Optimal;
        sol.iterations = 1;
        return sol;
    }

    // Starting point: strictly interior in the bound boxes, unit slacks.
    std::vector<double>& x = sol.x;
    for (int j = 0; j < n; ++j) {
        const double lo = prog.lower[j], hi = prog.upper[j];
        if (lo > -kInf && hi < kInf) x[j] = 0.5 * (lo + hi);
        else if (lo > -kInf) x[j] = lo + 1.0;
        else if (hi < kInf) x[j] = hi - 1.0;
        else x[j] = 0.0;
    }
    std::vector<double> s(m, 1.0);
    {
        std::vector<double> gx(m, 0.0);
        prog.in.multiply(x, gx);
        for (int r = 0; r < m; ++r) s[r] = std::max(1.0, prog.in_rhs[r] - gx[r]);
    }
    for (int r = 0; r < m; ++r) sol.z[r] = 1.0;
    for (int j : lo_idx) sol.zl[j] = 1.0;
    for (int j : hi_idx) sol.zu[j] = 1.0;

    std::vector<double> r_d(n), r_p(p), r_g(m), qx(n), gx(m);
    std::vector<double> in_w(m), bw(n);
    std::vector<double> rc(m), rc_l(n), rc_u(n);
    std::vector<double> rhs1(n), rhs2(p), dx(n), dy(p), dz(m), ds(m), dzl(n), dzu(n);
    std::vector<double> dx_aff(n), dz_aff(m), ds_aff(m), dzl_aff(n), dzu_aff(n);
    std::vector<double> scratch(m), gdx(m);
    std::vector<double> res1(n), res2(p), cor1(n), cor2(p);

    int stall_steps = 0;

    auto compute_newton = [&](std::span<double> odx, std::span<double> ody, std::span<double> odz,
                              std::span<double> ods, std::span<double> odzl, std::span<double> odzu) {
        // rhs1 = -r_d - G'[(z r_g - rc)/s] - rc_l/(x-l) + rc_u/(u-x)
        for (int j = 0; j < n; ++j) rhs1[j] = -r_d[j];
        for (int r = 0; r < m; ++r) scratch[r] = (sol.z[r] * r_g[r] - rc[r]) / s[r];
        sweep_taddscaled(prog.in, scratch.data(), -1.0, rhs1.data());
        for (int j : lo_idx) rhs1[j] -= rc_l[j] / (x[j] - prog.lower[j]);
        for (int j : hi_idx) rhs1[j] += rc_u[j] / (prog.upper[j] - x[j]);
        for (int r = 0; r < p; ++r) rhs2[r] = -r_p[r];
        kkt.solve(rhs1, rhs2, odx, ody);

        // Refinement against the exact Newton matrix. The residual pass also
        // produces G odx, which the slack/dual back-substitution reuses.
        for (int round = 0;; ++round) {
            apply_kkt(odx, ody, in_w, bw, res1, res2, gdx);
            double worst = 0.0;
            for (int j = 0; j < n; ++j) {
                res1[j] = rhs1[j] - res1[j];
                worst = std::max(worst, std::abs(res1[j]));
            }
            for (int r = 0; r < p; ++r) {
                res2[r] = rhs2[r] - res2[r];
                worst = std::max(worst, std::abs(res2[r]));
            }
            if (worst < 1e-11 * scales.rhs_norm || round >= 2) break;
            kkt.solve(res1, res2, cor1, cor2);
            for (int j = 0; j < n; ++j) odx[j] += cor1[j];
            for (int r = 0; r < p; ++r) ody[r] += cor2[r];
        }

        for (int r = 0; r < m; ++r) {
            ods[r] = -r_g[r] - gdx[r];
            odz[r] = (sol.z[r] * r_g[r] - rc[r]) / s[r] + in_w[r] * gdx[r];
        }
        for (int j = 0; j < n; ++j) {
            odzl[j] = 0.0;
            odzu[j] = 0.0;
        }
        for (int j : lo_idx) odzl[j] = -(sol.zl[j] * odx[j] + rc_l[j]) / (x[j] - prog.lower[j]);
        for (int j : hi_idx) odzu[j] = (sol.zu[j] * odx[j] - rc_u[j]) / (prog.upper[j] - x[j]);
    };

    auto primal_ratio = [&](std::span<const double> idx, std::span<const double> ids) {
        double alpha = 1.0;
        for (int r = 0; r < m; ++r)
            if (ids[r] < 0.0) alpha = std::min(alpha, -s[r] / ids[r]);
        for (int j : lo_idx)
            if (idx[j] < 0.0) alpha = std::min(alpha, -(x[j] - prog.lower[j]) / idx[j]);
        for (int j : hi_idx)
            if (idx[j] > 0.0) alpha = std::min(alpha, (prog.upper[j] - x[j]) / idx[j]);
        return alpha;
    };
    auto dual_ratio = [&](std::span<const double> idz, std::span<const double> idzl,
                          std::span<const double> idzu) {
        double alpha = 1.0;
        for (int r = 0; r < m; ++r)
            if (idz[r] < 0.0) alpha = std::min(alpha, -sol.z[r] / idz[r]);
        for (int j : lo_idx)
            if (idzl[j] < 0.0) alpha = std::min(alpha, -sol.zl[j] / idzl[j]);
        for (int j : hi_idx)
            if (idzu[j] < 0.0) alpha = std::min(alpha, -sol.zu[j] / idzu[j]);
        return alpha;
    };

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        sol.iterations = iter + 1;

        prog.quadratic_product(x, qx);
        for (int j = 0; j < n; ++j) r_d[j] = qx[j] + prog.linear_cost[j] - sol.zl[j] + sol.zu[j];
        prog.eq.multiply_transpose_add(sol.y, r_d);
        sweep_mult_and_taddscaled(prog.in, x.data(), gx.data(), sol.z.data(), 1.0, r_d.data());
        prog.eq.multiply(x, r_p);
        for (int r = 0; r < p; ++r) r_p[r] -= prog.eq_rhs[r];
        for (int r = 0; r < m; ++r) r_g[r] = gx[r] + s[r] - prog.in_rhs[r];

        double gap_sum = 0.0;
        for (int r = 0; r < m; ++r) gap_sum += s[r] * sol.z[r];
        for (int j : lo_idx) gap_sum += (x[j] - prog.lower[j]) * sol.zl[j];
        for (int j : hi_idx) gap_sum += (prog.upper[j] - x[j]) * sol.zu[j];
        const double mu = gap_sum / total_barrier;
        if (!std::isfinite(mu)) {
            sol.status = SolveStatus::NumericalFailure;
            sol.message = "nonfinite duality measure";
            return sol;
        }

        double eq_res = 0.0;
        for (int r = 0; r < p; ++r) eq_res = std::max(eq_res, std::abs(r_p[r]));
        double in_res = 0.0;
        for (int r = 0; r < m; ++r) in_res = std::max(in_res, gx[r] - prog.in_rhs[r]);
        const double pres = std::max(eq_res, std::max(in_res, 0.0)) / scales.rhs_norm;
        double dres = 0.0;
        for (int j = 0; j < n; ++j) dres = std::max(dres, std::abs(r_d[j]));
        dres /= scales.cost_norm;
        const double obj = prog.objective_value(x);
        const double gap_scaled = mu / (1.0 + std::abs(obj));

        if (opts.collect_trace) {
            IterateInfo info;
            info.iter = iter;
            info.mu = mu;
            info.primal_res = pres;
            info.dual_res = dres;
            info.primal_obj = obj;
            double dual_obj = prog.constant_cost;
            double xqx = 0.0;
            for (int j = 0; j < n; ++j) xqx += x[j] * qx[j];
            dual_obj -= 0.5 * xqx;
            for (int r = 0; r < p; ++r) dual_obj -= prog.eq_rhs[r] * sol.y[r];
            for (int r = 0; r < m; ++r) dual_obj -= prog.in_rhs[r] * sol.z[r];
            for (int j : lo_idx) dual_obj += prog.lower[j] * sol.zl[j];
            for (int j : hi_idx) dual_obj -= prog.upper[j] * sol.zu[j];
            info.dual_obj = dual_obj;
            sol.trace.push_back(info);
        }

        if (pres <= opts.kkt_tolerance && dres <= opts.kkt_tolerance && gap_scaled <= opts.gap_tolerance) {
            sol.status = SolveStatus::Optimal;
            return sol;
        }

        // Divergence heuristic: complementarity collapsed while primal
        // feasibility stalled far from tolerance.
        if (iter >= 30 && gap_scaled < 1e-10 && pres > 1e3 * opts.kkt_tolerance) {
            sol.status = SolveStatus::IterationLimit;
            sol.message = "stalled with primal infeasibility";
            return sol;
        }

        constexpr double kWeightCap = 1e16;
        for (int r = 0; r < m; ++r) in_w[r] = std::min(sol.z[r] / s[r], kWeightCap);
        std::fill(bw.begin(), bw.end(), 0.0);
        for (int j : lo_idx) bw[j] += std::min(sol.zl[j] / (x[j] - prog.lower[j]), kWeightCap);
        for (int j : hi_idx) bw[j] += std::min(sol.zu[j] / (prog.upper[j] - x[j]), kWeightCap);

        double reg = 1e-12 * std::max(1.0, scales.cost_norm);
        bool factored = false;
        for (int attempt = 0; attempt < 3 && !factored; ++attempt, reg *= 1e3)
            factored = kkt.factor(in_w, bw, reg);
        if (!factored) {
            sol.status = SolveStatus::NumericalFailure;
            sol.message = "kkt factorization failed";
            return sol;
        }

        // Predictor (affine scaling direction).
        for (int r = 0; r < m; ++r) rc[r] = s[r] * sol.z[r];
        std::fill(rc_l.begin(), rc_l.end(), 0.0);
        std::fill(rc_u.begin(), rc_u.end(), 0.0);
        for (int j : lo_idx) rc_l[j] = (x[j] - prog.lower[j]) * sol.zl[j];
        for (int j : hi_idx) rc_u[j] = (prog.upper[j] - x[j]) * sol.zu[j];
        compute_newton(dx_aff, dy, dz_aff, ds_aff, dzl_aff, dzu_aff);

        const double ap_aff = primal_ratio(dx_aff, ds_aff);
        const double ad_aff = dual_ratio(dz_aff, dzl_aff, dzu_aff);
        double mu_aff = 0.0;
        for (int r = 0; r < m; ++r)
            mu_aff += (s[r] + ap_aff * ds_aff[r]) * (sol.z[r] + ad_aff * dz_aff[r]);
        for (int j : lo_idx)
            mu_aff += (x[j] - prog.lower[j] + ap_aff * dx_aff[j]) * (sol.zl[j] + ad_aff * dzl_aff[j]);
        for (int j : hi_idx)
            mu_aff += (prog.upper[j] - x[j] - ap_aff * dx_aff[j]) * (sol.zu[j] + ad_aff * dzu_aff[j]);
        mu_aff /= total_barrier;
        double sigma = std::pow(std::clamp(mu_aff / std::max(mu, 1e-300), 0.0, 1.0), 3);
        sigma = std::clamp(sigma, opts.conservative_stepping ? 0.1 : 1e-8, 1.0 - 1e-8);

        // Corrector.
        const double target = sigma * mu;
        for (int r = 0; r < m; ++r) rc[r] = s[r] * sol.z[r] + ds_aff[r] * dz_aff[r] - target;
        for (int j : lo_idx)
            rc_l[j] = (x[j] - prog.lower[j]) * sol.zl[j] + dx_aff[j] * dzl_aff[j] - target;
        for (int j : hi_idx)
            rc_u[j] = (prog.upper[j] - x[j]) * sol.zu[j] - dx_aff[j] * dzu_aff[j] - target;
        compute_newton(dx, dy, dz, ds, dzl, dzu);

        double tau = mu > 1e-6 ? 0.995 : 0.99995;
        if (opts.conservative_stepping) tau = std::min(tau, 0.99);
        double ap = std::min(1.0, tau * primal_ratio(dx, ds));
        double ad = std::min(1.0, tau * dual_ratio(dz, dzl, dzu));

        // Degenerate vertices can block the combined direction entirely; a
        // plain centering step usually restores progress.
        if (ap < 1e-7 && ad < 1e-7) {
            for (int r = 0; r < m; ++r) rc[r] = s[r] * sol.z[r] - mu;
            for (int j : lo_idx) rc_l[j] = (x[j] - prog.lower[j]) * sol.zl[j] - mu;
            for (int j : hi_idx) rc_u[j] = (prog.upper[j] - x[j]) * sol.zu[j] - mu;
            compute_newton(dx, dy, dz, ds, dzl, dzu);
            tau = 0.9;
            ap = std::min(1.0, tau * primal_ratio(dx, ds));
            ad = std::min(1.0, tau * dual_ratio(dz, dzl, dzu));
        }
        if (!sol.trace.empty()) {
            sol.trace.back().step_primal = ap;
            sol.trace.back().step_dual = ad;
        }

        for (int j = 0; j < n; ++j) x[j] += ap * dx[j];
        for (int r = 0; r < m; ++r) s[r] += ap * ds[r];
        for (int r = 0; r < p; ++r) sol.y[r] += ad * dy[r];
        for (int r = 0; r < m; ++r) sol.z[r] += ad * dz[r];
        for (int j : lo_idx) sol.zl[j] += ad * dzl[j];
        for (int j : hi_idx) sol.zu[j] += ad * dzu[j];

        // Floating-point cancellation at near-unit steps can push a slack to
        // exactly zero (or slightly past it); floor everything strictly
        // inside the cone.
        constexpr double kFloor = 1e-30;
        for (int r = 0; r < m; ++r) {
            if (!(s[r] > kFloor)) s[r] = kFloor;
            if (!(sol.z[r] > kFloor)) sol.z[r] = kFloor;
        }
        for (int j : lo_idx) {
            if (!(x[j] - prog.lower[j] > kFloor)) x[j] = prog.lower[j] + kFloor;
            if (!(sol.zl[j] > kFloor)) sol.zl[j] = kFloor;
        }
        for (int j : hi_idx) {
            if (!(prog.upper[j] - x[j] > kFloor)) x[j] = prog.upper[j] - kFloor;
            if (!(sol.zu[j] > kFloor)) sol.zu[j] = kFloor;
        }

        if (ap < 1e-9 && ad < 1e-9) {
            if (++stall_steps >= 3) {
                sol.status = SolveStatus::NumericalFailure;
                sol.message = "step sizes collapsed";
                return sol;
            }
        } else {
            stall_steps = 0;
        }
    }
    sol.status = SolveStatus::IterationLimit;
    sol.message = "iteration limit reached";
    return sol;
}

// Phase-one relaxation: minimize the worst constraint violation gamma over
// the original bounds. Strictly feasible for large gamma, so the IPM always
// converges; a positive optimum certifies primal infeasibility.
ConvexProgram build_phase_one(const ConvexProgram& red) {
    ConvexProgram ph;
    const int n = red.num_vars;
    ph.resize(n + 1);
    const int g = n;
    ph.linear_cost[g] = 1.0;
    for (int j = 0; j < n; ++j) ph.quadratic_cost.push_back({j, j, 1e-12});
    for (int j = 0; j < n; ++j) {
        ph.lower[j] = red.lower[j];
        ph.upper[j] = red.upper[j];
    }
    ph.lower[g] = 0.0;

    std::vector<int> idx;
    std::vector<double> val;
    for (int r = 0; r < red.eq.rows(); ++r) {
        idx.clear();
        val.clear();
        for (int k = red.eq.row_start[r]; k < red.eq.row_start[r + 1]; ++k) {
            idx.push_back(red.eq.col[k]);
            val.push_back(red.eq.val[k]);
        }
        idx.push_back(g);
        val.push_back(-1.0);
        ph.add_in(idx, val, red.eq_rhs[r]);
        for (std::size_t k = 0; k + 1 < val.size(); ++k) val[k] = -val[k];
        ph.add_in(idx, val, -red.eq_rhs[r]);
    }
    for (int r = 0; r < red.in.rows(); ++r) {
        idx.clear();
        val.clear();
        for (int k = red.in.row_start[r]; k < red.in.row_start[r + 1]; ++k) {
            idx.push_back(red.in.col[k]);
            val.push_back(red.in.val[k]);
        }
        idx.push_back(g);
        val.push_back(-1.0);
        ph.add_in(idx, val, red.in_rhs[r]);
    }
    return ph;
}

struct PhaseOneVerdict {
    bool ran = false;
    bool infeasible = false;
    double gamma = 0.0;
    std::vector<double> eq_dual; // reduced-problem row weights
    std::vector<double> in_dual;
};

PhaseOneVerdict run_phase_one(const ConvexProgram& red, const SolverOptions& opts) {
    PhaseOneVerdict verdict;
    ConvexProgram ph = build_phase_one(red);
    SolverOptions ph_opts = opts;
    ph_opts.max_iterations = std::max(opts.max_iterations, 100);
    ph_opts.kkt_tolerance = std::max(opts.kkt_tolerance, 1e-9);
    ph_opts.gap_tolerance = std::max(opts.gap_tolerance, 1e-10);
    ph_opts.collect_trace = false;
    IpmSolution sol = run_ipm(ph, ph_opts);
    if (sol.status != SolveStatus::Optimal) return verdict;
    verdict.ran = true;
    verdict.gamma = sol.x[red.num_vars];
    const IpmScales scales = compute_scales(red);
    double xnorm2 = 0.0;
    for (int j = 0; j < red.num_vars; ++j) xnorm2 += sol.x[j] * sol.x[j];
    const double threshold = std::max(opts.infeasibility_tolerance * scales.rhs_norm, 1e-11 * xnorm2);
    verdict.infeasible = verdict.gamma > threshold;
    if (verdict.infeasible) {
        verdict.eq_dual.resize(red.eq.rows());
        verdict.in_dual.resize(red.in.rows());
        for (int r = 0; r < red.eq.rows(); ++r)
            verdict.eq_dual[r] = sol.z[2 * r] - sol.z[2 * r + 1];
        for (int r = 0; r < red.in.rows(); ++r)
            verdict.in_dual[r] = sol.z[2 * red.eq.rows() + r];
    }
    return verdict;
}

// Reinflates the reduced solution to original indexing and repairs the
// stationarity rows of fixed variables through the duals of their dropped
// fixer rows (or bound multipliers for box-fixed variables).
void reinflate(const ConvexProgram& prog, const PresolveResult& ps, const IpmSolution& red_sol,
               SolveResult& out) {
    const int n = prog.num_vars;
    out.x.assign(n, 0.0);
    for (int j = 0; j < n; ++j)
        out.x[j] = ps.fixed[j] ? ps.fixed_value[j] : red_sol.x[ps.var_map[j]];
    out.eq_dual.assign(prog.eq.rows(), 0.0);
    for (int r = 0; r < prog.eq.rows(); ++r)
        if (ps.eq_map[r] >= 0) out.eq_dual[r] = red_sol.y[ps.eq_map[r]];
    out.in_dual.assign(prog.in.rows(), 0.0);
    for (int r = 0; r < prog.in.rows(); ++r)
        if (ps.in_map[r] >= 0) out.in_dual[r] = red_sol.z[ps.in_map[r]];
    out.lower_dual.assign(n, 0.0);
    out.upper_dual.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        if (ps.fixed[j]) continue;
        out.lower_dual[j] = red_sol.zl[ps.var_map[j]];
        out.upper_dual[j] = red_sol.zu[ps.var_map[j]];
    }

    // Stationarity gradient on the original program.
    std::vector<double> grad(n, 0.0);
    prog.quadratic_product(out.x, grad);
    for (int j = 0; j < n; ++j) grad[j] += prog.linear_cost[j] - out.lower_dual[j] + out.upper_dual[j];
    prog.eq.multiply_transpose_add(out.eq_dual, grad);
    prog.in.multiply_transpose_add(out.in_dual, grad);

    for (auto it = ps.fix_order.rbegin(); it != ps.fix_order.rend(); ++it) {
        const int j = *it;
        const int r = ps.fixer_row[j];
        if (r < 0) {
            if (grad[j] > 0.0) {
                out.lower_dual[j] = grad[j];
            } else {
                out.upper_dual[j] = -grad[j];
            }
            grad[j] = 0.0;
            continue;
        }
        double coef = 0.0;
        for (int k = prog.eq.row_start[r]; k < prog.eq.row_start[r + 1]; ++k)
            if (prog.eq.col[k] == j) coef = prog.eq.val[k];
        if (coef == 0.0) continue;
        const double dy = -grad[j] / coef;
        out.eq_dual[r] += dy;
        for (int k = prog.eq.row_start[r]; k < prog.eq.row_start[r + 1]; ++k)
            grad[prog.eq.col[k]] += prog.eq.val[k] * dy;
    }
}

KktResiduals final_residuals(const ConvexProgram& prog, const SolveResult& res) {
    KktResiduals out;
    const IpmScales scales = compute_scales(prog);
    const int n = prog.num_vars;
    out.primal = prog.residuals(res.x).max() / scales.rhs_norm;

    std::vector<double> grad(n, 0.0);
    prog.quadratic_product(res.x, grad);
    for (int j = 0; j < n; ++j) grad[j] += prog.linear_cost[j] - res.lower_dual[j] + res.upper_dual[j];
    prog.eq.multiply_transpose_add(res.eq_dual, grad);
    prog.in.multiply_transpose_add(res.in_dual, grad);
    for (int j = 0; j < n; ++j) out.dual = std::max(out.dual, std::abs(grad[j]));
    out.dual /= scales.cost_norm;

    double gap_sum = 0.0;
    int count = 0;
    const double obj_scale = 1.0 + std::abs(res.objective);
    for (int r = 0; r < prog.in.rows(); ++r) {
        const double slack = prog.in_rhs[r] - prog.in.row_dot(r, res.x);
        const double c = std::abs(slack * res.in_dual[r]);
        out.complementarity = std::max(out.complementarity, c / obj_scale);
        gap_sum += std::abs(slack * res.in_dual[r]);
        ++count;
    }
    for (int j = 0; j < n; ++j) {
        if (prog.lower[j] > -kInf) {
            const double c = std::abs((res.x[j] - prog.lower[j]) * res.lower_dual[j]);
            out.complementarity = std::max(out.complementarity, c / obj_scale);
            gap_sum += c;
            ++count;
        }
        if (prog.upper[j] < kInf) {
            const double c = std::abs((prog.upper[j] - res.x[j]) * res.upper_dual[j]);
            out.complementarity = std::max(out.complementarity, c / obj_scale);
            gap_sum += c;
            ++count;
        }
    }
    out.gap = count > 0 ? gap_sum / count / obj_scale : 0.0;
    return out;
}

} // namespace

SolveResult solve(const ConvexProgram& prog, const SolverOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult result;
    auto finish = [&](SolveResult& r) -> SolveResult& {
        r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        return r;
    };

    PresolveResult ps = run_presolve(prog);
    if (ps.infeasible) {
        result.status = SolveStatus::Infeasible;
        result.message = "presolve: " + ps.message;
        InfeasibilityCertificate cert;
        cert.phase1_objective = ps.conflict;
        result.certificate = cert;
        return finish(result);
    }

    if (ps.reduced.num_vars == 0) {
        // Everything fixed by boundary rows; the point either satisfies the
        // remaining constraints or the presolve would have rejected it.
        IpmSolution trivial;
        reinflate(prog, ps, trivial, result);
        result.status = SolveStatus::Optimal;
        result.objective = prog.objective_value(result.x);
        result.kkt = final_residuals(prog, result);
        result.iterations = 0;
        return finish(result);
    }

    IpmSolution sol = run_ipm(ps.reduced, opts);
    if (sol.status != SolveStatus::Optimal && !opts.conservative_stepping) {
        // Degenerate programs sometimes stall the aggressive path; one
        // deterministic retry with damped steps and stronger centering.
        SolverOptions retry = opts;
        retry.conservative_stepping = true;
        IpmSolution second = run_ipm(ps.reduced, retry);
        if (second.status == SolveStatus::Optimal) sol = std::move(second);
    }
    result.iterations = sol.iterations;
    result.trace = std::move(sol.trace);
    result.message = sol.message;

    if (sol.status == SolveStatus::Optimal) {
        reinflate(prog, ps, sol, result);
        result.status = SolveStatus::Optimal;
        result.objective = prog.objective_value(result.x);
        result.kkt = final_residuals(prog, result);
        return finish(result);
    }

    // Main solve failed: decide between infeasibility and numerical trouble.
    PhaseOneVerdict verdict = run_phase_one(ps.reduced, opts);
    if (verdict.ran && verdict.infeasible) {
        result.status = SolveStatus::Infeasible;
        InfeasibilityCertificate cert;
        cert.phase1_objective = verdict.gamma;
        cert.eq_dual.assign(prog.eq.rows(), 0.0);
        cert.in_dual.assign(prog.in.rows(), 0.0);
        for (int r = 0; r < prog.eq.rows(); ++r)
            if (ps.eq_map[r] >= 0) cert.eq_dual[r] = verdict.eq_dual[ps.eq_map[r]];
        for (int r = 0; r < prog.in.rows(); ++r)
            if (ps.in_map[r] >= 0) cert.in_dual[r] = verdict.in_dual[ps.in_map[r]];
        result.certificate = cert;
        result.message = "phase-one violation " + std::to_string(verdict.gamma);
        return finish(result);
    }

    reinflate(prog, ps, sol, result);
    result.status = sol.status == SolveStatus::NumericalFailure ? SolveStatus::NumericalFailure
                                                                : SolveStatus::IterationLimit;
    result.objective = prog.objective_value(result.x);
    result.kkt = final_residuals(prog, result);
    return finish(result);
}

bool check_feasible(const ConvexProgram& prog, const SolverOptions& opts) {
    PresolveResult ps = run_presolve(prog);
    if (ps.infeasible) return false;
    if (ps.reduced.num_vars == 0) return true;
    PhaseOneVerdict verdict = run_phase_one(ps.reduced, opts);
    if (!verdict.ran) return false;
    return !verdict.infeasible;
}

ExternalCheck check_solution_file(const ConvexProgram& prog, const std::string& path) {
    std::ifstream stream(path);
    if (!stream) throw std::invalid_argument("cannot open solution file: " + path);
    std::vector<double> values;
    double v;
    while (stream >> v) values.push_back(v);
    const std::size_t n = static_cast<std::size_t>(prog.num_vars);
    const std::size_t full = n + prog.eq.rows() + prog.in.rows();
    if (values.size() != n && values.size() != full)
        throw std::invalid_argument("solution file must hold n or n+p+m numbers");

    ExternalCheck check;
    std::span<const double> x(values.data(), n);
    check.primal = prog.residuals(x);
    check.objective = prog.objective_value(x);
    if (values.size() == full) {
        std::vector<double> grad(n, 0.0);
        prog.quadratic_product(x, grad);
        for (std::size_t j = 0; j < n; ++j) grad[j] += prog.linear_cost[j];
        std::span<const double> y(values.data() + n, prog.eq.rows());
        std::span<const double> z(values.data() + n + prog.eq.rows(), prog.in.rows());
        prog.eq.multiply_transpose_add(y, grad);
        prog.in.multiply_transpose_add(z, grad);
        double worst = 0.0;
        // Bound duals are not part of the file; ignore the gradient at bound-
        // active coordinates so a clean exterior solution still checks out.
        for (std::size_t j = 0; j < n; ++j) {
            const bool at_lo = prog.lower[j] > -kInf && x[j] - prog.lower[j] < 1e-7;
            const bool at_hi = prog.upper[j] < kInf && prog.upper[j] - x[j] < 1e-7;
            if (!at_lo && !at_hi) worst = std::max(worst, std::abs(grad[j]));
        }
        check.dual_residual = worst;
    }
    return check;
}

} // namespace ecoplus
