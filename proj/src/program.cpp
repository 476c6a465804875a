#include "ecoplus/program.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ecoplus {

void CsrMatrix::add_row(std::span<const int> idx, std::span<const double> v) {
    if (idx.size() != v.size()) throw std::invalid_argument("csr row: index/value size mismatch");
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= cols) throw std::invalid_argument("csr row: column out of range");
        col.push_back(idx[k]);
        val.push_back(v[k]);
    }
    row_start.push_back(static_cast<int>(col.size()));
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    const int m = rows();
    for (int r = 0; r < m; ++r) {
        double acc = 0.0;
        for (int k = row_start[r]; k < row_start[r + 1]; ++k) acc += val[k] * x[col[k]];
        y[r] = acc;
    }
}

void CsrMatrix::multiply_transpose_add(std::span<const double> z, std::span<double> y) const {
    const int m = rows();
    for (int r = 0; r < m; ++r) {
        const double zr = z[r];
        if (zr == 0.0) continue;
        for (int k = row_start[r]; k < row_start[r + 1]; ++k) y[col[k]] += val[k] * zr;
    }
}

double CsrMatrix::row_dot(int r, std::span<const double> x) const {
    double acc = 0.0;
    for (int k = row_start[r]; k < row_start[r + 1]; ++k) acc += val[k] * x[col[k]];
    return acc;
}

void ConvexProgram::resize(int n) {
    num_vars = n;
    linear_cost.assign(n, 0.0);
    lower.assign(n, -kInf);
    upper.assign(n, kInf);
    eq.cols = n;
    in.cols = n;
}

void ConvexProgram::add_eq(std::span<const int> idx, std::span<const double> v, double rhs) {
    eq.add_row(idx, v);
    eq_rhs.push_back(rhs);
}

void ConvexProgram::add_in(std::span<const int> idx, std::span<const double> v, double rhs) {
    in.add_row(idx, v);
    in_rhs.push_back(rhs);
}

double ConvexProgram::objective_value(std::span<const double> x) const {
    double obj = constant_cost;
    for (int j = 0; j < num_vars; ++j) obj += linear_cost[j] * x[j];
    for (const auto& t : quadratic_cost) {
        const double term = t.value * x[t.row] * x[t.col];
        obj += t.row == t.col ? 0.5 * term : term;
    }
    return obj;
}

void ConvexProgram::quadratic_product(std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (const auto& t : quadratic_cost) {
        y[t.row] += t.value * x[t.col];
        if (t.row != t.col) y[t.col] += t.value * x[t.row];
    }
}

ProgramResiduals ConvexProgram::residuals(std::span<const double> x) const {
    ProgramResiduals res;
    for (int r = 0; r < eq.rows(); ++r) res.eq = std::max(res.eq, std::abs(eq.row_dot(r, x) - eq_rhs[r]));
    for (int r = 0; r < in.rows(); ++r) res.in = std::max(res.in, in.row_dot(r, x) - in_rhs[r]);
    res.in = std::max(res.in, 0.0);
    for (int j = 0; j < num_vars; ++j) {
        if (lower[j] > -kInf) res.bounds = std::max(res.bounds, lower[j] - x[j]);
        if (upper[j] < kInf) res.bounds = std::max(res.bounds, x[j] - upper[j]);
    }
    return res;
}

void ConvexProgram::write_mps(std::ostream& os, const std::string& name) const {
    auto cname = [](int j) { return "C" + std::to_string(j); };
    os << "NAME " << name << "\n";
    os << "ROWS\n";
    os << " N OBJ\n";
    for (int r = 0; r < eq.rows(); ++r) os << " E E" << r << "\n";
    for (int r = 0; r < in.rows(); ++r) os << " L L" << r << "\n";
    os << "COLUMNS\n";
    // Column-major walk over both constraint blocks.
    std::vector<std::vector<std::pair<std::string, double>>> entries(num_vars);
    for (int j = 0; j < num_vars; ++j)
        if (linear_cost[j] != 0.0) entries[j].push_back({"OBJ", linear_cost[j]});
    for (int r = 0; r < eq.rows(); ++r)
        for (int k = eq.row_start[r]; k < eq.row_start[r + 1]; ++k)
            entries[eq.col[k]].push_back({"E" + std::to_string(r), eq.val[k]});
    for (int r = 0; r < in.rows(); ++r)
        for (int k = in.row_start[r]; k < in.row_start[r + 1]; ++k)
            entries[in.col[k]].push_back({"L" + std::to_string(r), in.val[k]});
    for (int j = 0; j < num_vars; ++j)
        for (const auto& [row, v] : entries[j]) os << "    " << cname(j) << " " << row << " " << v << "\n";
    os << "RHS\n";
    for (int r = 0; r < eq.rows(); ++r)
        if (eq_rhs[r] != 0.0) os << "    RHS E" << r << " " << eq_rhs[r] << "\n";
    for (int r = 0; r < in.rows(); ++r)
        if (in_rhs[r] != 0.0) os << "    RHS L" << r << " " << in_rhs[r] << "\n";
    os << "BOUNDS\n";
    for (int j = 0; j < num_vars; ++j) {
        const bool lo = lower[j] > -kInf;
        const bool hi = upper[j] < kInf;
        if (!lo && !hi) {
            os << " FR BND " << cname(j) << "\n";
        } else {
            if (lo) os << " LO BND " << cname(j) << " " << lower[j] << "\n";
            else os << " MI BND " << cname(j) << "\n";
            if (hi) os << " UP BND " << cname(j) << " " << upper[j] << "\n";
        }
    }
    if (!quadratic_cost.empty()) {
        os << "QMATRIX\n";
        for (const auto& t : quadratic_cost) {
            os << "    " << cname(t.row) << " " << cname(t.col) << " " << t.value << "\n";
            if (t.row != t.col) os << "    " << cname(t.col) << " " << cname(t.row) << " " << t.value << "\n";
        }
    }
    os << "ENDATA\n";
}

} // namespace ecoplus
