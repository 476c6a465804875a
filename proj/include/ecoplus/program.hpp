#ifndef ECOPLUS_PROGRAM_HPP
#define ECOPLUS_PROGRAM_HPP

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ecoplus {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Row-compressed sparse matrix. Rows are appended in build order and the
/// column count is fixed up front.
struct CsrMatrix {
    int cols = 0;
    std::vector<int> row_start{0};
    std::vector<int> col;
    std::vector<double> val;

    int rows() const { return static_cast<int>(row_start.size()) - 1; }
    void add_row(std::span<const int> idx, std::span<const double> v);
    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    /// y += A' z
    void multiply_transpose_add(std::span<const double> z, std::span<double> y) const;
    double row_dot(int r, std::span<const double> x) const;
};

/// One lower-triangle entry of the quadratic cost (objective 0.5 x'Qx).
struct QuadTerm {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// Index map from structural variables (per time step) to program columns.
/// Entries are -1 where a variable does not exist for that step.
struct VariableLayout {
    std::vector<int> x, v, a, jerk, z;
    bool empty() const { return x.empty(); }
};

/// Worst-case constraint violations of a candidate point.
struct ProgramResiduals {
    double eq = 0.0;       ///< max |A_eq x - b_eq|
    double in = 0.0;       ///< max positive part of A_in x - b_in
    double bounds = 0.0;   ///< max bound violation
    double max() const { return eq > in ? (eq > bounds ? eq : bounds) : (in > bounds ? in : bounds); }
};

/// Convex quadratic program
///   min 0.5 x'Qx + c'x + const
///   s.t. A_eq x = b_eq,  A_in x <= b_in,  lb <= x <= ub.
/// Q is given as lower-triangle triplets and must be positive semidefinite.
struct ConvexProgram {
    int num_vars = 0;
    std::vector<double> linear_cost;
    double constant_cost = 0.0;
    std::vector<QuadTerm> quadratic_cost;
    CsrMatrix eq;
    std::vector<double> eq_rhs;
    CsrMatrix in;
    std::vector<double> in_rhs;
    std::vector<double> lower;
    std::vector<double> upper;
    VariableLayout layout;
    std::vector<std::string> build_warnings;

    void resize(int n);
    void add_eq(std::span<const int> idx, std::span<const double> v, double rhs);
    void add_in(std::span<const int> idx, std::span<const double> v, double rhs);
    double objective_value(std::span<const double> x) const;
    /// Q x (full symmetric product from the lower-triangle storage).
    void quadratic_product(std::span<const double> x, std::span<double> y) const;
    ProgramResiduals residuals(std::span<const double> x) const;
    /// Writes the program in an MPS-style interchange layout (free format,
    /// with a QMATRIX section when a quadratic cost is present).
    void write_mps(std::ostream& os, const std::string& name = "ECOPLUS") const;
};

} // namespace ecoplus

#endif // ECOPLUS_PROGRAM_HPP
