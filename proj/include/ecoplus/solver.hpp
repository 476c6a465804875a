#ifndef ECOPLUS_SOLVER_HPP
#define ECOPLUS_SOLVER_HPP

#include "ecoplus/program.hpp"

#include <optional>

namespace ecoplus {

enum class SolveStatus { Optimal, Infeasible, IterationLimit, NumericalFailure };

const char* to_string(SolveStatus status);

struct SolverOptions {
    int max_iterations = 200;
    double kkt_tolerance = 1e-9;          ///< scaled primal/dual feasibility target
    double gap_tolerance = 1e-10;         ///< scaled complementarity target
    double infeasibility_tolerance = 1e-7; ///< phase-one violation threshold
    bool deterministic_ordering = true;    ///< fixed tie-breaking in the fill-reducing order
    bool collect_trace = false;            ///< record per-iteration duality data
    /// Shorter steps and stronger centering; engaged automatically as a
    /// deterministic retry when the standard run stalls on a degenerate
    /// program.
    bool conservative_stepping = false;
};

/// Scaled KKT residuals of the returned point.
struct KktResiduals {
    double primal = 0.0;          ///< feasibility of x
    double dual = 0.0;            ///< stationarity
    double gap = 0.0;             ///< scaled duality measure mu
    double complementarity = 0.0; ///< worst single complementarity product
};

/// One interior-point iterate, exposed for inspection.
struct IterateInfo {
    int iter = 0;
    double mu = 0.0;
    double primal_res = 0.0;
    double dual_res = 0.0;
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    double step_primal = 0.0;
    double step_dual = 0.0;
};

/// Evidence of primal infeasibility: the phase-one relaxation
///   min gamma  s.t.  |A_eq x - b_eq| <= gamma, A_in x - b_in <= gamma
/// attains a strictly positive optimum, whose duals combine the rows into
/// an unsatisfiable aggregate (Farkas-style weights).
struct InfeasibilityCertificate {
    double phase1_objective = 0.0;
    std::vector<double> eq_dual;
    std::vector<double> in_dual;
};

struct SolveResult {
    SolveStatus status = SolveStatus::NumericalFailure;
    std::vector<double> x;
    std::vector<double> eq_dual;
    std::vector<double> in_dual;
    std::vector<double> lower_dual;
    std::vector<double> upper_dual;
    double objective = 0.0;
    int iterations = 0;
    double wall_ms = 0.0;
    KktResiduals kkt;
    std::vector<IterateInfo> trace;
    std::optional<InfeasibilityCertificate> certificate;
    std::string message;
};

/// Primal-dual interior-point solve (Mehrotra predictor-corrector) with a
/// singleton-equality presolve and a phase-one fallback for infeasibility
/// detection. Deterministic: identical input yields identical output.
SolveResult solve(const ConvexProgram& prog, const SolverOptions& opts = {});

/// Phase-one feasibility check only (no objective optimization).
bool check_feasible(const ConvexProgram& prog, const SolverOptions& opts = {});

/// Verification hook: reads a whitespace-separated solution vector from a
/// file (primal only, or primal followed by eq/in duals) and reports the
/// residuals it achieves on the given program.
struct ExternalCheck {
    ProgramResiduals primal;
    double objective = 0.0;
    std::optional<double> dual_residual; ///< present when duals were supplied
};
ExternalCheck check_solution_file(const ConvexProgram& prog, const std::string& path);

} // namespace ecoplus

#endif // ECOPLUS_SOLVER_HPP
