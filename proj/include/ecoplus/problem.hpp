#ifndef ECOPLUS_PROBLEM_HPP
#define ECOPLUS_PROBLEM_HPP

#include "ecoplus/dynamics.hpp"
#include "ecoplus/program.hpp"
#include "ecoplus/pwa.hpp"
#include "ecoplus/solver.hpp"

#include <optional>

namespace ecoplus {

/// One optimization scenario: road, endpoint conditions, limits, resistance
/// coefficients and discretization, plus the optional leading vehicle.
struct ScenarioSpec {
    RoadSpec road;
    BoundarySpec boundary;
    Limits limits;
    ResistanceCoefficients coeffs;
    double dt = 0.1;
    std::optional<SafetySpec> safety;
    /// The x_H = L row; disabled for auxiliary profiles that only pin speeds.
    bool pin_terminal_position = true;
    /// The u_0 = u_H = 0 rows; disabled for profile segments that start or
    /// end outside an equilibrium (for example a pull-away from standstill,
    /// where zero control cannot hold the velocity bound).
    bool pin_boundary_control = true;

    int horizon() const { return horizon_steps(boundary.tm, dt); }
};

enum class StrategyKind { EcoPlus, VelocityMin, JerkMin, AccelMin, DcSurrogate };

const char* strategy_name(StrategyKind kind);
StrategyKind strategy_from_name(const std::string& name);

struct QuadraticSurrogate; // dc.hpp

/// Extracted trajectory with solver diagnostics.
struct SolutionBundle {
    Trajectory trajectory;
    double objective = 0.0;
    double u_bound_violation = 0.0; ///< worst recovered-control bound excursion
    SolveStatus status = SolveStatus::NumericalFailure;
    KktResiduals kkt;
    int iterations = 0;
    double wall_ms = 0.0;
    std::string diagnostics;
};

/// Assembles the discrete program for a scenario under a strategy. The
/// control input is eliminated; decision variables are a with states x, v, J
/// and (for the epigraph objective) z. All strategies share the identical
/// constraint set:
///   - Euler dynamics equalities and the jerk definition,
///   - boundary rows x_0=0, x_H=L, v_0=v0, v_H=vd, a_0=-a_r(v0), a_H=-a_r(vd),
///   - secant upper bounds a_i + b1_k v_i + b2_k <= u_max (conservative),
///   - one tangent lower bound keeping the recovered control above u_min,
///   - velocity/jerk (and optional acceleration) boxes,
///   - leading-vehicle gap and time-gap rows when a SafetySpec is present.
/// A quadratic surrogate must be supplied for the DC strategy; it installs
/// the convex part of the split objective (the linearized concave part is
/// applied per iteration by the DC procedure).
ConvexProgram build_problem(const ScenarioSpec& spec, StrategyKind strategy, const PwaSegments& pwa,
                            const QuadraticSurrogate* surrogate = nullptr);

/// Maps a solved program back to a trajectory, recovers the eliminated
/// control through the exact quadratic identity, and cross-checks the solver
/// objective against a recomputation from the trajectory.
SolutionBundle extract_solution(const ConvexProgram& prog, const SolveResult& raw,
                                const ScenarioSpec& spec, StrategyKind strategy,
                                const PwaSegments& pwa);

/// Canonical epigraph solve: dispatches to exact row generation for
/// oracle-grade segment counts, otherwise solves the assembled program. The
/// positive-control objective is piecewise linear, so its optimum is often
/// a face; the interior-point solver deterministically reports the face
/// center (optimal trajectories are not unique).
SolutionBundle solve_ecoplus(const ScenarioSpec& spec, const PwaSegments& pwa,
                             const SolverOptions& opts = {});

/// Row-generation path of solve_ecoplus, exposed for oracle-grade families.
SolutionBundle solve_ecoplus_refined(const ScenarioSpec& spec, const PwaSegments& pwa,
                                     const SolverOptions& opts = {});

/// Objective recomputed from a trajectory alone (used for cross-checks).
double recompute_objective(const Trajectory& traj, StrategyKind strategy, const PwaSegments& pwa);

} // namespace ecoplus

#endif // ECOPLUS_PROBLEM_HPP
