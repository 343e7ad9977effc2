#pragma once

#include "rankpi/dual_problem.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace rankpi {

struct SolveReport {
    int iterations = 0;
    double final_objective = 0.0;
    double final_gap = 0.0;  ///< absolute Frank-Wolfe gap at the returned iterate
    std::vector<double> gap_history;
    std::vector<double> objective_history;  ///< objective at the iterate whose gap is gap_history[t]
    bool converged = false;
    double wall_time = 0.0;  ///< seconds; excluded from every deterministic rendering
};

struct SolveOptions {
    /// Called after every iteration with the new iterate.
    std::function<void(int iteration, const DualVariables &)> observer;
    std::ostream *log = nullptr;
    int log_stride = 0;  ///< 0 disables periodic log lines
};

struct SolveResult {
    DualVariables variables;
    SolveReport report;
};

/**
 * @brief Vertex of the feasible polytope maximizing <grad, s>.
 * @details Per (i, k): alpha entries go to their upper bound iff their partial is
 *          strictly positive; (beta+, beta-) is the best of (0,0), (D,0), (0,D),
 *          earlier candidates winning ties.
 */
[[nodiscard]] DualVariables lmo(const DualProblem &p, const DualGradient &grad);

/// Maximizer of the objective on the segment v + gamma (s - v), gamma in [0, 1].
[[nodiscard]] double exact_line_search(const DualProblem &p, const DualVariables &v, const DualVariables &s);

/// <grad(v), s - v>. With s = lmo(grad(v)) this bounds the suboptimality of v.
[[nodiscard]] double fw_gap(const DualProblem &p, const DualVariables &v, const DualVariables &s);

/**
 * @brief Conditional-gradient ascent on the dual, starting from zero.
 * @details The bias-absorbed dual separates into one block per label (and per
 *          feature space when the beta triangle collapses to {0}). Every block
 *          takes its own exact-line-search Frank-Wolfe step each iteration and
 *          freezes once gap / max(1, |block objective|) <= cfg.tol. Only tol and
 *          max_iter are read from @p cfg.
 * @throws NumericalError when the objective or a gap becomes non-finite.
 */
[[nodiscard]] SolveResult solve(const DualProblem &p, const TrainConfig &cfg, const SolveOptions &options = {});

/// "iterations=... objective=... gap=... converged=..." on one line; deterministic.
[[nodiscard]] std::string summarize(const SolveReport &report);

}  // namespace rankpi
