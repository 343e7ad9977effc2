#pragma once

#include "rankpi/dual_problem.hpp"

#include <cstdint>
#include <vector>

namespace rankpi::oracle {

/**
 * Reference maximizer for tiny dual problems. Shares nothing with the
 * Frank-Wolfe solver: it assembles each label's QP block explicitly
 * (Hessian = -A' blockdiag(K, K*) A) and runs projected gradient ascent.
 */
struct OracleConfig {
    double step = 0.0;       ///< 0 selects 1e-2 / L with L the largest absolute Gram row sum
    long iters = 200000;
    std::uint64_t seed = 0;  ///< only used with random_start
    bool random_start = false;
    bool paranoid = false;   ///< gradient by central finite differences of dual_objective
    long checkpoint_stride = 1000;
};

struct OracleResult {
    DualVariables variables;
    double objective = 0.0;
    std::vector<double> checkpoints;  ///< objective every checkpoint_stride iterations
};

/// Euclidean projection onto the box / triangle feasible set.
[[nodiscard]] DualVariables project_feasible(const DualProblem &p, const DualVariables &raw);

/// Closed-form projection of (plus, minus) onto {plus, minus >= 0, plus + minus <= D}.
[[nodiscard]] std::pair<double, double> project_triangle(double plus, double minus, double D);

/// Largest absolute row sum over K (and K* when used).
[[nodiscard]] double gram_row_sum_bound(const DualProblem &p);

/// Objective via the explicit QP blocks; agrees with dual_objective up to rounding.
[[nodiscard]] double block_objective(const DualProblem &p, const DualVariables &v);

[[nodiscard]] OracleResult pg_solve(const DualProblem &p, const OracleConfig &cfg = {});

}  // namespace rankpi::oracle
