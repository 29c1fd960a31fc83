#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace crq::lp {

/**
 * Linear program in equality form:
 *
 *     minimize    cost' x
 *     subject to  constraints * x = rhs
 *                 x_j >= 0   for every j with free[j] == false
 *
 * Free variables are split internally into a difference of two nonnegative
 * columns. An empty `free` vector means every variable is nonnegative.
 *
 * `start_basis`, when given, names one nonnegative variable per row whose
 * basic solution is feasible; Phase I is then skipped.
 */
struct Problem {
    Eigen::MatrixXd constraints;
    Eigen::VectorXd rhs;
    Eigen::VectorXd cost;
    std::vector<bool> free;
    std::vector<Eigen::Index> start_basis;
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Solution {
    Status status = Status::iteration_limit;
    Eigen::VectorXd x;
    double objective = 0.0;
    std::size_t iterations = 0;
};

/**
 * Dense two-phase primal simplex.
 *
 * Entering columns follow Dantzig's rule; after a run of degenerate pivots the
 * solver switches to Bland's rule until the objective moves again, so it
 * terminates on the heavily degenerate programs that quantile regression
 * produces. The final basis is re-solved against the original constraint
 * matrix, which removes the rounding accumulated in the tableau.
 *
 * The result depends only on the input (including row and column order).
 */
Solution solve(const Problem& problem);

}  // namespace crq::lp
