#pragma once

#include "crq/quantile.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace crq {

/**
 * Data for a canonical regression quantile: explanatory design X (n x p,
 * normally with an intercept column), responses Y (n x q), the level and
 * per-observation weights (empty means unit weights).
 */
struct CanonicalProblem {
    Eigen::MatrixXd design;
    Eigen::MatrixXd responses;
    QuantileLevel tau{0.5};
    Eigen::VectorXd weights;

    Eigen::VectorXd effective_weights() const;
    /// Throws on shape errors or an all-zero response column. Returns
    /// warnings for soft violations such as n <= p + q.
    std::vector<std::string> validate() const;
};

enum class ConstraintKind { simplex, l1_sign };

struct CanonicalFit {
    Eigen::VectorXd alpha;  ///< response weights
    Eigen::VectorXd beta;   ///< predictor weights
    double objective = 0.0;
    ConstraintKind constraint_kind = ConstraintKind::simplex;
    std::vector<std::string> warnings;
};

/// sum_i w_i * rho_tau(x_i' beta - y_i' alpha). Note the fit-minus-response sign.
double canonical_objective(const CanonicalProblem& problem, const Eigen::VectorXd& alpha,
                           const Eigen::VectorXd& beta);

/**
 * Minimizes the canonical objective subject to sum(alpha) = 1, alpha >= 0,
 * as one linear program with alpha as nonnegative columns and the simplex
 * identity as an extra equality row. Only the objective is contractually
 * stable; among tied optima the solver's deterministic vertex is returned.
 */
CanonicalFit canonical_rq_simplex(const CanonicalProblem& problem);

/// Largest q for which canonical_rq_l1 enumerates orthants.
inline constexpr int kMaxOrthantResponses = 12;

/**
 * Minimizes the canonical objective subject to sum |alpha_j| = 1 by solving
 * the sign-constrained program on each of the 2^q orthants and keeping the
 * best. Orthants are visited with the all-positive one first; later orthants
 * replace the incumbent only on a strict improvement.
 */
CanonicalFit canonical_rq_l1(const CanonicalProblem& problem);

struct SubstitutionResult {
    CanonicalFit fit;
    /// False when some reconstituted alpha_j <= 0; the constrained solver is
    /// then required and `fit` is not a valid simplex solution.
    bool interior = false;
};

/**
 * Unconstrained reduction: regress Y_1 on [X, Y_j - Y_1 (j >= 2)] at level
 * 1 - tau, then alpha_j = -gamma_j for j >= 2 and alpha_1 = 1 - sum alpha_j.
 * Requires q >= 2.
 */
SubstitutionResult substitution_fit(const CanonicalProblem& problem);

/// X_new * coefficients: the predictive (or response) index.
Eigen::VectorXd make_index(const Eigen::MatrixXd& x_new, const Eigen::VectorXd& coefficients);

}  // namespace crq
