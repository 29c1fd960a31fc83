#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace crq {

/// Quantile level tau, strictly inside (0, 1).
class QuantileLevel {
public:
    explicit QuantileLevel(double tau);
    double value() const noexcept { return tau_; }
    /// The mirrored level 1 - tau.
    QuantileLevel complement() const { return QuantileLevel(1.0 - tau_); }

private:
    double tau_;
};

/// Observations with weight below this are treated as absent.
inline constexpr double kZeroWeight = 1e-12;

/// rho_tau(u) = u * (tau - I(u < 0)).
double check_loss(double u, QuantileLevel tau) noexcept;

/**
 * Smallest minimizer of sum_i w_i * rho_tau(x_i - theta). The minimizer is
 * always one of the observed values. An empty `weights` span means unit
 * weights.
 */
double sample_quantile(std::span<const double> values, QuantileLevel tau,
                       std::span<const double> weights = {});

/// Weighted linear quantile regression data. Empty `weights` means all ones.
struct RegressionProblem {
    Eigen::MatrixXd design;
    Eigen::VectorXd response;
    Eigen::VectorXd weights;

    Eigen::Index observations() const noexcept { return design.rows(); }
    Eigen::Index parameters() const noexcept { return design.cols(); }
    /// Explicit weights, expanded to ones when none were given.
    Eigen::VectorXd effective_weights() const;
    /// Throws crq::Error on shape or weight violations.
    void validate() const;
};

struct RqSolution {
    Eigen::VectorXd coefficients;
    double objective = 0.0;
    /// Rows whose residual is zero (to solver tolerance) at `coefficients`.
    std::vector<Eigen::Index> active_rows;
};

/// sum_i w_i * rho_tau(y_i - x_i' coefficients).
double rq_objective(const RegressionProblem& problem, const Eigen::VectorXd& coefficients,
                    QuantileLevel tau);

/**
 * Regression quantile by linear programming on the split-residual form
 *
 *     min  sum_i w_i (tau u_i+ + (1 - tau) u_i-)
 *     s.t. X b + u+ - u- = y,  u+, u- >= 0,  b free.
 *
 * The returned objective is recomputed from the coefficients. When the
 * optimum is not unique any optimal vertex may be returned. Throws when the
 * positively weighted rows do not have full column rank.
 */
RqSolution rq_fit(const RegressionProblem& problem, QuantileLevel tau);

/**
 * Brute-force reference: evaluates every exact fit through p rows and keeps
 * the best. Optimal LP solutions sit on such vertices, so for problems in
 * general position this matches rq_fit. Limited to n <= 15, p <= 4.
 */
RqSolution rq_subset_oracle(const RegressionProblem& problem, QuantileLevel tau);

/// Zero-residual row indices for a coefficient vector.
std::vector<Eigen::Index> active_rows(const RegressionProblem& problem,
                                      const Eigen::VectorXd& coefficients);

}  // namespace crq
