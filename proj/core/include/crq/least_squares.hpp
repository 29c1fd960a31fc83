#pragma once

#include <Eigen/Dense>

namespace crq {

/// Weighted least squares coefficients; empty `weights` means unit weights.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                              const Eigen::VectorXd& weights = {});

}  // namespace crq
