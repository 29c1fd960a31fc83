#pragma once

#include <Eigen/Dense>

namespace crq {

/// Leading classical canonical pair.
struct CcaFit {
    Eigen::VectorXd a;  ///< response weights (length q)
    Eigen::VectorXd b;  ///< predictor weights (length p)
    double correlation = 0.0;
};

/**
 * Leading canonical correlation between the columns of X and Y.
 *
 * Constant columns (such as an intercept or an unused dummy) are dropped and
 * receive weight zero. The remaining blocks are whitened by column-pivoted QR factors
 * of their centered columns, and the top singular pair of the whitened
 * cross-covariance gives the weights. Both scores X b and Y a have unit
 * (weighted) variance and nonnegative correlation.
 *
 * Throws crq::Error naming the offending columns when a covariance block is
 * singular after constant columns are removed.
 */
CcaFit cca_leading(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                   const Eigen::VectorXd& weights = {});

}  // namespace crq
