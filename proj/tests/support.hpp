#pragma once

// Shared generators and independent reference computations for the tests.

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace crq::test {

using Rng = std::mt19937_64;

inline Eigen::MatrixXd random_design(Rng& rng, Eigen::Index n, Eigen::Index p, bool intercept = true) {
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = (intercept && j == 0) ? 1.0 : z(rng);
    return x;
}

inline Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n, double scale = 1.0) {
    std::normal_distribution<double> z(0.0, scale);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = z(rng);
    return v;
}

inline Eigen::VectorXd random_weights(Rng& rng, Eigen::Index n) {
    std::uniform_real_distribution<double> u(0.2, 2.0);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = u(rng);
    return w;
}

/// Direct sum of check losses, written independently of the library.
inline double reference_check_sum(const Eigen::VectorXd& resid, double tau, const Eigen::VectorXd& w) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < resid.size(); ++i) {
        const double u = resid(i);
        s += w(i) * (u >= 0 ? tau * u : (tau - 1.0) * u);
    }
    return s;
}

}  // namespace crq::test
