#include "crq/quantile.hpp"

#include "crq/error.hpp"
#include "crq/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace crq {

QuantileLevel::QuantileLevel(double tau) : tau_(tau) {
    if (!(tau > 0.0 && tau < 1.0))
        throw Error("quantile level must lie in (0, 1), got " + std::to_string(tau));
}

double check_loss(double u, QuantileLevel tau) noexcept {
    return u >= 0.0 ? u * tau.value() : u * (tau.value() - 1.0);
}

double sample_quantile(std::span<const double> values, QuantileLevel tau,
                       std::span<const double> weights) {
    if (values.empty()) throw Error("empty sample");
    if (!weights.empty() && weights.size() != values.size())
        throw Error("sample_quantile: weights and values differ in length");

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    auto weight_of = [&](std::size_t i) {
        if (weights.empty()) return 1.0;
        const double w = weights[i];
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error("sample_quantile: weights must be finite and nonnegative");
        return w < kZeroWeight ? 0.0 : w;
    };

    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) total += weight_of(i);
    if (!(total > 0.0)) throw Error("sample_quantile: total weight must be positive");

    // The right derivative at x_(k) is W_k - tau W; the first k where it turns
    // nonnegative is the smallest minimizer.
    const double threshold = tau.value() * total * (1.0 - 1e-12);
    double cumulative = 0.0;
    for (std::size_t k : order) {
        const double w = weight_of(k);
        if (w == 0.0) continue;
        cumulative += w;
        if (cumulative >= threshold) return values[k];
    }
    return values[order.back()];
}

Eigen::VectorXd RegressionProblem::effective_weights() const {
    if (weights.size() == 0) return Eigen::VectorXd::Ones(design.rows());
    return weights;
}

void RegressionProblem::validate() const {
    if (design.rows() < 1 || design.cols() < 1) throw Error("regression problem needs n >= 1 and p >= 1");
    if (response.size() != design.rows()) throw Error("regression problem: response length differs from design rows");
    if (weights.size() != 0 && weights.size() != design.rows())
        throw Error("regression problem: weight length differs from design rows");
    if (!design.allFinite() || !response.allFinite()) throw Error("regression problem: non-finite data");
    if (weights.size() != 0 && (!weights.allFinite() || weights.minCoeff() < 0.0))
        throw Error("regression problem: weights must be finite and nonnegative");
}

double rq_objective(const RegressionProblem& problem, const Eigen::VectorXd& coefficients,
                    QuantileLevel tau) {
    if (coefficients.size() != problem.design.cols())
        throw Error("rq_objective: coefficient length " + std::to_string(coefficients.size()) +
                    " does not match design columns " + std::to_string(problem.design.cols()));
    if (problem.response.size() != problem.design.rows())
        throw Error("rq_objective: response length differs from design rows");
    const Eigen::VectorXd w = problem.effective_weights();
    const Eigen::VectorXd resid = problem.response - problem.design * coefficients;
    double total = 0.0;
    for (Eigen::Index i = 0; i < resid.size(); ++i) {
        if (w(i) < kZeroWeight) continue;
        total += w(i) * check_loss(resid(i), tau);
    }
    return total;
}

std::vector<Eigen::Index> active_rows(const RegressionProblem& problem,
                                      const Eigen::VectorXd& coefficients) {
    const Eigen::VectorXd fit = problem.design * coefficients;
    const double scale = 1.0 + problem.response.cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < fit.size(); ++i)
        if (std::abs(problem.response(i) - fit(i)) <= 1e-9 * scale) rows.push_back(i);
    return rows;
}

namespace {

std::vector<Eigen::Index> positive_rows(const Eigen::VectorXd& w) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w(i) >= kZeroWeight) rows.push_back(i);
    return rows;
}

}  // namespace

RqSolution rq_fit(const RegressionProblem& problem, QuantileLevel tau) {
    problem.validate();
    const Eigen::VectorXd w = problem.effective_weights();
    const std::vector<Eigen::Index> rows = positive_rows(w);
    const Eigen::Index p = problem.parameters();
    const auto n = static_cast<Eigen::Index>(rows.size());

    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        x.row(r) = problem.design.row(rows[static_cast<std::size_t>(r)]);
        y(r) = problem.response(rows[static_cast<std::size_t>(r)]);
    }
    if (n < p || Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(x).rank() < p)
        throw Error("unbounded/degenerate design: positively weighted rows do not have full column rank");

    // Variables: [b (free, p) | u+ (n) | u- (n)].
    lp::Problem lp;
    lp.constraints = Eigen::MatrixXd::Zero(n, p + 2 * n);
    lp.constraints.leftCols(p) = x;
    lp.constraints.middleCols(p, n).setIdentity();
    lp.constraints.rightCols(n) = -Eigen::MatrixXd::Identity(n, n);
    lp.rhs = y;
    lp.cost = Eigen::VectorXd::Zero(p + 2 * n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const double wi = w(rows[static_cast<std::size_t>(r)]);
        lp.cost(p + r) = wi * tau.value();
        lp.cost(p + n + r) = wi * (1.0 - tau.value());
    }
    lp.free.assign(static_cast<std::size_t>(p + 2 * n), false);
    for (Eigen::Index j = 0; j < p; ++j) lp.free[static_cast<std::size_t>(j)] = true;
    // Start from b = 0 with each residual carried by its slack.
    for (Eigen::Index r = 0; r < n; ++r) lp.start_basis.push_back(y(r) >= 0.0 ? p + r : p + n + r);

    const lp::Solution sol = lp::solve(lp);
    if (sol.status != lp::Status::optimal)
        throw Error("rq_fit: linear program did not reach optimality");

    RqSolution out;
    out.coefficients = sol.x.head(p);
    out.objective = rq_objective(problem, out.coefficients, tau);
    out.active_rows = active_rows(problem, out.coefficients);
    return out;
}

RqSolution rq_subset_oracle(const RegressionProblem& problem, QuantileLevel tau) {
    problem.validate();
    const Eigen::Index n = problem.observations();
    const Eigen::Index p = problem.parameters();
    if (n > 15 || p > 4) throw Error("rq_subset_oracle: combinatorial guard (n <= 15, p <= 4) exceeded");
    if (n < p) throw Error("rq_subset_oracle: fewer rows than parameters");

    RqSolution best;
    best.objective = std::numeric_limits<double>::infinity();
    bool found = false;

    // Lexicographic p-subsets via a selection mask.
    std::vector<bool> mask(static_cast<std::size_t>(n), false);
    std::fill(mask.begin(), mask.begin() + p, true);
    Eigen::MatrixXd a(p, p);
    Eigen::VectorXd rhs(p);
    do {
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!mask[static_cast<std::size_t>(i)]) continue;
            a.row(r) = problem.design.row(i);
            rhs(r) = problem.response(i);
            ++r;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (!lu.isInvertible()) continue;
        const Eigen::VectorXd b = lu.solve(rhs);
        const double obj = rq_objective(problem, b, tau);
        if (obj < best.objective) {
            best.coefficients = b;
            best.objective = obj;
            found = true;
        }
    } while (std::prev_permutation(mask.begin(), mask.end()));

    if (!found) throw Error("rq_subset_oracle: every p-subset is singular");
    best.active_rows = active_rows(problem, best.coefficients);
    return best;
}

}  // namespace crq
