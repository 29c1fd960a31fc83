#include "crq/canonical.hpp"

#include "crq/error.hpp"
#include "crq/lp.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace crq {

Eigen::VectorXd CanonicalProblem::effective_weights() const {
    if (weights.size() == 0) return Eigen::VectorXd::Ones(design.rows());
    return weights;
}

std::vector<std::string> CanonicalProblem::validate() const {
    const Eigen::Index n = design.rows();
    const Eigen::Index p = design.cols();
    const Eigen::Index q = responses.cols();
    if (n < 1 || p < 1) throw Error("canonical problem: empty design");
    if (q < 1) throw Error("canonical problem: need at least one response column");
    if (responses.rows() != n) throw Error("canonical problem: response rows differ from design rows");
    if (weights.size() != 0 && weights.size() != n) throw Error("canonical problem: weight length differs from rows");
    if (!design.allFinite() || !responses.allFinite()) throw Error("canonical problem: non-finite data");
    if (weights.size() != 0 && (!weights.allFinite() || weights.minCoeff() < 0.0))
        throw Error("canonical problem: weights must be finite and nonnegative");
    for (Eigen::Index j = 0; j < q; ++j)
        if (responses.col(j).cwiseAbs().maxCoeff() == 0.0)
            throw Error("canonical problem: response column " + std::to_string(j) + " is identically zero");

    std::vector<std::string> warnings;
    if (n <= p + q)
        warnings.push_back("n = " + std::to_string(n) + " does not exceed p + q = " + std::to_string(p + q) +
                           "; coefficients are weakly identified");
    return warnings;
}

double canonical_objective(const CanonicalProblem& problem, const Eigen::VectorXd& alpha,
                           const Eigen::VectorXd& beta) {
    if (alpha.size() != problem.responses.cols() || beta.size() != problem.design.cols())
        throw Error("canonical_objective: coefficient dimensions do not match the problem");
    const Eigen::VectorXd w = problem.effective_weights();
    const Eigen::VectorXd r = problem.design * beta - problem.responses * alpha;
    double total = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (w(i) < kZeroWeight) continue;
        total += w(i) * check_loss(r(i), problem.tau);
    }
    return total;
}

namespace {

// Project tiny negative solver noise back onto the simplex.
void clean_simplex(Eigen::VectorXd& alpha) {
    for (Eigen::Index j = 0; j < alpha.size(); ++j)
        if (alpha(j) < 0.0) alpha(j) = 0.0;
    const double s = alpha.sum();
    if (s > 0.0) alpha /= s;
}

}  // namespace

CanonicalFit canonical_rq_simplex(const CanonicalProblem& problem) {
    CanonicalFit fit;
    fit.warnings = problem.validate();
    fit.constraint_kind = ConstraintKind::simplex;

    const Eigen::VectorXd w = problem.effective_weights();
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w(i) >= kZeroWeight) rows.push_back(i);

    const Eigen::Index p = problem.design.cols();
    const Eigen::Index q = problem.responses.cols();
    const auto n = static_cast<Eigen::Index>(rows.size());

    Eigen::MatrixXd x(n, p);
    Eigen::MatrixXd y(n, q);
    for (Eigen::Index r = 0; r < n; ++r) {
        x.row(r) = problem.design.row(rows[static_cast<std::size_t>(r)]);
        y.row(r) = problem.responses.row(rows[static_cast<std::size_t>(r)]);
    }
    if (n < p || Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(x).rank() < p)
        throw Error("canonical_rq_simplex: degenerate design, positively weighted rows of X are rank deficient");

    // Variables: [beta (free, p) | alpha (q) | u+ (n) | u- (n)].
    // Rows 0..n-1: x_i' beta - y_i' alpha - u_i+ + u_i- = 0; row n: sum alpha = 1.
    const Eigen::Index k = p + q + 2 * n;
    lp::Problem lp;
    lp.constraints = Eigen::MatrixXd::Zero(n + 1, k);
    lp.constraints.topLeftCorner(n, p) = x;
    lp.constraints.block(0, p, n, q) = -y;
    lp.constraints.block(0, p + q, n, n) = -Eigen::MatrixXd::Identity(n, n);
    lp.constraints.block(0, p + q + n, n, n).setIdentity();
    lp.constraints.block(n, p, 1, q).setOnes();
    lp.rhs = Eigen::VectorXd::Zero(n + 1);
    lp.rhs(n) = 1.0;
    lp.cost = Eigen::VectorXd::Zero(k);
    const double tau = problem.tau.value();
    for (Eigen::Index r = 0; r < n; ++r) {
        const double wi = w(rows[static_cast<std::size_t>(r)]);
        lp.cost(p + q + r) = wi * tau;
        lp.cost(p + q + n + r) = wi * (1.0 - tau);
    }
    lp.free.assign(static_cast<std::size_t>(k), false);
    for (Eigen::Index j = 0; j < p; ++j) lp.free[static_cast<std::size_t>(j)] = true;
    // Start from beta = 0, alpha = e_1; the residual -y_i1 sits in u_i+ or u_i-.
    for (Eigen::Index r = 0; r < n; ++r) lp.start_basis.push_back(y(r, 0) <= 0.0 ? p + q + r : p + q + n + r);
    lp.start_basis.push_back(p);

    const lp::Solution sol = lp::solve(lp);
    switch (sol.status) {
        case lp::Status::optimal: break;
        case lp::Status::infeasible: throw Error("canonical_rq_simplex: linear program infeasible");
        case lp::Status::unbounded: throw Error("canonical_rq_simplex: linear program unbounded");
        case lp::Status::iteration_limit: throw Error("canonical_rq_simplex: simplex iteration limit reached");
    }

    fit.alpha = sol.x.segment(p, q);
    clean_simplex(fit.alpha);
    fit.beta = sol.x.head(p);
    fit.objective = canonical_objective(problem, fit.alpha, fit.beta);
    return fit;
}

CanonicalFit canonical_rq_l1(const CanonicalProblem& problem) {
    const Eigen::Index q = problem.responses.cols();
    if (q > kMaxOrthantResponses)
        throw Error("orthant enumeration limit: q = " + std::to_string(q) + " exceeds " +
                    std::to_string(kMaxOrthantResponses));
    problem.validate();

    CanonicalFit best;
    best.objective = std::numeric_limits<double>::infinity();
    const std::uint32_t orthants = 1u << static_cast<std::uint32_t>(q);
    for (std::uint32_t mask = 0; mask < orthants; ++mask) {
        Eigen::VectorXd sign(q);
        for (Eigen::Index j = 0; j < q; ++j) sign(j) = (mask >> j) & 1u ? -1.0 : 1.0;

        CanonicalProblem flipped = problem;
        flipped.responses = problem.responses * sign.asDiagonal();
        CanonicalFit f = canonical_rq_simplex(flipped);

        const double improve_tol = 1e-12 * std::max(1.0, std::abs(best.objective));
        if (mask == 0 || f.objective < best.objective - improve_tol) {
            best = std::move(f);
            best.alpha = best.alpha.cwiseProduct(sign);
        }
    }
    best.constraint_kind = ConstraintKind::l1_sign;
    best.objective = canonical_objective(problem, best.alpha, best.beta);
    return best;
}

SubstitutionResult substitution_fit(const CanonicalProblem& problem) {
    const Eigen::Index q = problem.responses.cols();
    if (q < 2) throw Error("substitution_fit: needs at least two responses");
    std::vector<std::string> warnings = problem.validate();

    const Eigen::Index n = problem.design.rows();
    const Eigen::Index p = problem.design.cols();
    RegressionProblem reduced;
    reduced.design.resize(n, p + q - 1);
    reduced.design.leftCols(p) = problem.design;
    for (Eigen::Index j = 1; j < q; ++j)
        reduced.design.col(p + j - 1) = problem.responses.col(j) - problem.responses.col(0);
    reduced.response = problem.responses.col(0);
    reduced.weights = problem.weights;

    // x'b - y'a = -(y_1 - x'b - sum_{j>=2} (-a_j)(y_j - y_1)), and
    // rho_tau(-u) = rho_{1-tau}(u).
    const RqSolution rq = rq_fit(reduced, problem.tau.complement());

    SubstitutionResult out;
    out.fit.constraint_kind = ConstraintKind::simplex;
    out.fit.warnings = std::move(warnings);
    out.fit.beta = rq.coefficients.head(p);
    out.fit.alpha.resize(q);
    double rest = 0.0;
    for (Eigen::Index j = 1; j < q; ++j) {
        out.fit.alpha(j) = -rq.coefficients(p + j - 1);
        rest += out.fit.alpha(j);
    }
    out.fit.alpha(0) = 1.0 - rest;
    out.fit.objective = canonical_objective(problem, out.fit.alpha, out.fit.beta);
    out.interior = (out.fit.alpha.array() > 0.0).all();
    if (!out.interior) out.fit.warnings.emplace_back("interior condition failed");
    return out;
}

Eigen::VectorXd make_index(const Eigen::MatrixXd& x_new, const Eigen::VectorXd& coefficients) {
    if (x_new.cols() != coefficients.size())
        throw Error("make_index: matrix has " + std::to_string(x_new.cols()) + " columns but " +
                    std::to_string(coefficients.size()) + " coefficients were given");
    return x_new * coefficients;
}

}  // namespace crq
