#include "crq/canonical.hpp"
#include "crq/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using crq::CanonicalProblem;
using crq::QuantileLevel;
using crq::RegressionProblem;
using crq::test::Rng;

namespace {

CanonicalProblem random_problem(Rng& rng, Eigen::Index n, Eigen::Index p, Eigen::Index q, double tau) {
    CanonicalProblem prob;
    prob.design = crq::test::random_design(rng, n, p);
    prob.responses.resize(n, q);
    const Eigen::VectorXd common = prob.design * crq::test::random_vector(rng, p);
    for (Eigen::Index j = 0; j < q; ++j) prob.responses.col(j) = common + crq::test::random_vector(rng, n, 0.5 + j);
    prob.tau = QuantileLevel(tau);
    return prob;
}

// Best rq objective of the mixed response Y alpha at level 1 - tau.
double rq_at_alpha(const CanonicalProblem& prob, const Eigen::VectorXd& alpha) {
    RegressionProblem r;
    r.design = prob.design;
    r.response = prob.responses * alpha;
    r.weights = prob.weights;
    return crq::rq_fit(r, prob.tau.complement()).objective;
}

void check_simplex(const crq::CanonicalFit& fit) {
    CHECK(std::abs(fit.alpha.sum() - 1.0) <= 1e-10);
    CHECK(fit.alpha.minCoeff() >= -1e-10);
}

}  // namespace

TEST_CASE("canonical objective uses fit minus response") {
    CanonicalProblem prob;
    prob.design = Eigen::MatrixXd::Ones(2, 1);
    prob.responses = Eigen::MatrixXd::Zero(2, 1);
    prob.responses(0, 0) = 1.0;
    prob.tau = QuantileLevel(0.75);
    // residuals x'b - y'a = {-1, 0} at b = 0, a = 1
    CHECK(crq::canonical_objective(prob, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1)) == doctest::Approx(0.25));
    CHECK_THROWS_AS(crq::canonical_objective(prob, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(1)), crq::Error);
}

TEST_CASE("single response reduces to rq at the complementary level") {
    Rng rng(21);
    for (double tau : {0.25, 0.5, 0.75}) {
        const CanonicalProblem prob = random_problem(rng, 25, 3, 1, tau);
        const auto fit = crq::canonical_rq_simplex(prob);
        CHECK(fit.alpha(0) == doctest::Approx(1.0));
        CHECK(std::abs(fit.objective - rq_at_alpha(prob, Eigen::VectorXd::Ones(1))) <= 1e-8);
    }
}

TEST_CASE("duplicated response column matches the single-column objective") {
    Rng rng(22);
    CanonicalProblem prob = random_problem(rng, 20, 2, 1, 0.5);
    CanonicalProblem dup = prob;
    dup.responses.resize(20, 2);
    dup.responses.col(0) = prob.responses.col(0);
    dup.responses.col(1) = prob.responses.col(0);
    const auto a = crq::canonical_rq_simplex(prob);
    const auto b = crq::canonical_rq_simplex(dup);
    CHECK(std::abs(a.objective - b.objective) <= 1e-8);
    check_simplex(b);
    // Deterministic tie-break: the same input gives the same vertex.
    const auto again = crq::canonical_rq_simplex(dup);
    CHECK(again.alpha == b.alpha);
    CHECK(again.beta == b.beta);
}

TEST_CASE("simplex fit is no worse than the alpha grid") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const CanonicalProblem prob = random_problem(rng, 30, 2, 2, trial % 2 ? 0.75 : 0.5);
        const auto fit = crq::canonical_rq_simplex(prob);
        check_simplex(fit);
        double grid = INFINITY;
        for (int k = 0; k <= 20; ++k) {
            const double a = 0.05 * k;
            grid = std::min(grid, rq_at_alpha(prob, Eigen::Vector2d(a, 1.0 - a)));
        }
        CHECK(fit.objective <= grid + 1e-8);
        CHECK(std::abs(fit.objective - crq::canonical_objective(prob, fit.alpha, fit.beta)) <= 1e-10);
    }
}

TEST_CASE("simplex fit dominates random feasible probes") {
    Rng rng(24);
    std::gamma_distribution<double> g(1.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        const CanonicalProblem prob = random_problem(rng, 30, 3, 3, 0.5);
        const auto fit = crq::canonical_rq_simplex(prob);
        for (int k = 0; k < 10; ++k) {
            Eigen::Vector3d a(g(rng), g(rng), g(rng));
            a /= a.sum();
            CHECK(fit.objective <= rq_at_alpha(prob, a) + 1e-8);
        }
    }
}

TEST_CASE("canonical equivariance") {
    Rng rng(25);
    for (int trial = 0; trial < 6; ++trial) {
        const CanonicalProblem prob = random_problem(rng, 30, 3, 3, 0.75);
        const auto base = crq::canonical_rq_simplex(prob);
        for (double c : {0.1, 10.0}) {
            CanonicalProblem scaled = prob;
            scaled.responses *= c;
            const auto s = crq::canonical_rq_simplex(scaled);
            CHECK(s.objective / base.objective == doctest::Approx(c).epsilon(1e-8));
            CHECK(crq::canonical_objective(scaled, base.alpha, c * base.beta) ==
                  doctest::Approx(s.objective).epsilon(1e-8));

            CanonicalProblem col = prob;
            col.design.col(1) *= c;
            const auto cs = crq::canonical_rq_simplex(col);
            CHECK(cs.objective == doctest::Approx(base.objective).epsilon(1e-8));
            Eigen::VectorXd mapped = base.beta;
            mapped(1) /= c;
            CHECK(crq::canonical_objective(col, base.alpha, mapped) == doctest::Approx(cs.objective).epsilon(1e-8));
        }
    }
}

TEST_CASE("weights enter the canonical objective") {
    Rng rng(26);
    CanonicalProblem prob = random_problem(rng, 25, 2, 2, 0.5);
    const auto base = crq::canonical_rq_simplex(prob);
    prob.weights = Eigen::VectorXd::Constant(25, 2.0);
    const auto doubled = crq::canonical_rq_simplex(prob);
    CHECK(doubled.objective == doctest::Approx(2.0 * base.objective).epsilon(1e-9));
}

TEST_CASE("l1 variant") {
    Rng rng(27);
    SUBCASE("single response picks the better sign") {
        CanonicalProblem prob = random_problem(rng, 20, 2, 1, 0.75);
        prob.responses.array() += 3.0;
        const auto fit = crq::canonical_rq_l1(prob);
        CHECK(std::abs(std::abs(fit.alpha(0)) - 1.0) <= 1e-10);
        const double plus = crq::canonical_rq_simplex(prob).objective;
        CanonicalProblem neg = prob;
        neg.responses = -prob.responses;
        const double minus = crq::canonical_rq_simplex(neg).objective;
        CHECK(std::abs(fit.objective - std::min(plus, minus)) <= 1e-8);
        CHECK(fit.constraint_kind == crq::ConstraintKind::l1_sign);
    }
    SUBCASE("bounded by the simplex fit") {
        for (int trial = 0; trial < 5; ++trial) {
            const CanonicalProblem prob = random_problem(rng, 25, 2, 3, 0.5);
            const auto l1 = crq::canonical_rq_l1(prob);
            const auto sx = crq::canonical_rq_simplex(prob);
            CHECK(l1.objective <= sx.objective + 1e-10);
            CHECK(std::abs(l1.alpha.cwiseAbs().sum() - 1.0) <= 1e-10);
        }
    }
    SUBCASE("negating a column flips its coefficient") {
        const CanonicalProblem prob = random_problem(rng, 25, 2, 2, 0.5);
        CanonicalProblem neg = prob;
        neg.responses.col(1) *= -1.0;
        const auto a = crq::canonical_rq_l1(prob);
        const auto b = crq::canonical_rq_l1(neg);
        CHECK(std::abs(a.objective - b.objective) <= 1e-8);
        Eigen::VectorXd mapped = b.alpha;
        mapped(1) = -mapped(1);
        CHECK(crq::canonical_objective(prob, mapped, b.beta) == doctest::Approx(a.objective).epsilon(1e-8));
    }
    SUBCASE("positive orthant agrees with the simplex fit") {
        CanonicalProblem prob = random_problem(rng, 25, 2, 2, 0.5);
        prob.responses.array() += 10.0;
        const auto l1 = crq::canonical_rq_l1(prob);
        if ((l1.alpha.array() >= 0.0).all())
            CHECK(std::abs(l1.objective - crq::canonical_rq_simplex(prob).objective) <= 1e-8);
    }
    SUBCASE("orthant limit") {
        CanonicalProblem prob = random_problem(rng, 20, 1, 13, 0.5);
        CHECK_THROWS_WITH_AS(crq::canonical_rq_l1(prob), doctest::Contains("orthant enumeration limit"), crq::Error);
    }
}

TEST_CASE("substitution reduction") {
    Rng rng(28);
    SUBCASE("interior instances agree with the constrained solver") {
        int interior = 0;
        for (int trial = 0; trial < 10; ++trial) {
            CanonicalProblem prob;
            prob.design = crq::test::random_design(rng, 40, 2);
            const Eigen::VectorXd signal = prob.design * Eigen::Vector2d(1.0, 2.0);
            prob.responses.resize(40, 2);
            prob.responses.col(0) = signal + crq::test::random_vector(rng, 40, 1.0);
            prob.responses.col(1) = signal + crq::test::random_vector(rng, 40, 1.0);
            prob.tau = QuantileLevel(trial % 2 ? 0.5 : 0.75);
            const auto sub = crq::substitution_fit(prob);
            const auto sx = crq::canonical_rq_simplex(prob);
            if (!sub.interior) continue;
            ++interior;
            CHECK(std::abs(sub.fit.objective - sx.objective) <= 1e-8);
            CHECK(std::abs(sub.fit.alpha.sum() - 1.0) <= 1e-10);
        }
        CHECK(interior >= 5);
    }
    SUBCASE("noisy second response is flagged or near zero") {
        CanonicalProblem prob;
        prob.design = crq::test::random_design(rng, 60, 2);
        prob.responses.resize(60, 2);
        prob.responses.col(0) = prob.design * Eigen::Vector2d(1.0, 1.0) + crq::test::random_vector(rng, 60, 0.05);
        prob.responses.col(1) = prob.responses.col(0) + crq::test::random_vector(rng, 60, 20.0);
        const auto sub = crq::substitution_fit(prob);
        CHECK((!sub.interior || sub.fit.alpha(1) < 0.05));
        if (!sub.interior)
            CHECK(std::find(sub.fit.warnings.begin(), sub.fit.warnings.end(), "interior condition failed") !=
                  sub.fit.warnings.end());
    }
    SUBCASE("needs two responses") {
        const CanonicalProblem prob = random_problem(rng, 10, 2, 1, 0.5);
        CHECK_THROWS_AS(crq::substitution_fit(prob), crq::Error);
    }
}

TEST_CASE("problem validation") {
    Rng rng(29);
    CanonicalProblem prob = random_problem(rng, 10, 2, 2, 0.5);
    prob.responses.col(1).setZero();
    CHECK_THROWS_WITH_AS(crq::canonical_rq_simplex(prob), doctest::Contains("identically zero"), crq::Error);

    CanonicalProblem small = random_problem(rng, 4, 2, 2, 0.5);
    const auto fit = crq::canonical_rq_simplex(small);
    CHECK_FALSE(fit.warnings.empty());

    CanonicalProblem mismatch = random_problem(rng, 10, 2, 2, 0.5);
    mismatch.responses.conservativeResize(9, 2);
    CHECK_THROWS_AS(crq::canonical_rq_simplex(mismatch), crq::Error);

    CanonicalProblem degenerate = random_problem(rng, 10, 2, 2, 0.5);
    degenerate.design.col(1) = degenerate.design.col(0);
    CHECK_THROWS_AS(crq::canonical_rq_simplex(degenerate), crq::Error);
}

TEST_CASE("make_index") {
    Eigen::MatrixXd x(2, 2);
    x << 1, 2,
         3, 4;
    CHECK(crq::make_index(x, Eigen::Vector2d(1, 1)) == Eigen::Vector2d(3, 7));
    CHECK(crq::make_index(x, Eigen::Vector2d(0, 1)) == x.col(1));
    CHECK(crq::make_index(x, Eigen::Vector2d::Zero()).isZero());
    CHECK_THROWS_AS(crq::make_index(x, Eigen::Vector3d::Ones()), crq::Error);
}
