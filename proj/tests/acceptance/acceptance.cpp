// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "crq/canonical.hpp"
#include "crq/pipeline.hpp"
#include "crq/quantile.hpp"
#include "crq/report.hpp"
#include "crq/resampling.hpp"
#include "crq/synthetic.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using crq::CanonicalProblem;
using crq::QuantileLevel;
using crq::RegressionProblem;
using crq::test::Rng;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// Best objective over alpha on the step-0.05 simplex grid, each alpha solved exactly in beta.
double alpha_grid_min(const CanonicalProblem& prob) {
    const auto q = prob.responses.cols();
    const int steps = 20;
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd alpha(q);
    std::function<void(Eigen::Index, int)> walk = [&](Eigen::Index j, int left) {
        if (j == q - 1) {
            alpha(j) = left / double(steps);
            RegressionProblem r{prob.design, prob.responses * alpha, prob.weights};
            best = std::min(best, crq::rq_fit(r, prob.tau.complement()).objective);
            return;
        }
        for (int k = 0; k <= left; ++k) {
            alpha(j) = k / double(steps);
            walk(j + 1, left - k);
        }
    };
    walk(0, steps);
    return best;
}

Outcome oracle_equivalence() {
    Rng rng(1001);
    const double taus[] = {0.25, 0.5, 0.75};
    double worst = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 200; ++i) {
        const int p = pick(rng, 1, 3);
        const int n = pick(rng, p + 1, 12);
        RegressionProblem prob;
        prob.design = crq::test::random_design(rng, n, p);
        prob.response = prob.design * crq::test::random_vector(rng, p) + crq::test::random_vector(rng, n);
        const QuantileLevel tau(taus[i % 3]);
        const double a = crq::rq_fit(prob, tau).objective;
        const double b = crq::rq_subset_oracle(prob, tau).objective;
        worst = std::max(worst, std::abs(a - b));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-8 && secs < 10.0, fmt("max |diff| %.3g, %.2f s", worst, secs)};
}

Outcome constrained_optimality() {
    Rng rng(1002);
    double worst_gap = -std::numeric_limits<double>::infinity();
    double worst_constraint = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 50; ++i) {
        const int p = pick(rng, 1, 3);
        const int q = pick(rng, 1, 3);
        CanonicalProblem prob;
        prob.design = crq::test::random_design(rng, 30, p);
        const Eigen::VectorXd common = prob.design * crq::test::random_vector(rng, p);
        prob.responses.resize(30, q);
        for (int j = 0; j < q; ++j) prob.responses.col(j) = common + crq::test::random_vector(rng, 30, 0.5 + j);
        prob.tau = QuantileLevel(i % 3 == 0 ? 0.25 : i % 3 == 1 ? 0.5 : 0.75);
        const auto fit = crq::canonical_rq_simplex(prob);
        worst_gap = std::max(worst_gap, fit.objective - alpha_grid_min(prob));
        worst_constraint = std::max({worst_constraint, std::abs(fit.alpha.sum() - 1.0), -fit.alpha.minCoeff()});
    }
    const double secs = seconds_since(t0);
    return {worst_gap <= 1e-8 && worst_constraint <= 1e-10 && secs < 30.0,
            fmt("max(fit - grid) %.3g, constraint violation %.3g", worst_gap, worst_constraint) +
                fmt(", %.2f s", secs)};
}

// Responses whose idiosyncratic parts cancel exactly at an interior alpha.
CanonicalProblem interior_instance(Rng& rng, int i) {
    const int n = 40;
    const int q = 2 + i % 2;
    CanonicalProblem prob;
    prob.design = crq::test::random_design(rng, n, 2);
    const Eigen::VectorXd target = prob.design * Eigen::Vector2d(1.0, 2.0) + crq::test::random_vector(rng, n, 0.1);
    std::uniform_real_distribution<double> share(0.2, 1.0);
    Eigen::VectorXd alpha(q);
    for (int j = 0; j < q; ++j) alpha(j) = share(rng);
    alpha /= alpha.sum();
    prob.responses.resize(n, q);
    Eigen::VectorXd balance = Eigen::VectorXd::Zero(n);
    for (int j = 0; j + 1 < q; ++j) {
        const Eigen::VectorXd e = crq::test::random_vector(rng, n, 3.0);
        prob.responses.col(j) = target + e;
        balance -= alpha(j) * e;
    }
    prob.responses.col(q - 1) = target + balance / alpha(q - 1);
    prob.tau = QuantileLevel(i % 4 == 0 ? 0.75 : 0.5);
    return prob;
}

Outcome reduction_consistency() {
    Rng rng(1003);
    double worst = 0.0;
    int interior = 0;
    for (int i = 0; i < 20; ++i) {
        const CanonicalProblem prob = interior_instance(rng, i);
        const auto sub = crq::substitution_fit(prob);
        const auto sx = crq::canonical_rq_simplex(prob);
        interior += sub.interior;
        worst = std::max(worst, std::abs(sub.fit.objective - sx.objective));
    }
    return {interior == 20 && worst <= 1e-8, fmt("%g/20 interior, max |diff| %.3g", interior, worst)};
}

Outcome equivariance() {
    Rng rng(1004);
    double worst = 0.0;
    double coef = 0.0;
    for (int i = 0; i < 20; ++i) {
        CanonicalProblem prob;
        const int p = pick(rng, 2, 3);
        const int q = pick(rng, 2, 3);
        prob.design = crq::test::random_design(rng, 30, p);
        const Eigen::VectorXd common = prob.design * crq::test::random_vector(rng, p);
        prob.responses.resize(30, q);
        for (int j = 0; j < q; ++j) prob.responses.col(j) = common + crq::test::random_vector(rng, 30, 0.5 + j);
        prob.tau = QuantileLevel(i % 2 ? 0.5 : 0.75);
        const auto base = crq::canonical_rq_simplex(prob);

        for (double c : {0.1, 10.0}) {
            CanonicalProblem scaled = prob;
            scaled.responses *= c;
            const auto fit = crq::canonical_rq_simplex(scaled);
            const double ratio = fit.objective / base.objective;
            // (alpha, c beta) from the base fit attains the scaled optimum, and vice versa.
            const double mapped = crq::canonical_objective(scaled, base.alpha, c * base.beta);
            const double back = crq::canonical_objective(prob, fit.alpha, fit.beta / c);
            worst = std::max({worst, std::abs(ratio - c) / c, std::abs(mapped - fit.objective) / fit.objective,
                              std::abs(back - base.objective) / base.objective});
            coef = std::max({coef, (fit.alpha - base.alpha).lpNorm<Eigen::Infinity>(),
                             (fit.beta / c - base.beta).lpNorm<Eigen::Infinity>() / base.beta.lpNorm<Eigen::Infinity>()});

            CanonicalProblem col = prob;
            const Eigen::Index k = p - 1;
            col.design.col(k) *= c;
            const auto cfit = crq::canonical_rq_simplex(col);
            Eigen::VectorXd beta = base.beta;
            beta(k) /= c;
            worst = std::max({worst, std::abs(cfit.objective - base.objective) / base.objective,
                              std::abs(crq::canonical_objective(col, base.alpha, beta) - cfit.objective) /
                                  cfit.objective});
            coef = std::max(coef, (cfit.beta - beta).lpNorm<Eigen::Infinity>() / beta.lpNorm<Eigen::Infinity>());
        }
    }
    return {worst <= 1e-8 && coef <= 1e-8,
            fmt("objective deviation %.3g, coefficient deviation %.3g", worst, coef)};
}

Outcome bootstrap_calibration() {
    const std::size_t n = 200;
    const double target = std::sqrt(M_PI / 2.0) / std::sqrt(double(n));
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1005);
    double total = 0.0;
    for (int outer = 0; outer < 20; ++outer) {
        const Eigen::VectorXd x = crq::test::random_vector(rng, n);
        const crq::RefitFn median = [&](const crq::WeightVector& w) {
            const std::span<const double> xs(x.data(), n);
            if (w.weights.size() == 0) return Eigen::VectorXd::Constant(1, crq::sample_quantile(xs, QuantileLevel(0.5)));
            const std::span<const double> ws(w.weights.data(), n);
            return Eigen::VectorXd::Constant(1, crq::sample_quantile(xs, QuantileLevel(0.5), ws));
        };
        crq::ResamplePlan plan;
        plan.scheme = crq::ResampleScheme::andrews;
        plan.replications = 500;
        plan.subset_size = 16;
        plan.seed = 5000 + static_cast<std::uint64_t>(outer);
        total += crq::resample_inference(median, n, plan).se(0);
    }
    const double mean = total / 20.0;
    const double secs = seconds_since(t0);
    return {std::abs(mean / target - 1.0) <= 0.3 && secs < 60.0,
            fmt("mean SE %.5f vs 0.0886 (ratio %.3f)", mean, mean / target) + fmt(", %.2f s", secs)};
}

struct SeedRun {
    std::vector<crq::WindowAnalysis> windows;
};

std::vector<SeedRun> seed_runs() {
    std::vector<SeedRun> out;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto panel = crq::gen_synthetic(crq::SyntheticSpec{}, seed);
        SeedRun run;
        for (const auto& spec : crq::evaluation_windows(panel, 5, 2))
            run.windows.push_back(crq::analyze_window(panel, spec, crq::AggregationConfig{}, QuantileLevel(0.5)));
        out.push_back(std::move(run));
    }
    return out;
}

Outcome recovery(const std::vector<SeedRun>& runs) {
    int ok = 0;
    double lowest = 1.0;
    for (const auto& r : runs) {
        bool seed_ok = true;
        for (const auto& w : r.windows) {
            lowest = std::min(lowest, w.fit.alpha(0));
            seed_ok = seed_ok && w.fit.alpha(0) >= 0.8;
        }
        ok += seed_ok;
    }
    return {ok >= 9, fmt("%g/10 seeds with logRev weight >= 0.8 (lowest %.3f)", ok, lowest)};
}

bool same_directory(const fs::path& a, const fs::path& b, std::string& why) {
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        ++files;
        const fs::path other = b / e.path().filename();
        if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
            why = e.path().filename().string() + " differs";
            return false;
        }
    }
    if (files != static_cast<std::size_t>(std::distance(fs::directory_iterator(b), fs::directory_iterator{}))) {
        why = "file sets differ";
        return false;
    }
    return true;
}

struct FullRun {
    std::vector<crq::PredictionReport> reports;
    double seconds = 0.0;
};

FullRun full_run(const fs::path& out, unsigned threads) {
    crq::RunConfig cfg;
    cfg.synthetic = crq::SyntheticSpec{};
    cfg.replications = 200;
    cfg.seed = 2024;
    cfg.output_dir = out;
    const auto t0 = std::chrono::steady_clock::now();
    FullRun r;
    r.reports = crq::run_analysis(cfg, threads);
    r.seconds = seconds_since(t0);
    return r;
}

Outcome index_beats_ceo(const std::vector<SeedRun>& runs, const FullRun& full) {
    int ok = 0;
    for (const auto& r : runs) {
        int wins = 0;
        for (std::size_t j = 0; j < crq::kResponseCount; ++j) {
            double index = 0.0;
            double ceo = 0.0;
            for (const auto& w : r.windows) {
                index += w.metrics[j][0].mae;
                ceo += w.metrics[j][2].mae;
            }
            wins += index < ceo;
        }
        ok += wins >= 4;
    }
    return {ok >= 8 && full.seconds < 120.0,
            fmt("%g/10 seeds with Index ahead on >= 4 responses, full R=200 run %.1f s", ok, full.seconds)};
}

Outcome metric_identities(const std::vector<SeedRun>& runs, const std::vector<const FullRun*>& full) {
    std::size_t checked = 0;
    std::size_t bad = 0;
    auto check = [&](double tau, double mae, double rmse, double rho) {
        ++checked;
        if (!(mae <= rmse) || (tau == 0.5 && rho != mae / 2.0)) ++bad;
    };
    for (const auto& r : runs)
        for (const auto& w : r.windows)
            for (const auto& row : w.metrics)
                for (const auto& m : row) check(0.5, m.mae, m.rmse, m.rho);
    for (const FullRun* f : full)
        for (const auto& rep : f->reports) {
            for (const auto& w : rep.windows) {
                for (const auto& row : w.analysis.metrics)
                    for (const auto& m : row) check(rep.tau, m.mae, m.rmse, m.rho);
                for (std::size_t j = 0; j < crq::kResponseCount; ++j)
                    for (std::size_t k = 0; k < crq::kPredictors.size(); ++k)
                        check(rep.tau, w.mae[j][k].value, w.rmse[j][k].value, w.rho[j][k].value);
            }
            for (std::size_t j = 0; j < crq::kResponseCount; ++j)
                for (std::size_t k = 0; k < crq::kPredictors.size(); ++k)
                    check(rep.tau, rep.pooled_mae[j][k].value, rep.pooled_rmse[j][k].value, rep.pooled_rho[j][k].value);
        }
    return {bad == 0 && checked > 0, fmt("%g evaluations, %g violations", double(checked), double(bad))};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* name, const Outcome& o) {
        std::printf("[%s] %d. %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    };

    report(1, "oracle equivalence", oracle_equivalence());
    report(2, "constrained solver optimality", constrained_optimality());
    report(3, "reduction consistency", reduction_consistency());
    report(4, "equivariance", equivariance());
    report(5, "bootstrap calibration", bootstrap_calibration());

    const auto runs = seed_runs();
    report(6, "end-to-end recovery", recovery(runs));

    const fs::path root = fs::temp_directory_path() / "crq_acceptance";
    fs::remove_all(root);
    const FullRun one = full_run(root / "threads1", 1);
    report(7, "index beats CEO pay", index_beats_ceo(runs, one));

    const FullRun four = full_run(root / "threads4", 4);
    report(8, "metric identities", metric_identities(runs, {&one, &four}));

    std::string why = "identical";
    const bool same = same_directory(root / "threads1", root / "threads4", why);
    report(9, "determinism", {same, why + " (threads 1 vs 4)"});
    fs::remove_all(root);

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
