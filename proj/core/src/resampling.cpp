#include "crq/resampling.hpp"

#include "crq/error.hpp"
#include "crq/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <string>

namespace crq {

std::size_t default_subsample_size(std::size_t n, double multiplier) {
    if (n < 2) throw Error("default_subsample_size: need n >= 2");
    return static_cast<std::size_t>(std::ceil(multiplier * std::log(static_cast<double>(n))));
}

ResamplePlan ResamplePlan::andrews(std::size_t n, std::uint64_t seed, std::size_t replications,
                                   double multiplier, std::size_t min_size) {
    ResamplePlan plan;
    plan.scheme = ResampleScheme::andrews;
    plan.replications = replications;
    plan.subset_size = std::max(default_subsample_size(n, multiplier), min_size);
    plan.seed = seed;
    return plan;
}

ResamplePlan ResamplePlan::jackknife(std::size_t n, std::uint64_t seed, std::size_t replications) {
    ResamplePlan plan;
    plan.scheme = ResampleScheme::jackknife;
    plan.replications = replications;
    plan.subset_size = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    plan.seed = seed;
    return plan;
}

void ResamplePlan::validate(std::size_t n) const {
    if (replications < 2) throw Error("resample plan: need at least 2 replications");
    if (subset_size < 1 || subset_size >= n)
        throw Error("resample plan: subset size " + std::to_string(subset_size) + " must lie in [1, n) with n = " +
                    std::to_string(n));
}

Rng draw_rng(std::uint64_t seed, std::size_t draw_index) {
    const auto idx = static_cast<std::uint64_t>(draw_index);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32), 0x63727175u};
    return Rng(seq);
}

namespace {

std::vector<std::size_t> pick_subset(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    std::sample(all.begin(), all.end(), std::back_inserter(chosen), k, rng);
    return chosen;
}

// Uniform on (0, 1]; keeps every weight strictly positive.
double open_uniform(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return 1.0 - u(rng);
}

}  // namespace

WeightVector andrews_weights(std::size_t n, std::size_t m, Rng& rng) {
    if (m < 1 || m >= n) throw Error("andrews_weights: need 1 <= m < n");
    const std::vector<std::size_t> subset = pick_subset(n, m, rng);
    WeightVector out;
    out.weights.resize(static_cast<Eigen::Index>(n));
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.weights(static_cast<Eigen::Index>(i)) = open_uniform(rng) * inv_n;
    for (std::size_t i : subset) {
        double w = 0.0;
        do {
            w = -std::log(open_uniform(rng));
        } while (!(w > 0.0));
        out.weights(static_cast<Eigen::Index>(i)) = w;
    }
    return out;
}

WeightVector jackknife_weights(std::size_t n, std::size_t d, Rng& rng) {
    if (d < 1 || d >= n) throw Error("jackknife_weights: need 1 <= d < n");
    const std::vector<std::size_t> deleted = pick_subset(n, d, rng);
    WeightVector out;
    out.weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i : deleted) out.weights(static_cast<Eigen::Index>(i)) = open_uniform(rng) * inv_n;
    return out;
}

InferenceResult resample_inference(const RefitFn& fit_fn, std::size_t n, const ResamplePlan& plan,
                                   unsigned threads) {
    plan.validate(n);

    InferenceResult out;
    WeightVector full{Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)), kFullSampleDraw};
    out.point = fit_fn(full);
    const Eigen::Index k = out.point.size();

    const std::size_t reps = plan.replications;
    std::vector<Eigen::VectorXd> results(reps);
    std::vector<char> ok(reps, 0);
    parallel_for(reps, threads, [&](std::size_t r) {
        Rng rng = draw_rng(plan.seed, r);
        WeightVector wv = plan.scheme == ResampleScheme::andrews ? andrews_weights(n, plan.subset_size, rng)
                                                                 : jackknife_weights(n, plan.subset_size, rng);
        wv.draw_index = r;
        try {
            Eigen::VectorXd est = fit_fn(wv);
            if (est.size() == k && est.allFinite()) {
                results[r] = std::move(est);
                ok[r] = 1;
            }
        } catch (const std::exception&) {
        }
    });

    for (std::size_t r = 0; r < reps; ++r) {
        if (ok[r]) out.draw_indices.push_back(r);
        else out.failed_draws.push_back(r);
    }
    if (out.failed_draws.size() * 10 > reps)
        throw Error("resample_inference: " + std::to_string(out.failed_draws.size()) + " of " +
                    std::to_string(reps) + " draws failed (limit 10%)");
    const auto used = static_cast<Eigen::Index>(out.draw_indices.size());
    if (used < 2) throw Error("resample_inference: fewer than two successful draws");

    out.draws.resize(used, k);
    for (Eigen::Index r = 0; r < used; ++r)
        out.draws.row(r) = results[out.draw_indices[static_cast<std::size_t>(r)]].transpose();

    const Eigen::RowVectorXd mean = out.draws.colwise().mean();
    const Eigen::RowVectorXd sumsq = (out.draws.rowwise() - mean).colwise().squaredNorm();
    const double nd = static_cast<double>(n);
    const double md = static_cast<double>(plan.subset_size);
    const double rd = static_cast<double>(used);

    Eigen::VectorXd var(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        if (!plan.se_rescale) {
            var(j) = sumsq(j) / (rd - 1.0);
        } else if (plan.scheme == ResampleScheme::andrews) {
            // Across draws the variance is sigma^2/m * (1 - m/n) from the subset
            // plus sigma^2/m from the unit-variance exponential weights.
            var(j) = sumsq(j) / (rd - 1.0) * (md / (2.0 * nd - md));
        } else {
            var(j) = (nd - md) / (md * rd) * sumsq(j);
        }
    }
    out.se = var.cwiseSqrt();
    out.t_stats = Eigen::VectorXd::Zero(k);
    out.t_defined.assign(static_cast<std::size_t>(k), false);
    for (Eigen::Index j = 0; j < k; ++j) {
        if (out.se(j) > 0.0) {
            out.t_stats(j) = out.point(j) / out.se(j);
            out.t_defined[static_cast<std::size_t>(j)] = true;
        }
    }
    return out;
}

}  // namespace crq
