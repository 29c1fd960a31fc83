#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace crq {

enum class ResampleScheme { andrews, jackknife };

/**
 * Resampling configuration. `subset_size` is the heavily weighted subsample
 * size m for the Andrews scheme and the delete count d for the jackknife.
 */
struct ResamplePlan {
    ResampleScheme scheme = ResampleScheme::andrews;
    std::size_t replications = 200;
    std::size_t subset_size = 0;
    std::uint64_t seed = 0;
    bool se_rescale = true;

    /// m = ceil(multiplier * ln n), raised to at least `min_size`.
    static ResamplePlan andrews(std::size_t n, std::uint64_t seed, std::size_t replications = 200,
                                double multiplier = 3.0, std::size_t min_size = 0);
    /// d = ceil(sqrt n).
    static ResamplePlan jackknife(std::size_t n, std::uint64_t seed, std::size_t replications = 200);

    void validate(std::size_t n) const;
};

/// Default subsample size ceil(multiplier * ln n).
std::size_t default_subsample_size(std::size_t n, double multiplier = 3.0);

struct WeightVector {
    Eigen::VectorXd weights;
    std::size_t draw_index = 0;
};

/// draw_index used for the full-sample (unit weight) evaluation.
inline constexpr std::size_t kFullSampleDraw = static_cast<std::size_t>(-1);

using Rng = std::mt19937_64;

/// Independent generator for one draw, derived from (seed, draw_index) only.
Rng draw_rng(std::uint64_t seed, std::size_t draw_index);

/// m random observations get Exponential(1) weights, the rest Uniform(0,1)/n.
WeightVector andrews_weights(std::size_t n, std::size_t m, Rng& rng);

/// d random observations get Uniform(0,1)/n weights, the rest weight 1.
WeightVector jackknife_weights(std::size_t n, std::size_t d, Rng& rng);

struct InferenceResult {
    Eigen::VectorXd point;
    Eigen::VectorXd se;
    Eigen::VectorXd t_stats;
    /// False where se == 0; the matching t_stats entry is reported as 0.
    std::vector<bool> t_defined;
    /// Successful replicate estimates, one row per draw, ordered by draw index.
    Eigen::MatrixXd draws;
    std::vector<std::size_t> draw_indices;
    std::vector<std::size_t> failed_draws;
};

using RefitFn = std::function<Eigen::VectorXd(const WeightVector&)>;

/**
 * Runs `plan.replications` weighted refits and summarizes them.
 *
 * The point estimate is fit_fn at unit weights. Standard errors are the
 * cross-draw standard deviation, times sqrt(m / (2n - m)) for the Andrews
 * scheme (subset sampling and exponential weighting each add about
 * sigma^2 / m of spread);
 * for the jackknife the variance is (n - d) / (d R) * sum (theta_r - mean)^2.
 * With se_rescale off both schemes report the raw standard deviation.
 *
 * fit_fn must be reentrant when threads > 1. Draws that throw are skipped and
 * recorded; more than 10% failures raise crq::Error. The result is identical
 * for any thread count.
 */
InferenceResult resample_inference(const RefitFn& fit_fn, std::size_t n, const ResamplePlan& plan,
                                   unsigned threads = 1);

}  // namespace crq
