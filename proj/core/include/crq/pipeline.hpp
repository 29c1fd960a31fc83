#pragma once

#include "crq/canonical.hpp"
#include "crq/cca.hpp"
#include "crq/design.hpp"
#include "crq/panel.hpp"
#include "crq/quantile.hpp"
#include "crq/resampling.hpp"

#include <Eigen/Dense>

#include <array>
#include <string_view>
#include <vector>

namespace crq {

/**
 * A rolling-window experiment. The index is estimated on the training window
 * against responses `horizon` years after its last year, then applied to the
 * apply window to predict responses `horizon` years after that.
 */
struct WindowSpec {
    int train_start_year = 0;
    int window_length = 5;
    int horizon = 2;
    int apply_start_year = 0;

    /// Apply window starts `horizon` years after the training window.
    static WindowSpec standard(int train_start_year, int window_length = 5, int horizon = 2);

    YearRange train_window() const noexcept { return {train_start_year, train_start_year + window_length - 1}; }
    int train_target_year() const noexcept { return train_start_year + window_length - 1 + horizon; }
    YearRange apply_window() const noexcept { return {apply_start_year, apply_start_year + window_length - 1}; }
    int apply_target_year() const noexcept { return apply_start_year + window_length - 1 + horizon; }

    void validate(const PanelDataset& panel) const;
};

enum class Predictor { index_rq, cca_ls, ceo_rq, ceo_ls };
inline constexpr std::array<Predictor, 4> kPredictors = {Predictor::index_rq, Predictor::cca_ls, Predictor::ceo_rq,
                                                         Predictor::ceo_ls};
std::string_view predictor_key(Predictor p) noexcept;

/// Canonical regression quantile of the target-year responses on the training design.
CanonicalFit fit_window(const PanelDataset& panel, const WindowSpec& spec, const AggregationConfig& config,
                        QuantileLevel tau, const Eigen::VectorXd& weights = {});

/// Intercept and slope of a one-predictor regression.
struct Line {
    double intercept = 0.0;
    double slope = 0.0;
    double at(double x) const noexcept { return intercept + slope * x; }
};

/// Quantile regression of y on [1, x]; a constant x gives the intercept-only fit.
Line quantile_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y, QuantileLevel tau,
                   const Eigen::VectorXd& weights = {});
/// Least squares of y on [1, x]; a constant x gives the (weighted) mean.
Line least_squares_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& weights = {});

struct AheadPrediction {
    int target_year = 0;
    Eigen::VectorXd index;           ///< predictive index X*(apply) beta
    Eigen::VectorXd response_index;  ///< alpha' Y at the target year
    Eigen::MatrixXd observed;        ///< n x 5 transformed responses at the target year
    Eigen::MatrixXd predicted;       ///< n x 5 fitted values
    std::array<Line, kResponseCount> lines{};
};

/// Applies the fitted index to the apply window and predicts each response by quantile regression on it.
AheadPrediction predict_ahead(const PanelDataset& panel, const CanonicalFit& fit, const WindowSpec& spec,
                              const AggregationConfig& config, QuantileLevel tau,
                              const Eigen::VectorXd& weights = {});

struct BaselinePrediction {
    CcaFit cca;
    Eigen::VectorXd cca_index;  ///< X*(apply) b
    Eigen::VectorXd ceo;        ///< CEO pay predictor on the apply window
    Eigen::MatrixXd cca_ls;
    Eigen::MatrixXd ceo_rq;
    Eigen::MatrixXd ceo_ls;
    std::array<Line, kResponseCount> cca_lines{};
    std::array<Line, kResponseCount> ceo_rq_lines{};
    std::array<Line, kResponseCount> ceo_ls_lines{};
};

/// CEO pay column for the apply window according to config.ceo_source.
Eigen::VectorXd ceo_predictor(const PanelDataset& panel, YearRange window, const AggregationConfig& config);

/// Classical canonical correlation index with least squares, and CEO pay with quantile and least squares.
BaselinePrediction predict_baselines(const PanelDataset& panel, const WindowSpec& spec,
                                     const AggregationConfig& config, QuantileLevel tau,
                                     const Eigen::VectorXd& weights = {});

struct Metrics {
    double mae = 0.0;
    double rmse = 0.0;
    double rho = 0.0;  ///< mean check loss at tau
};

/// Errors are observed - predicted. Weighted means when weights are given.
Metrics evaluate(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed, QuantileLevel tau,
                 const Eigen::VectorXd& weights = {});

struct WindowAnalysis {
    WindowSpec spec;
    CanonicalFit fit;
    AheadPrediction ahead;
    BaselinePrediction baselines;
    /// metrics[response][predictor], predictor order as kPredictors.
    std::array<std::array<Metrics, kPredictors.size()>, kResponseCount> metrics{};
};

/// fit_window, predict_ahead, predict_baselines and evaluate for one window.
WindowAnalysis analyze_window(const PanelDataset& panel, const WindowSpec& spec, const AggregationConfig& config,
                              QuantileLevel tau, const Eigen::VectorXd& weights = {});

/// True when the columns are linearly dependent after scaling each to unit norm.
bool columns_collinear(const Eigen::MatrixXd& design);

struct JointTstat {
    std::size_t window = 0;
    std::size_t response = 0;
    double coef_index = 0.0;
    double coef_ceo = 0.0;
    double se_index = 0.0;
    double se_ceo = 0.0;
    double t_index = 0.0;
    double t_ceo = 0.0;
    bool collinear = false;
};

struct JointTstatTable {
    std::vector<WindowSpec> windows;
    /// windows x responses entries, window-major.
    std::vector<JointTstat> entries;
    std::size_t failed_draws = 0;

    const JointTstat& at(std::size_t window, std::size_t response) const {
        return entries.at(window * kResponseCount + response);
    }
};

/**
 * Quantile regression of each future response on [1, Index, CEO pay] per
 * window, with resampled t-statistics. Each draw refits the canonical index
 * under its weights before the joint regression. Entries whose Index and CEO
 * columns are collinear are flagged and reported with zero t-statistics.
 */
JointTstatTable joint_tstats(const PanelDataset& panel, const std::vector<WindowSpec>& specs,
                             const AggregationConfig& config, QuantileLevel tau, const ResamplePlan& plan,
                             unsigned threads = 1);

}  // namespace crq
