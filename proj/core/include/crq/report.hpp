#pragma once

#include "crq/design.hpp"
#include "crq/pipeline.hpp"
#include "crq/resampling.hpp"
#include "crq/synthetic.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace crq {

struct RunConfig {
    std::optional<std::filesystem::path> input;
    std::optional<SyntheticSpec> synthetic;
    std::vector<double> taus = {0.5, 0.75};
    int window_length = 5;
    int horizon = 2;
    AggregationConfig aggregation;
    ResampleScheme scheme = ResampleScheme::andrews;
    std::size_t replications = 200;
    double subsample_multiplier = 3.0;
    bool se_rescale = true;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 1;

    void validate() const;
};

/// A metric value with its resampled standard error.
struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

/// metric[response][predictor] with predictor order as kPredictors.
using MetricGrid = std::array<std::array<Estimate, kPredictors.size()>, kResponseCount>;

struct WindowReport {
    WindowAnalysis analysis;  ///< full-sample fit, predictions and metrics
    std::vector<Estimate> alpha;
    std::vector<Estimate> beta;
    std::vector<double> beta_t;
    MetricGrid mae;
    MetricGrid rmse;
    MetricGrid rho;
};

struct PredictionReport {
    double tau = 0.5;
    std::vector<WindowReport> windows;
    /// Averages over the evaluation windows.
    MetricGrid pooled_mae;
    MetricGrid pooled_rmse;
    MetricGrid pooled_rho;
    JointTstatTable joint;
    std::size_t failed_draws = 0;
};

/// Evaluation windows for a panel: up to two consecutive standard windows.
std::vector<WindowSpec> evaluation_windows(const PanelDataset& panel, int window_length, int horizon);

/// Builds the report for one level; `plan` drives every resampled standard error.
PredictionReport build_report(const PanelDataset& panel, const std::vector<WindowSpec>& windows,
                              const AggregationConfig& config, QuantileLevel tau, const ResamplePlan& plan,
                              unsigned threads = 1);

/// Seeded resampling plan for the pipeline (subsample raised to p + 5 for full-design refits).
ResamplePlan pipeline_plan(const RunConfig& config, std::size_t n_companies, std::size_t stream);

/// Writes alpha/beta/mae/rmse/rho_loss/joint_tstats CSVs and tables.txt.
void write_report_tables(const std::vector<PredictionReport>& reports, const std::filesystem::path& dir);

/**
 * Loads or generates the panel, builds a report for every level, writes all
 * tables, plot data and run_manifest.json into config.output_dir. Output is
 * byte-identical for a fixed config regardless of `threads`.
 */
std::vector<PredictionReport> run_analysis(const RunConfig& config, unsigned threads = 1);

}  // namespace crq
