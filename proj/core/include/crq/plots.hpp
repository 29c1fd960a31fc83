#pragma once

#include "crq/pipeline.hpp"
#include "crq/report.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace crq {

struct ScatterSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::optional<Line> line;
};

struct ScatterPanel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<ScatterSeries> series;
};

/// Sorted fitted values against sorted observed values, pairwise.
struct QqData {
    std::vector<double> fitted;
    std::vector<double> observed;
};
QqData qq_pairs(const Eigen::VectorXd& fitted, const Eigen::VectorXd& observed);

/// Response index against prediction index and against CEO pay, with quantile lines.
std::vector<ScatterPanel> figure_index_panels(const WindowAnalysis& analysis, QuantileLevel tau);
/// Each response against the prediction index and CEO pay, lines from the fitted predictors.
std::vector<ScatterPanel> figure_response_panels(const WindowAnalysis& analysis);
/// Q-Q panels for the index and CEO quantile predictors.
std::vector<ScatterPanel> figure_qq_panels(const WindowAnalysis& analysis);

/// Renders a grid of scatter panels as a standalone SVG document.
std::string render_svg(const std::vector<ScatterPanel>& panels, int columns);

/**
 * Writes fig1/fig2/fig3 CSV point data (every level and window) plus SVG
 * renderings of the first level's first window.
 */
void emit_plot_data(const std::vector<PredictionReport>& reports, const std::filesystem::path& dir);

}  // namespace crq
