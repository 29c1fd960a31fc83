#pragma once

#include "crq/panel.hpp"
#include "crq/transforms.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace crq {

/// Which CEO pay value the standalone CEO predictors use.
enum class CeoPredictorSource { aggregate, current_year };

struct AggregationConfig {
    double discount_rate = 0.05;
    ResponseTransform transform = ResponseTransform::signed_log;
    CeoPredictorSource ceo_source = CeoPredictorSource::aggregate;

    void validate() const;
};

/// Inclusive year range.
struct YearRange {
    int first = 0;
    int last = 0;
    int length() const noexcept { return last - first + 1; }
};

struct Design {
    Eigen::MatrixXd matrix;
    std::vector<std::string> labels;
};

inline constexpr int kDesignColumns = 26;

/// The 26 column labels in design order.
const std::vector<std::string>& design_labels();

/// Column index of a design label; throws if unknown.
Eigen::Index design_column(const std::string& label);

/**
 * Per company: intercept, five industry dummies (utility is the reference),
 * then for IR, EQ, MG, EPS, CEOtot and the five transformed responses the
 * discounted average ("wt") and smallest yearly change ("minD") over the
 * window. Responses are transformed year by year before aggregating; the
 * explanatory variables enter untransformed.
 */
Design build_design(const PanelDataset& panel, YearRange window, const AggregationConfig& config);

/// n x 5 matrix of transformed responses observed in `year`.
Eigen::MatrixXd response_matrix(const PanelDataset& panel, int year, const AggregationConfig& config);

}  // namespace crq
