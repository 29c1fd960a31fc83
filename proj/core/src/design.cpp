#include "crq/design.hpp"

#include "crq/error.hpp"

#include <algorithm>

namespace crq {

void AggregationConfig::validate() const {
    if (!(discount_rate >= 0.0 && discount_rate < 1.0)) throw Error("aggregation: discount rate must lie in [0, 1)");
}

const std::vector<std::string>& design_labels() {
    static const std::vector<std::string> labels = [] {
        std::vector<std::string> out = {"intercept", "indust", "health", "consum", "energy", "tech"};
        for (std::string_view v : kExplanatoryLabels) {
            out.push_back(std::string(v) + "wt");
            out.push_back(std::string(v) + "minD");
        }
        for (std::string_view v : kResponseLabels) {
            out.push_back(std::string(v) + "wt");
            out.push_back(std::string(v) + "minD");
        }
        return out;
    }();
    return labels;
}

Eigen::Index design_column(const std::string& label) {
    const auto& labels = design_labels();
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw Error("unknown design column '" + label + "'");
    return static_cast<Eigen::Index>(it - labels.begin());
}

namespace {

void check_window(const PanelDataset& panel, YearRange window) {
    if (window.length() < 2) throw Error("design window must span at least two years");
    for (int year : {window.first, window.last}) {
        if (!panel.has_year(year)) {
            const std::string company = panel.companies().empty() ? "<none>" : panel.companies().front().id;
            throw Error("missing cells: company " + company + " has no observation for year " + std::to_string(year));
        }
    }
}

}  // namespace

Design build_design(const PanelDataset& panel, YearRange window, const AggregationConfig& config) {
    config.validate();
    check_window(panel, window);
    const auto n = static_cast<Eigen::Index>(panel.company_count());
    const auto len = static_cast<std::size_t>(window.length());

    Design d;
    d.labels = design_labels();
    d.matrix = Eigen::MatrixXd::Zero(n, kDesignColumns);

    std::vector<double> series(len);
    for (Eigen::Index c = 0; c < n; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        d.matrix(c, 0) = 1.0;
        const Industry ind = panel.companies()[ci].industry;
        for (Eigen::Index k = 0; k < 5; ++k)
            if (kIndustries[static_cast<std::size_t>(k)] == ind) d.matrix(c, 1 + k) = 1.0;

        Eigen::Index col = 6;
        for (ObservationField field : kExplanatoryFields) {
            for (std::size_t t = 0; t < len; ++t) series[t] = panel.at(ci, window.first + static_cast<int>(t)).*field;
            d.matrix(c, col++) = discounted_avg(series, config.discount_rate);
            d.matrix(c, col++) = min_diff(series);
        }
        for (ObservationField field : kResponseFields) {
            for (std::size_t t = 0; t < len; ++t)
                series[t] = apply_transform(config.transform, panel.at(ci, window.first + static_cast<int>(t)).*field);
            d.matrix(c, col++) = discounted_avg(series, config.discount_rate);
            d.matrix(c, col++) = min_diff(series);
        }
    }
    return d;
}

Eigen::MatrixXd response_matrix(const PanelDataset& panel, int year, const AggregationConfig& config) {
    if (!panel.has_year(year)) throw Error("response year " + std::to_string(year) + " is outside the panel");
    const auto n = static_cast<Eigen::Index>(panel.company_count());
    Eigen::MatrixXd y(n, static_cast<Eigen::Index>(kResponseCount));
    for (Eigen::Index c = 0; c < n; ++c)
        for (std::size_t j = 0; j < kResponseCount; ++j)
            y(c, static_cast<Eigen::Index>(j)) =
                apply_transform(config.transform, panel.at(static_cast<std::size_t>(c), year).*kResponseFields[j]);
    return y;
}

}  // namespace crq
