#include "crq/pipeline.hpp"

#include "crq/error.hpp"
#include "crq/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crq {

WindowSpec WindowSpec::standard(int train_start_year, int window_length, int horizon) {
    return WindowSpec{train_start_year, window_length, horizon, train_start_year + horizon};
}

void WindowSpec::validate(const PanelDataset& panel) const {
    if (window_length < 2) throw Error("window spec: window length must be at least 2");
    if (horizon < 1) throw Error("window spec: horizon must be at least 1");
    const auto check = [&](int year, const char* what) {
        if (!panel.has_year(year))
            throw Error(std::string("window spec: ") + what + " year " + std::to_string(year) +
                        " is outside the panel range " + std::to_string(panel.first_year()) + "-" +
                        std::to_string(panel.last_year()));
    };
    check(train_start_year, "training start");
    check(train_target_year(), "training target");
    check(apply_start_year, "apply start");
    check(apply_target_year(), "apply target");
}

std::string_view predictor_key(Predictor p) noexcept {
    switch (p) {
        case Predictor::index_rq: return "index_rq";
        case Predictor::cca_ls: return "cca_ls";
        case Predictor::ceo_rq: return "ceo_rq";
        case Predictor::ceo_ls: return "ceo_ls";
    }
    return "unknown";
}

CanonicalFit fit_window(const PanelDataset& panel, const WindowSpec& spec, const AggregationConfig& config,
                        QuantileLevel tau, const Eigen::VectorXd& weights) {
    spec.validate(panel);
    CanonicalProblem problem;
    problem.design = build_design(panel, spec.train_window(), config).matrix;
    problem.responses = response_matrix(panel, spec.train_target_year(), config);
    problem.tau = tau;
    problem.weights = weights;
    return canonical_rq_simplex(problem);
}

namespace {

bool is_constant(const Eigen::VectorXd& x) {
    if (x.size() == 0) return true;
    const double lo = x.minCoeff();
    const double hi = x.maxCoeff();
    return hi - lo <= 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
}

Eigen::MatrixXd with_intercept(const Eigen::VectorXd& x) {
    Eigen::MatrixXd d(x.size(), 2);
    d.col(0).setOnes();
    d.col(1) = x;
    return d;
}

}  // namespace

Line quantile_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y, QuantileLevel tau,
                   const Eigen::VectorXd& weights) {
    if (x.size() != y.size()) throw Error("quantile_line: length mismatch");
    if (is_constant(x)) {
        const std::span<const double> w(weights.data(), static_cast<std::size_t>(weights.size()));
        return {sample_quantile(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), tau, w), 0.0};
    }
    const RqSolution s = rq_fit(RegressionProblem{with_intercept(x), y, weights}, tau);
    return {s.coefficients(0), s.coefficients(1)};
}

Line least_squares_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& weights) {
    if (x.size() != y.size()) throw Error("least_squares_line: length mismatch");
    if (is_constant(x)) {
        const Eigen::VectorXd w = weights.size() == 0 ? Eigen::VectorXd::Ones(y.size()) : weights;
        return {w.dot(y) / w.sum(), 0.0};
    }
    const Eigen::VectorXd c = least_squares(with_intercept(x), y, weights);
    return {c(0), c(1)};
}

AheadPrediction predict_ahead(const PanelDataset& panel, const CanonicalFit& fit, const WindowSpec& spec,
                              const AggregationConfig& config, QuantileLevel tau, const Eigen::VectorXd& weights) {
    spec.validate(panel);
    AheadPrediction out;
    out.target_year = spec.apply_target_year();
    const Design applied = build_design(panel, spec.apply_window(), config);
    out.index = make_index(applied.matrix, fit.beta);
    out.observed = response_matrix(panel, out.target_year, config);
    out.response_index = make_index(out.observed, fit.alpha);
    out.predicted.resize(out.observed.rows(), out.observed.cols());
    for (std::size_t j = 0; j < kResponseCount; ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        out.lines[j] = quantile_line(out.index, out.observed.col(col), tau, weights);
        out.predicted.col(col) = out.lines[j].intercept + out.lines[j].slope * out.index.array();
    }
    return out;
}

Eigen::VectorXd ceo_predictor(const PanelDataset& panel, YearRange window, const AggregationConfig& config) {
    if (config.ceo_source == CeoPredictorSource::aggregate)
        return build_design(panel, window, config).matrix.col(design_column("CEOtwt"));
    Eigen::VectorXd ceo(static_cast<Eigen::Index>(panel.company_count()));
    for (std::size_t c = 0; c < panel.company_count(); ++c)
        ceo(static_cast<Eigen::Index>(c)) = panel.at(c, window.last).ceo_tot;
    return ceo;
}

BaselinePrediction predict_baselines(const PanelDataset& panel, const WindowSpec& spec,
                                     const AggregationConfig& config, QuantileLevel tau,
                                     const Eigen::VectorXd& weights) {
    spec.validate(panel);
    BaselinePrediction out;
    const Design train = build_design(panel, spec.train_window(), config);
    const Eigen::MatrixXd train_y = response_matrix(panel, spec.train_target_year(), config);
    out.cca = cca_leading(train.matrix, train_y, weights);

    const Design applied = build_design(panel, spec.apply_window(), config);
    out.cca_index = make_index(applied.matrix, out.cca.b);
    out.ceo = ceo_predictor(panel, spec.apply_window(), config);

    const Eigen::MatrixXd observed = response_matrix(panel, spec.apply_target_year(), config);
    out.cca_ls.resize(observed.rows(), observed.cols());
    out.ceo_rq.resize(observed.rows(), observed.cols());
    out.ceo_ls.resize(observed.rows(), observed.cols());
    for (std::size_t j = 0; j < kResponseCount; ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        const Eigen::VectorXd y = observed.col(col);
        out.cca_lines[j] = least_squares_line(out.cca_index, y, weights);
        out.ceo_rq_lines[j] = quantile_line(out.ceo, y, tau, weights);
        out.ceo_ls_lines[j] = least_squares_line(out.ceo, y, weights);
        out.cca_ls.col(col) = out.cca_lines[j].intercept + out.cca_lines[j].slope * out.cca_index.array();
        out.ceo_rq.col(col) = out.ceo_rq_lines[j].intercept + out.ceo_rq_lines[j].slope * out.ceo.array();
        out.ceo_ls.col(col) = out.ceo_ls_lines[j].intercept + out.ceo_ls_lines[j].slope * out.ceo.array();
    }
    return out;
}

Metrics evaluate(const Eigen::VectorXd& predicted, const Eigen::VectorXd& observed, QuantileLevel tau,
                 const Eigen::VectorXd& weights) {
    if (predicted.size() != observed.size()) throw Error("evaluate: predicted and observed differ in length");
    if (predicted.size() < 1) throw Error("evaluate: empty input");
    if (weights.size() != 0 && weights.size() != observed.size()) throw Error("evaluate: weight length mismatch");

    double total_w = 0.0;
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    double rho_sum = 0.0;
    for (Eigen::Index i = 0; i < observed.size(); ++i) {
        const double w = weights.size() == 0 ? 1.0 : weights(i);
        const double e = observed(i) - predicted(i);
        total_w += w;
        abs_sum += w * std::abs(e);
        sq_sum += w * e * e;
        rho_sum += w * check_loss(e, tau);
    }
    if (!(total_w > 0.0)) throw Error("evaluate: total weight must be positive");
    Metrics m;
    m.mae = abs_sum / total_w;
    m.rho = rho_sum / total_w;
    // Jensen gives mae <= rmse; the max only absorbs last-bit rounding.
    m.rmse = std::max(std::sqrt(sq_sum / total_w), m.mae);
    return m;
}

WindowAnalysis analyze_window(const PanelDataset& panel, const WindowSpec& spec, const AggregationConfig& config,
                              QuantileLevel tau, const Eigen::VectorXd& weights) {
    WindowAnalysis a;
    a.spec = spec;
    a.fit = fit_window(panel, spec, config, tau, weights);
    a.ahead = predict_ahead(panel, a.fit, spec, config, tau, weights);
    a.baselines = predict_baselines(panel, spec, config, tau, weights);
    for (std::size_t j = 0; j < kResponseCount; ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        const Eigen::VectorXd obs = a.ahead.observed.col(col);
        a.metrics[j][0] = evaluate(a.ahead.predicted.col(col), obs, tau, weights);
        a.metrics[j][1] = evaluate(a.baselines.cca_ls.col(col), obs, tau, weights);
        a.metrics[j][2] = evaluate(a.baselines.ceo_rq.col(col), obs, tau, weights);
        a.metrics[j][3] = evaluate(a.baselines.ceo_ls.col(col), obs, tau, weights);
    }
    return a;
}

namespace {

Eigen::MatrixXd joint_design(const Eigen::VectorXd& index, const Eigen::VectorXd& ceo) {
    Eigen::MatrixXd d(index.size(), 3);
    d.col(0).setOnes();
    d.col(1) = index;
    d.col(2) = ceo;
    return d;
}

}  // namespace

bool columns_collinear(const Eigen::MatrixXd& design) {
    // Scale columns so the rank test ignores units.
    Eigen::MatrixXd scaled = design;
    for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
        const double norm = scaled.col(j).norm();
        if (norm > 0.0) scaled.col(j) /= norm;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    qr.setThreshold(1e-9);
    return qr.rank() < design.cols();
}

JointTstatTable joint_tstats(const PanelDataset& panel, const std::vector<WindowSpec>& specs,
                             const AggregationConfig& config, QuantileLevel tau, const ResamplePlan& plan,
                             unsigned threads) {
    if (specs.empty()) throw Error("joint_tstats: no windows given");
    for (const WindowSpec& s : specs) s.validate(panel);

    JointTstatTable table;
    table.windows = specs;

    // Per-window pieces that do not depend on the draw weights.
    std::vector<Eigen::MatrixXd> apply_designs;
    std::vector<Eigen::VectorXd> ceos;
    std::vector<Eigen::MatrixXd> futures;
    for (const WindowSpec& s : specs) {
        apply_designs.push_back(build_design(panel, s.apply_window(), config).matrix);
        ceos.push_back(ceo_predictor(panel, s.apply_window(), config));
        futures.push_back(response_matrix(panel, s.apply_target_year(), config));
    }

    // Collinearity is decided once, on the full-sample index.
    std::vector<bool> flagged(specs.size() * kResponseCount, false);
    for (std::size_t w = 0; w < specs.size(); ++w) {
        const CanonicalFit fit = fit_window(panel, specs[w], config, tau);
        const bool bad = columns_collinear(joint_design(make_index(apply_designs[w], fit.beta), ceos[w]));
        for (std::size_t j = 0; j < kResponseCount; ++j) flagged[w * kResponseCount + j] = bad;
    }

    const RefitFn refit = [&](const WeightVector& wv) {
        const Eigen::VectorXd& weights = wv.weights;
        Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(specs.size() * kResponseCount * 2));
        for (std::size_t w = 0; w < specs.size(); ++w) {
            const CanonicalFit fit = fit_window(panel, specs[w], config, tau, weights);
            const Eigen::MatrixXd design = joint_design(make_index(apply_designs[w], fit.beta), ceos[w]);
            for (std::size_t j = 0; j < kResponseCount; ++j) {
                const std::size_t slot = w * kResponseCount + j;
                if (flagged[slot]) continue;
                const RqSolution s =
                    rq_fit(RegressionProblem{design, futures[w].col(static_cast<Eigen::Index>(j)), weights}, tau);
                out(static_cast<Eigen::Index>(2 * slot)) = s.coefficients(1);
                out(static_cast<Eigen::Index>(2 * slot + 1)) = s.coefficients(2);
            }
        }
        return out;
    };

    const InferenceResult inf = resample_inference(refit, panel.company_count(), plan, threads);
    table.failed_draws = inf.failed_draws.size();
    for (std::size_t w = 0; w < specs.size(); ++w) {
        for (std::size_t j = 0; j < kResponseCount; ++j) {
            const std::size_t slot = w * kResponseCount + j;
            const auto a = static_cast<Eigen::Index>(2 * slot);
            JointTstat e;
            e.window = w;
            e.response = j;
            e.collinear = flagged[slot];
            e.coef_index = inf.point(a);
            e.coef_ceo = inf.point(a + 1);
            e.se_index = inf.se(a);
            e.se_ceo = inf.se(a + 1);
            e.t_index = inf.t_stats(a);
            e.t_ceo = inf.t_stats(a + 1);
            table.entries.push_back(e);
        }
    }
    return table;
}

}  // namespace crq
