#include "crq/report.hpp"

#include "crq/error.hpp"
#include "crq/io.hpp"
#include "crq/plots.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#ifndef CRQ_VERSION
#define CRQ_VERSION "unknown"
#endif

namespace crq {

void RunConfig::validate() const {
    if (input.has_value() == synthetic.has_value())
        throw Error("run config: give exactly one of an input file or a synthetic spec");
    if (taus.empty()) throw Error("run config: need at least one tau");
    for (double t : taus) QuantileLevel{t};
    if (window_length < 2) throw Error("run config: window length must be at least 2");
    if (horizon < 1) throw Error("run config: horizon must be at least 1");
    if (replications < 2) throw Error("run config: need at least 2 replications");
    if (!(subsample_multiplier > 0.0)) throw Error("run config: subsample multiplier must be positive");
    aggregation.validate();
    if (synthetic) synthetic->validate();
}

std::vector<WindowSpec> evaluation_windows(const PanelDataset& panel, int window_length, int horizon) {
    const int fit = panel.year_count() - window_length - 2 * horizon + 1;
    if (fit < 1)
        throw Error("panel spans " + std::to_string(panel.year_count()) + " years; need at least " +
                    std::to_string(window_length + 2 * horizon) + " for one evaluation window");
    std::vector<WindowSpec> out;
    for (int w = 0; w < std::min(fit, 2); ++w)
        out.push_back(WindowSpec::standard(panel.first_year() + w, window_length, horizon));
    return out;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::size_t kMetricKinds = 3;  // mae, rmse, rho
constexpr std::size_t kMetricBlock = kResponseCount * kPredictors.size() * kMetricKinds;

std::size_t metric_slot(std::size_t response, std::size_t predictor, std::size_t kind) {
    return (response * kPredictors.size() + predictor) * kMetricKinds + kind;
}

double metric_value(const Metrics& m, std::size_t kind) {
    return kind == 0 ? m.mae : kind == 1 ? m.rmse : m.rho;
}

MetricGrid& grid_for(WindowReport& wr, std::size_t kind) { return kind == 0 ? wr.mae : kind == 1 ? wr.rmse : wr.rho; }
MetricGrid& pooled_for(PredictionReport& r, std::size_t kind) {
    return kind == 0 ? r.pooled_mae : kind == 1 ? r.pooled_rmse : r.pooled_rho;
}

}  // namespace

ResamplePlan pipeline_plan(const RunConfig& config, std::size_t n_companies, std::size_t stream) {
    const std::uint64_t seed = mix_seed(config.seed, stream);
    ResamplePlan plan;
    if (config.scheme == ResampleScheme::andrews) {
        const std::size_t floor = std::min<std::size_t>(kDesignColumns + 5, n_companies - 1);
        plan = ResamplePlan::andrews(n_companies, seed, config.replications, config.subsample_multiplier, floor);
    } else {
        plan = ResamplePlan::jackknife(n_companies, seed, config.replications);
    }
    plan.se_rescale = config.se_rescale;
    return plan;
}

PredictionReport build_report(const PanelDataset& panel, const std::vector<WindowSpec>& windows,
                              const AggregationConfig& config, QuantileLevel tau, const ResamplePlan& plan,
                              unsigned threads) {
    if (windows.empty()) throw Error("build_report: no windows");
    const std::size_t p = kDesignColumns;
    const std::size_t q = kResponseCount;
    const std::size_t per_window = q + p + kMetricBlock;
    const std::size_t wcount = windows.size();

    const RefitFn refit = [&](const WeightVector& wv) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(wcount * per_window + kMetricBlock));
        for (std::size_t w = 0; w < wcount; ++w) {
            const WindowAnalysis a = analyze_window(panel, windows[w], config, tau, wv.weights);
            const auto base = static_cast<Eigen::Index>(w * per_window);
            out.segment(base, static_cast<Eigen::Index>(q)) = a.fit.alpha;
            out.segment(base + static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(p)) = a.fit.beta;
            for (std::size_t j = 0; j < q; ++j)
                for (std::size_t k = 0; k < kPredictors.size(); ++k)
                    for (std::size_t m = 0; m < kMetricKinds; ++m) {
                        const double v = metric_value(a.metrics[j][k], m);
                        const auto s = static_cast<Eigen::Index>(metric_slot(j, k, m));
                        out(base + static_cast<Eigen::Index>(q + p) + s) = v;
                        out(static_cast<Eigen::Index>(wcount * per_window) + s) += v / static_cast<double>(wcount);
                    }
        }
        return out;
    };

    const InferenceResult inf = resample_inference(refit, panel.company_count(), plan, threads);

    PredictionReport report;
    report.tau = tau.value();
    report.failed_draws = inf.failed_draws.size();
    for (std::size_t w = 0; w < wcount; ++w) {
        WindowReport wr;
        wr.analysis = analyze_window(panel, windows[w], config, tau);
        const auto base = static_cast<Eigen::Index>(w * per_window);
        for (std::size_t j = 0; j < q; ++j) {
            const auto i = base + static_cast<Eigen::Index>(j);
            wr.alpha.push_back({inf.point(i), inf.se(i)});
        }
        for (std::size_t c = 0; c < p; ++c) {
            const auto i = base + static_cast<Eigen::Index>(q + c);
            wr.beta.push_back({inf.point(i), inf.se(i)});
            wr.beta_t.push_back(inf.t_stats(i));
        }
        for (std::size_t j = 0; j < q; ++j)
            for (std::size_t k = 0; k < kPredictors.size(); ++k)
                for (std::size_t m = 0; m < kMetricKinds; ++m) {
                    const auto i = base + static_cast<Eigen::Index>(q + p + metric_slot(j, k, m));
                    grid_for(wr, m)[j][k] = {inf.point(i), inf.se(i)};
                }
        report.windows.push_back(std::move(wr));
    }
    for (std::size_t j = 0; j < q; ++j)
        for (std::size_t k = 0; k < kPredictors.size(); ++k)
            for (std::size_t m = 0; m < kMetricKinds; ++m) {
                const auto i = static_cast<Eigen::Index>(wcount * per_window + metric_slot(j, k, m));
                pooled_for(report, m)[j][k] = {inf.point(i), inf.se(i)};
            }

    report.joint = joint_tstats(panel, windows, config, tau, plan, threads);
    report.failed_draws += report.joint.failed_draws;
    return report;
}

namespace {

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    std::string s(buf);
    if (s == "-0.000") s = "0.000";
    return s;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

void open_for_write(std::ofstream& out, const std::filesystem::path& path) {
    out.open(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
}

std::string tau_text(double tau) { return format_full(tau); }

std::string short_year(int year) {
    const int y = ((year % 100) + 100) % 100;
    return (y < 10 ? "0" : "") + std::to_string(y);
}

// Row labels for the metric tables, following the published layout.
std::vector<std::pair<std::size_t, std::string>> metric_rows(double tau) {
    if (tau == 0.5) return {{1, "cancor"}, {0, "Index"}, {2, "CEOrq"}};
    return {{1, "cancor"}, {0, "rq.can"}, {2, "CEOrq"}, {3, "CEOls"}};
}

void write_metric_table(std::ostream& out, const std::string& title, const MetricGrid& grid, double tau) {
    out << title << '\n';
    out << pad("Method", 10);
    for (std::string_view r : kResponseLabels) out << pad(std::string(r), 18);
    out << '\n';
    for (const auto& [k, label] : metric_rows(tau)) {
        out << pad(label, 10);
        for (std::size_t j = 0; j < kResponseCount; ++j)
            out << pad(fixed3(grid[j][k].value) + " (" + fixed3(grid[j][k].se) + ")", 18);
        out << '\n';
    }
    out << '\n';
}

void write_metric_csv(std::ostream& out, const std::vector<PredictionReport>& reports, std::size_t kind) {
    out << "tau,scope,predictor,response,value,se\n";
    for (const PredictionReport& r : reports) {
        auto emit = [&](const std::string& scope, const MetricGrid& g) {
            for (std::size_t k = 0; k < kPredictors.size(); ++k)
                for (std::size_t j = 0; j < kResponseCount; ++j)
                    out << tau_text(r.tau) << ',' << scope << ',' << predictor_key(kPredictors[k]) << ','
                        << kResponseLabels[j] << ',' << format_full(g[j][k].value) << ','
                        << format_full(g[j][k].se) << '\n';
        };
        for (const WindowReport& w : r.windows) {
            const MetricGrid& g = kind == 0 ? w.mae : kind == 1 ? w.rmse : w.rho;
            emit(std::to_string(w.analysis.spec.apply_target_year()), g);
        }
        emit("pooled", kind == 0 ? r.pooled_mae : kind == 1 ? r.pooled_rmse : r.pooled_rho);
    }
}

}  // namespace

void write_report_tables(const std::vector<PredictionReport>& reports, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream out;

    open_for_write(out, dir / "alpha.csv");
    out << "tau,target_year,response,alpha,se\n";
    for (const PredictionReport& r : reports)
        for (const WindowReport& w : r.windows)
            for (std::size_t j = 0; j < kResponseCount; ++j)
                out << tau_text(r.tau) << ',' << w.analysis.spec.apply_target_year() << ',' << kResponseLabels[j] << ','
                    << format_full(w.alpha[j].value) << ',' << format_full(w.alpha[j].se) << '\n';
    out.close();

    open_for_write(out, dir / "beta.csv");
    out << "tau,target_year,variable,beta,se,t_stat\n";
    for (const PredictionReport& r : reports)
        for (const WindowReport& w : r.windows)
            for (std::size_t c = 0; c < w.beta.size(); ++c)
                out << tau_text(r.tau) << ',' << w.analysis.spec.apply_target_year() << ',' << design_labels()[c]
                    << ',' << format_full(w.beta[c].value) << ',' << format_full(w.beta[c].se) << ','
                    << format_full(w.beta_t[c]) << '\n';
    out.close();

    const char* metric_files[] = {"mae.csv", "rmse.csv", "rho_loss.csv"};
    for (std::size_t kind = 0; kind < 3; ++kind) {
        open_for_write(out, dir / metric_files[kind]);
        write_metric_csv(out, reports, kind);
        out.close();
    }

    open_for_write(out, dir / "joint_tstats.csv");
    out << "tau,target_year,response,coef_index,se_index,t_index,coef_ceo,se_ceo,t_ceo,collinear\n";
    for (const PredictionReport& r : reports)
        for (const JointTstat& e : r.joint.entries)
            out << tau_text(r.tau) << ',' << r.joint.windows[e.window].apply_target_year() << ','
                << kResponseLabels[e.response] << ',' << format_full(e.coef_index) << ',' << format_full(e.se_index)
                << ',' << format_full(e.t_index) << ',' << format_full(e.coef_ceo) << ',' << format_full(e.se_ceo)
                << ',' << format_full(e.t_ceo) << ',' << (e.collinear ? 1 : 0) << '\n';
    out.close();

    open_for_write(out, dir / "tables.txt");
    for (const PredictionReport& r : reports) {
        out << "==== tau = " << fixed3(r.tau) << " ====\n\n";

        out << "alpha coefficients for Index\n" << pad("year", 10);
        for (std::string_view l : kResponseLabels) out << pad(std::string(l), 10);
        out << '\n';
        for (const WindowReport& w : r.windows) {
            out << pad(std::to_string(w.analysis.spec.apply_target_year()), 10);
            for (const Estimate& a : w.alpha) out << pad(fixed3(a.value), 10);
            out << '\n';
        }
        out << '\n';

        out << "Beta coefficients for Index\n" << pad("", 14);
        for (const WindowReport& w : r.windows)
            out << pad(std::to_string(w.analysis.spec.apply_target_year()), 10) << pad("t-stat", 10);
        out << '\n';
        for (std::size_t c = 0; c < static_cast<std::size_t>(kDesignColumns); ++c) {
            out << pad(design_labels()[c], 14);
            for (const WindowReport& w : r.windows) out << pad(fixed3(w.beta[c].value), 10) << pad(fixed3(w.beta_t[c]), 10);
            out << '\n';
        }
        out << '\n';

        std::string years;
        for (const WindowReport& w : r.windows) {
            if (!years.empty()) years += "-";
            years += std::to_string(w.analysis.spec.apply_target_year());
        }
        write_metric_table(out, "MAE: " + years + " mean (SD)", r.pooled_mae, r.tau);
        if (r.tau != 0.5) write_metric_table(out, fixed3(r.tau) + " quantile objective function", r.pooled_rho, r.tau);

        out << "t-statistics for CEOtot and Index\n";
        for (std::size_t w = 0; w < r.joint.windows.size(); ++w) {
            const WindowSpec& s = r.joint.windows[w];
            out << pad(std::to_string(s.apply_target_year()), 10);
            for (std::string_view l : kResponseLabels) out << pad(std::string(l), 10);
            out << '\n';
            const std::string yy = short_year(s.apply_window().last);
            out << pad("Index" + yy, 10);
            for (std::size_t j = 0; j < kResponseCount; ++j) out << pad(fixed3(r.joint.at(w, j).t_index), 10);
            out << '\n' << pad("CEO" + yy, 10);
            for (std::size_t j = 0; j < kResponseCount; ++j) out << pad(fixed3(r.joint.at(w, j).t_ceo), 10);
            out << '\n';
        }
        out << '\n';
    }
    out.close();
}

namespace {

void write_manifest(const RunConfig& config, const PanelDataset& panel, const std::vector<WindowSpec>& windows,
                    const std::vector<PredictionReport>& reports, const ResamplePlan& plan0) {
    nlohmann::ordered_json j;
    j["tool"] = "crq";
    j["version"] = CRQ_VERSION;
    j["seed"] = config.seed;
    j["taus"] = config.taus;
    j["window_length"] = config.window_length;
    j["horizon"] = config.horizon;
    j["aggregation"] = {
        {"discount_rate", config.aggregation.discount_rate},
        {"transform", config.aggregation.transform == ResponseTransform::signed_log ? "signed_log" : "log_max1"},
        {"ceo_source", config.aggregation.ceo_source == CeoPredictorSource::aggregate ? "aggregate" : "current_year"}};
    j["resampling"] = {{"scheme", config.scheme == ResampleScheme::andrews ? "andrews" : "jackknife"},
                       {"replications", config.replications},
                       {"subset_size", plan0.subset_size},
                       {"subsample_multiplier", config.subsample_multiplier},
                       {"se_rescale", config.se_rescale}};
    if (config.input) {
        j["input"] = config.input->string();
    } else {
        const SyntheticSpec& s = *config.synthetic;
        j["synthetic"] = {{"n_companies", s.n_companies},
                          {"n_years", s.n_years},
                          {"first_year", s.first_year},
                          {"noise_scale", s.noise_scale},
                          {"idiosyncratic_scale", s.idiosyncratic_scale},
                          {"tail", s.tail == NoiseTail::normal ? "normal" : "student_t"},
                          {"tail_df", s.tail_df},
                          {"contamination", s.contamination},
                          {"ceo_signal", s.ceo_signal},
                          {"true_alpha", s.true_alpha}};
    }
    j["panel"] = {{"companies", panel.company_count()},
                  {"first_year", panel.first_year()},
                  {"last_year", panel.last_year()}};
    nlohmann::ordered_json wins = nlohmann::ordered_json::array();
    for (const WindowSpec& w : windows)
        wins.push_back({{"train", {w.train_window().first, w.train_window().last}},
                        {"train_target", w.train_target_year()},
                        {"apply", {w.apply_window().first, w.apply_window().last}},
                        {"apply_target", w.apply_target_year()}});
    j["windows"] = wins;
    nlohmann::ordered_json failed = nlohmann::ordered_json::array();
    for (const PredictionReport& r : reports) failed.push_back({{"tau", r.tau}, {"failed_draws", r.failed_draws}});
    j["failed_draws"] = failed;

    std::ofstream out;
    open_for_write(out, config.output_dir / "run_manifest.json");
    out << j.dump(2) << '\n';
}

}  // namespace

std::vector<PredictionReport> run_analysis(const RunConfig& config, unsigned threads) {
    config.validate();
    const PanelDataset panel =
        config.input ? load_panel(*config.input) : gen_synthetic(*config.synthetic, config.seed);
    const std::vector<WindowSpec> windows = evaluation_windows(panel, config.window_length, config.horizon);

    std::vector<PredictionReport> reports;
    for (std::size_t t = 0; t < config.taus.size(); ++t) {
        const ResamplePlan plan = pipeline_plan(config, panel.company_count(), t + 1);
        reports.push_back(build_report(panel, windows, config.aggregation, QuantileLevel(config.taus[t]), plan, threads));
    }

    std::filesystem::create_directories(config.output_dir);
    write_report_tables(reports, config.output_dir);
    emit_plot_data(reports, config.output_dir);
    write_manifest(config, panel, windows, reports, pipeline_plan(config, panel.company_count(), 1));
    return reports;
}

}  // namespace crq
