// crq: canonical regression quantile analysis of company panels.
//
//   crq analyze  --input panel.csv | --synthetic spec.toml  [options] --out DIR
//   crq generate --synthetic spec.toml --seed N --out panel.csv
//
// CRQ_THREADS sets the number of worker threads (default 1).

#include "crq/error.hpp"
#include "crq/io.hpp"
#include "crq/parallel.hpp"
#include "crq/report.hpp"
#include "crq/synthetic.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <sstream>

namespace {

std::vector<double> parse_taus(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw crq::Error("bad tau value '" + item + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Canonical regression quantile indices for company panels"};
    app.require_subcommand(1);

    crq::RunConfig config;
    std::string input;
    std::string synthetic;
    std::string taus = "0.5,0.75";
    std::string out_dir = "out";
    std::string scheme = "andrews";
    std::string transform = "signed_log";
    std::string ceo_source = "aggregate";
    bool no_rescale = false;

    auto* analyze = app.add_subcommand("analyze", "Fit, predict and report over rolling windows");
    auto* in_opt = analyze->add_option("--input", input, "Panel CSV file")->check(CLI::ExistingFile);
    auto* syn_opt = analyze->add_option("--synthetic", synthetic, "Synthetic panel spec (key = value file)")
                        ->check(CLI::ExistingFile);
    in_opt->excludes(syn_opt);
    syn_opt->excludes(in_opt);
    analyze->add_option("--tau", taus, "Comma-separated quantile levels")->capture_default_str();
    analyze->add_option("--window", config.window_length, "Years per aggregation window")->capture_default_str();
    analyze->add_option("--horizon", config.horizon, "Years ahead to predict")->capture_default_str();
    analyze->add_option("--replications", config.replications, "Resampling replications")->capture_default_str();
    analyze->add_option("--seed", config.seed, "Random seed")->capture_default_str();
    analyze->add_option("--out", out_dir, "Output directory")->capture_default_str();
    analyze->add_option("--scheme", scheme, "andrews or jackknife")
        ->check(CLI::IsMember({"andrews", "jackknife"}))
        ->capture_default_str();
    analyze->add_option("--subsample-multiplier", config.subsample_multiplier, "m = ceil(c * ln n)")
        ->capture_default_str();
    analyze->add_flag("--no-se-rescale", no_rescale, "Report raw cross-draw dispersion");
    analyze->add_option("--discount", config.aggregation.discount_rate, "Yearly discount for the wt aggregate")
        ->capture_default_str();
    analyze->add_option("--transform", transform, "signed_log or log_max1")
        ->check(CLI::IsMember({"signed_log", "log_max1"}))
        ->capture_default_str();
    analyze->add_option("--ceo-source", ceo_source, "aggregate or current_year")
        ->check(CLI::IsMember({"aggregate", "current_year"}))
        ->capture_default_str();

    std::string gen_spec;
    std::string gen_out;
    std::uint64_t gen_seed = 1;
    auto* generate = app.add_subcommand("generate", "Write a synthetic panel CSV");
    generate->add_option("--synthetic", gen_spec, "Synthetic panel spec (key = value file)")
        ->check(CLI::ExistingFile);
    generate->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
    generate->add_option("--out", gen_out, "Output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate) {
            const crq::SyntheticSpec spec = gen_spec.empty() ? crq::SyntheticSpec{} : crq::load_synthetic_spec(gen_spec);
            crq::write_panel(crq::gen_synthetic(spec, gen_seed), std::filesystem::path(gen_out));
            return 0;
        }

        if (!input.empty()) config.input = input;
        if (!synthetic.empty()) config.synthetic = crq::load_synthetic_spec(synthetic);
        config.taus = parse_taus(taus);
        config.output_dir = out_dir;
        config.scheme = scheme == "andrews" ? crq::ResampleScheme::andrews : crq::ResampleScheme::jackknife;
        config.se_rescale = !no_rescale;
        config.aggregation.transform =
            transform == "signed_log" ? crq::ResponseTransform::signed_log : crq::ResponseTransform::log_max1;
        config.aggregation.ceo_source =
            ceo_source == "aggregate" ? crq::CeoPredictorSource::aggregate : crq::CeoPredictorSource::current_year;

        const auto reports = crq::run_analysis(config, crq::threads_from_env());
        std::cout << "wrote " << reports.size() << " report(s) to " << config.output_dir.string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "crq: " << e.what() << '\n';
        return 1;
    }
}
