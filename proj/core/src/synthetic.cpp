#include "crq/synthetic.hpp"

#include "crq/error.hpp"

#include <cmath>
#include <random>
#include <string>

namespace crq {

void SyntheticSpec::validate() const {
    if (n_companies < 2) throw Error("synthetic spec: need at least two companies");
    if (window_length < 2 || horizon < 1) throw Error("synthetic spec: invalid window settings");
    if (n_years < window_length + 2 * horizon)
        throw Error("synthetic spec: n_years = " + std::to_string(n_years) + " is below window_length + 2 * horizon");
    if (!(contamination >= 0.0 && contamination < 1.0)) throw Error("synthetic spec: contamination must lie in [0, 1)");
    if (!(noise_scale >= 0.0) || !(idiosyncratic_scale >= 0.0)) throw Error("synthetic spec: noise scales must be >= 0");
    if (tail == NoiseTail::student_t && !(tail_df > 2.0))
        throw Error("synthetic spec: student-t tail needs df > 2 for finite variance");
    double total = 0.0;
    for (double a : true_alpha) {
        if (a < 0.0) throw Error("synthetic spec: true_alpha entries must be nonnegative");
        total += a;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error("synthetic spec: true_alpha must sum to 1");
}

namespace {

constexpr std::array<double, 5> kBaseLevel = {22.0, 20.0, 19.0, 23.0, 19.0};

class NoiseSource {
public:
    NoiseSource(const SyntheticSpec& spec, std::uint64_t seed) : spec_(spec), rng_(seed) {}

    /// Unit-variance draw with the configured tail.
    double noise() {
        if (spec_.tail == NoiseTail::normal) return normal_(rng_);
        std::student_t_distribution<double> t(spec_.tail_df);
        return t(rng_) * std::sqrt((spec_.tail_df - 2.0) / spec_.tail_df);
    }
    double normal() { return normal_(rng_); }
    double uniform() { return uniform_(rng_); }
    int index(int count) { return std::uniform_int_distribution<int>(0, count - 1)(rng_); }

private:
    const SyntheticSpec& spec_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace

PanelDataset gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    NoiseSource src(spec, seed);

    std::array<double, kIndustries.size()> industry_effect{};
    for (double& e : industry_effect) e = 0.3 * src.normal();

    std::vector<Company> companies;
    std::vector<Observation> cells;
    companies.reserve(spec.n_companies);
    cells.reserve(spec.n_companies * static_cast<std::size_t>(spec.n_years));

    std::array<double, 5> sigma{};
    for (std::size_t j = 0; j < 5; ++j) sigma[j] = spec.noise_scale + spec.idiosyncratic_scale * (1.0 - spec.true_alpha[j]);

    for (std::size_t c = 0; c < spec.n_companies; ++c) {
        const int ind = src.index(static_cast<int>(kIndustries.size()));
        companies.push_back({"C" + std::to_string(c + 1), kIndustries[static_cast<std::size_t>(ind)]});
        const double quality = src.normal();
        const double growth = 0.05 + 0.03 * src.normal();
        const double level = quality + industry_effect[static_cast<std::size_t>(ind)];

        for (int t = 0; t < spec.n_years; ++t) {
            const double latent = level + growth * t;
            Observation o;
            o.ir = 1.0 + 0.2 * quality + 0.3 * src.noise();
            o.eq = 0.05 * src.noise();
            o.mg = 1.0 + 0.5 * src.noise();
            o.eps = 0.1 * src.noise();
            o.ceo_tot = std::exp(2.4 + spec.ceo_signal * quality + 0.4 * src.noise());

            std::array<double, 5> raw{};
            for (std::size_t j = 0; j < 5; ++j) {
                const double z = kBaseLevel[j] + latent + sigma[j] * src.noise();
                raw[j] = std::exp(z);
                const bool can_flip = j == 2 || j == 4;
                if (can_flip && src.uniform() < spec.contamination) raw[j] = -std::exp(z + 2.0 * std::abs(src.noise()));
            }
            o.rev = raw[0];
            o.earn = raw[1];
            o.eprof = raw[2];
            o.mcap = raw[3];
            o.tsr = raw[4];
            cells.push_back(o);
        }
    }
    return PanelDataset(std::move(companies), spec.first_year, spec.n_years, std::move(cells));
}

}  // namespace crq
