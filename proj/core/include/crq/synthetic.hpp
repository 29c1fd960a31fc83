#pragma once

#include "crq/panel.hpp"

#include <array>
#include <cstddef>
#include <cstdint>

namespace crq {

enum class NoiseTail { normal, student_t };

/**
 * Generator settings for a synthetic company panel.
 *
 * Each company has a latent quality and growth rate; every response is, on
 * the log scale, a base level plus that latent trajectory plus noise. The
 * noise on response j is noise_scale + idiosyncratic_scale * (1 - true_alpha[j]),
 * so responses carrying more of the true index are the most predictable. CEO
 * pay loads on quality only through ceo_signal.
 */
struct SyntheticSpec {
    std::size_t n_companies = 100;
    int n_years = 10;
    int first_year = 2009;
    double noise_scale = 0.05;
    double idiosyncratic_scale = 1.0;
    NoiseTail tail = NoiseTail::normal;
    double tail_df = 3.0;
    /// Probability that an Eprof or TSR value is replaced by a sign-flipped outlier.
    double contamination = 0.05;
    std::array<double, 5> true_alpha = {1.0, 0.0, 0.0, 0.0, 0.0};
    double ceo_signal = 0.1;
    /// Window settings the panel must accommodate.
    int window_length = 5;
    int horizon = 2;

    void validate() const;
};

/// Deterministic in (spec, seed).
PanelDataset gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace crq
