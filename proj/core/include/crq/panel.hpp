#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crq {

enum class Industry { industrial, health, consumer, energy, tech, utility };

inline constexpr std::array<Industry, 6> kIndustries = {Industry::industrial, Industry::health, Industry::consumer,
                                                        Industry::energy,     Industry::tech,   Industry::utility};

std::string_view industry_name(Industry industry) noexcept;
std::optional<Industry> parse_industry(std::string_view name) noexcept;

/// One company-year record. Explanatory ratios, CEO pay, then the five responses.
struct Observation {
    double ir = 0.0;       ///< investment ratio
    double eq = 0.0;       ///< earnings quality ratio
    double mg = 0.0;       ///< margin growth ratio
    double eps = 0.0;      ///< EPS growth less true earnings growth
    double ceo_tot = 0.0;  ///< CEO total package
    double rev = 0.0;
    double earn = 0.0;
    double eprof = 0.0;
    double mcap = 0.0;
    double tsr = 0.0;

    bool operator==(const Observation&) const = default;
};

using ObservationField = double Observation::*;

inline constexpr std::array<ObservationField, 5> kExplanatoryFields = {
    &Observation::ir, &Observation::eq, &Observation::mg, &Observation::eps, &Observation::ceo_tot};
inline constexpr std::array<ObservationField, 5> kResponseFields = {
    &Observation::rev, &Observation::earn, &Observation::eprof, &Observation::mcap, &Observation::tsr};

/// Short names used in column labels, e.g. "IR", "EPSG", "CEOt".
inline constexpr std::array<std::string_view, 5> kExplanatoryLabels = {"IR", "EQ", "MG", "EPSG", "CEOt"};
inline constexpr std::array<std::string_view, 5> kResponseLabels = {"logRev", "logEarn", "logEprof", "logMCap",
                                                                    "logTSR"};
inline constexpr std::size_t kResponseCount = kResponseFields.size();

struct Company {
    std::string id;
    Industry industry = Industry::industrial;

    bool operator==(const Company&) const = default;
};

/**
 * Balanced company-by-year panel over a contiguous range of years. Immutable
 * after construction; every (company, year) cell is present.
 */
class PanelDataset {
public:
    PanelDataset(std::vector<Company> companies, int first_year, int year_count, std::vector<Observation> cells);

    const std::vector<Company>& companies() const noexcept { return companies_; }
    std::size_t company_count() const noexcept { return companies_.size(); }
    int first_year() const noexcept { return first_year_; }
    int last_year() const noexcept { return first_year_ + year_count_ - 1; }
    int year_count() const noexcept { return year_count_; }
    bool has_year(int year) const noexcept { return year >= first_year_ && year <= last_year(); }

    const Observation& at(std::size_t company, int year) const;

    /// Same data with every year shifted by `offset`.
    PanelDataset shifted(int offset) const;
    /// Same data with companies reordered so row i is old row order[i].
    PanelDataset permuted(const std::vector<std::size_t>& order) const;

    bool operator==(const PanelDataset&) const = default;

private:
    std::vector<Company> companies_;
    int first_year_;
    int year_count_;
    std::vector<Observation> cells_;  // company-major
};

}  // namespace crq
