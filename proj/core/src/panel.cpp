#include "crq/panel.hpp"

#include "crq/error.hpp"

namespace crq {

std::string_view industry_name(Industry industry) noexcept {
    switch (industry) {
        case Industry::industrial: return "industrial";
        case Industry::health: return "health";
        case Industry::consumer: return "consumer";
        case Industry::energy: return "energy";
        case Industry::tech: return "tech";
        case Industry::utility: return "utility";
    }
    return "unknown";
}

std::optional<Industry> parse_industry(std::string_view name) noexcept {
    for (Industry i : kIndustries)
        if (industry_name(i) == name) return i;
    return std::nullopt;
}

PanelDataset::PanelDataset(std::vector<Company> companies, int first_year, int year_count,
                           std::vector<Observation> cells)
    : companies_(std::move(companies)), first_year_(first_year), year_count_(year_count), cells_(std::move(cells)) {
    if (year_count_ < 1) throw Error("panel: need at least one year");
    if (cells_.size() != companies_.size() * static_cast<std::size_t>(year_count_))
        throw Error("panel: cell count does not match companies x years");
}

const Observation& PanelDataset::at(std::size_t company, int year) const {
    if (company >= companies_.size()) throw Error("panel: company index out of range");
    if (!has_year(year)) throw Error("panel: year " + std::to_string(year) + " outside the panel range");
    return cells_[company * static_cast<std::size_t>(year_count_) + static_cast<std::size_t>(year - first_year_)];
}

PanelDataset PanelDataset::shifted(int offset) const {
    return PanelDataset(companies_, first_year_ + offset, year_count_, cells_);
}

PanelDataset PanelDataset::permuted(const std::vector<std::size_t>& order) const {
    if (order.size() != companies_.size()) throw Error("panel: permutation has wrong length");
    std::vector<Company> companies;
    std::vector<Observation> cells;
    companies.reserve(order.size());
    cells.reserve(cells_.size());
    const auto years = static_cast<std::size_t>(year_count_);
    for (std::size_t c : order) {
        if (c >= companies_.size()) throw Error("panel: permutation index out of range");
        companies.push_back(companies_[c]);
        cells.insert(cells.end(), cells_.begin() + static_cast<std::ptrdiff_t>(c * years),
                     cells_.begin() + static_cast<std::ptrdiff_t>((c + 1) * years));
    }
    return PanelDataset(std::move(companies), first_year_, year_count_, std::move(cells));
}

}  // namespace crq
