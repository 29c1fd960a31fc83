#pragma once

#include "crq/panel.hpp"
#include "crq/synthetic.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace crq {

/// Exact header expected by load_panel and written by write_panel.
inline constexpr std::string_view kPanelHeader =
    "company_id,industry,year,IR,EQ,MG,EPS,CEOtot,REV,Earn,Eprof,MCap,TSR";

/**
 * Reads a panel CSV. Companies keep their first-appearance order. Errors
 * carry the offending line number: unknown industry labels, empty cells,
 * duplicate (company, year) rows, gaps in a company's years and companies
 * that do not cover the common year range.
 */
PanelDataset load_panel(const std::filesystem::path& path);
PanelDataset parse_panel(std::istream& in);

/// Full-precision CSV; load_panel(write_panel(p)) == p.
void write_panel(const PanelDataset& panel, const std::filesystem::path& path);
void write_panel(const PanelDataset& panel, std::ostream& out);

/**
 * Reads `key = value` lines (`#` starts a comment) into a SyntheticSpec.
 * Keys match the SyntheticSpec field names; true_alpha takes a bracketed,
 * comma-separated list; tail is "normal" or "student_t".
 */
SyntheticSpec parse_synthetic_spec(std::string_view text);
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double.
std::string format_full(double value);

}  // namespace crq
