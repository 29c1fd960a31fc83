#include "crq/io.hpp"

#include "crq/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace crq {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

[[noreturn]] void fail_at(std::size_t line, const std::string& msg) {
    throw Error("row " + std::to_string(line) + ": " + msg);
}

template <class T>
T parse_number(std::string_view text, std::size_t line, std::string_view column) {
    if (text.empty()) fail_at(line, "missing cell in column " + std::string(column));
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        fail_at(line, "cannot parse '" + std::string(text) + "' in column " + std::string(column));
    return value;
}

struct CompanyRows {
    Industry industry;
    std::map<int, std::pair<Observation, std::size_t>> years;  // year -> (record, line)
};

}  // namespace

std::string format_full(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw Error("format_full: conversion failed");
    return std::string(buf, ptr);
}

PanelDataset parse_panel(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw Error("panel csv: empty input");
    ++line_no;
    const std::vector<std::string_view> header = split(line, ',');
    const std::vector<std::string_view> expected = split(kPanelHeader, ',');
    if (header != expected) throw Error("panel csv: header must be '" + std::string(kPanelHeader) + "'");

    std::vector<std::string> order;
    std::map<std::string, CompanyRows> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string_view> f = split(line, ',');
        if (f.size() != expected.size())
            fail_at(line_no, "expected " + std::to_string(expected.size()) + " fields, found " + std::to_string(f.size()));
        if (f[0].empty()) fail_at(line_no, "missing cell in column company_id");
        if (f[1].empty()) fail_at(line_no, "missing cell in column industry");
        const std::optional<Industry> ind = parse_industry(f[1]);
        if (!ind) fail_at(line_no, "unknown industry '" + std::string(f[1]) + "'");
        const int year = parse_number<int>(f[2], line_no, "year");

        Observation o;
        o.ir = parse_number<double>(f[3], line_no, expected[3]);
        o.eq = parse_number<double>(f[4], line_no, expected[4]);
        o.mg = parse_number<double>(f[5], line_no, expected[5]);
        o.eps = parse_number<double>(f[6], line_no, expected[6]);
        o.ceo_tot = parse_number<double>(f[7], line_no, expected[7]);
        o.rev = parse_number<double>(f[8], line_no, expected[8]);
        o.earn = parse_number<double>(f[9], line_no, expected[9]);
        o.eprof = parse_number<double>(f[10], line_no, expected[10]);
        o.mcap = parse_number<double>(f[11], line_no, expected[11]);
        o.tsr = parse_number<double>(f[12], line_no, expected[12]);

        const std::string id(f[0]);
        auto it = rows.find(id);
        if (it == rows.end()) {
            order.push_back(id);
            it = rows.emplace(id, CompanyRows{*ind, {}}).first;
        } else if (it->second.industry != *ind) {
            fail_at(line_no, "company " + id + " changes industry");
        }
        if (!it->second.years.emplace(year, std::make_pair(o, line_no)).second)
            fail_at(line_no, "duplicate row for company " + id + " year " + std::to_string(year));
    }
    if (order.empty()) throw Error("panel csv: no data rows");

    int first = 0;
    int last = 0;
    bool init = false;
    for (const auto& [id, cr] : rows) {
        int prev = 0;
        bool started = false;
        for (const auto& [year, rec] : cr.years) {
            if (started && year != prev + 1)
                fail_at(rec.second, "non-contiguous years for company " + id + " (" + std::to_string(prev) + " -> " +
                                        std::to_string(year) + ")");
            prev = year;
            started = true;
        }
        const int lo = cr.years.begin()->first;
        const int hi = cr.years.rbegin()->first;
        if (!init) {
            first = lo;
            last = hi;
            init = true;
        }
        first = std::min(first, lo);
        last = std::max(last, hi);
    }

    std::vector<Company> companies;
    std::vector<Observation> cells;
    for (const std::string& id : order) {
        const CompanyRows& cr = rows.at(id);
        companies.push_back({id, cr.industry});
        for (int y = first; y <= last; ++y) {
            const auto it = cr.years.find(y);
            if (it == cr.years.end())
                throw Error("missing cell: company " + id + " has no row for year " + std::to_string(y) +
                            " (panel covers " + std::to_string(first) + "-" + std::to_string(last) + ")");
            cells.push_back(it->second.first);
        }
    }
    return PanelDataset(std::move(companies), first, last - first + 1, std::move(cells));
}

PanelDataset load_panel(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open panel file " + path.string());
    return parse_panel(in);
}

void write_panel(const PanelDataset& panel, std::ostream& out) {
    out << kPanelHeader << '\n';
    for (std::size_t c = 0; c < panel.company_count(); ++c) {
        const Company& co = panel.companies()[c];
        for (int y = panel.first_year(); y <= panel.last_year(); ++y) {
            const Observation& o = panel.at(c, y);
            out << co.id << ',' << industry_name(co.industry) << ',' << y;
            for (double v : {o.ir, o.eq, o.mg, o.eps, o.ceo_tot, o.rev, o.earn, o.eprof, o.mcap, o.tsr})
                out << ',' << format_full(v);
            out << '\n';
        }
    }
}

void write_panel(const PanelDataset& panel, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write panel file " + path.string());
    write_panel(panel, out);
    if (!out) throw Error("write failed for " + path.string());
}

namespace {

double spec_number(std::string_view key, std::string_view value) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw Error("synthetic spec: cannot parse value '" + std::string(value) + "' for key " + std::string(key));
    return v;
}

}  // namespace

SyntheticSpec parse_synthetic_spec(std::string_view text) {
    SyntheticSpec spec;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;  // tolerate table headers
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error("synthetic spec line " + std::to_string(line_no) + ": expected key = value");
        const std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);

        if (key == "n_companies") spec.n_companies = static_cast<std::size_t>(spec_number(key, value));
        else if (key == "n_years") spec.n_years = static_cast<int>(spec_number(key, value));
        else if (key == "first_year") spec.first_year = static_cast<int>(spec_number(key, value));
        else if (key == "noise_scale") spec.noise_scale = spec_number(key, value);
        else if (key == "idiosyncratic_scale") spec.idiosyncratic_scale = spec_number(key, value);
        else if (key == "tail_df") spec.tail_df = spec_number(key, value);
        else if (key == "contamination") spec.contamination = spec_number(key, value);
        else if (key == "ceo_signal") spec.ceo_signal = spec_number(key, value);
        else if (key == "window_length") spec.window_length = static_cast<int>(spec_number(key, value));
        else if (key == "horizon") spec.horizon = static_cast<int>(spec_number(key, value));
        else if (key == "tail") {
            if (value == "normal") spec.tail = NoiseTail::normal;
            else if (value == "student_t") spec.tail = NoiseTail::student_t;
            else throw Error("synthetic spec: tail must be normal or student_t");
        } else if (key == "true_alpha") {
            if (value.size() < 2 || value.front() != '[' || value.back() != ']')
                throw Error("synthetic spec: true_alpha must be a bracketed list");
            const std::vector<std::string_view> parts = split(value.substr(1, value.size() - 2), ',');
            if (parts.size() != spec.true_alpha.size()) throw Error("synthetic spec: true_alpha needs 5 entries");
            for (std::size_t j = 0; j < parts.size(); ++j) spec.true_alpha[j] = spec_number(key, parts[j]);
        } else {
            throw Error("synthetic spec: unknown key '" + std::string(key) + "'");
        }
    }
    spec.validate();
    return spec;
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open synthetic spec " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_synthetic_spec(ss.str());
}

}  // namespace crq
