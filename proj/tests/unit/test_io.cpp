#include "crq/error.hpp"
#include "crq/io.hpp"
#include "crq/synthetic.hpp"
#include "panel_fixtures.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

namespace {

std::string two_company_csv() {
    std::ostringstream out;
    out << crq::kPanelHeader << '\n';
    for (const char* id : {"A", "B"})
        for (int y = 2009; y < 2019; ++y)
            out << id << ',' << (id[0] == 'A' ? "tech" : "utility") << ',' << y << ",1,0.1,0.9,0.01,12,5e9,4e8,1e9,2e10,3e8\n";
    return out.str();
}

crq::PanelDataset parse(const std::string& text) {
    std::istringstream in(text);
    return crq::parse_panel(in);
}

std::string replace_line(const std::string& text, int line, const std::string& replacement) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string l;
    int n = 0;
    while (std::getline(in, l)) {
        ++n;
        if (n == line) {
            if (!replacement.empty()) out << replacement << '\n';
        } else {
            out << l << '\n';
        }
    }
    return out.str();
}

}  // namespace

TEST_CASE("valid two-company panel") {
    const auto panel = parse(two_company_csv());
    CHECK(panel.company_count() == 2);
    CHECK(panel.year_count() == 10);
    CHECK(panel.company_count() * static_cast<std::size_t>(panel.year_count()) == 20);
    CHECK(panel.companies()[1].industry == crq::Industry::utility);
    CHECK(panel.at(0, 2012).ceo_tot == 12.0);
}

TEST_CASE("row-level errors carry the row number") {
    const std::string csv = two_company_csv();
    CHECK_THROWS_WITH_AS(parse(replace_line(csv, 3, "A,airline,2010,1,0.1,0.9,0.01,12,5e9,4e8,1e9,2e10,3e8")),
                         doctest::Contains("row 3: unknown industry 'airline'"), crq::Error);
    CHECK_THROWS_WITH_AS(parse(replace_line(csv, 4, "")), doctest::Contains("non-contiguous years"), crq::Error);
    CHECK_THROWS_WITH_AS(parse(replace_line(csv, 4, "A,tech,2010,1,0.1,0.9,0.01,12,5e9,4e8,1e9,2e10,3e8")),
                         doctest::Contains("duplicate"), crq::Error);
    CHECK_THROWS_WITH_AS(parse(replace_line(csv, 5, "A,tech,2012,1,,0.9,0.01,12,5e9,4e8,1e9,2e10,3e8")),
                         doctest::Contains("row 5: missing cell"), crq::Error);
    CHECK_THROWS_WITH_AS(parse(replace_line(csv, 5, "A,health,2012,1,0.1,0.9,0.01,12,5e9,4e8,1e9,2e10,3e8")),
                         doctest::Contains("changes industry"), crq::Error);
    CHECK_THROWS_AS(parse(replace_line(csv, 1, "id,industry,year")), crq::Error);
    CHECK_THROWS_WITH_AS(parse(replace_line(csv, 2, "")), doctest::Contains("missing cell"), crq::Error);
    CHECK_THROWS_AS(crq::load_panel("/nonexistent/panel.csv"), crq::Error);
}

TEST_CASE("synthetic panel round-trips through CSV") {
    const auto panel = crq::test::small_synthetic(11, 30, 10);
    std::stringstream buf;
    crq::write_panel(panel, buf);
    const auto back = crq::parse_panel(buf);
    CHECK(back == panel);

    const auto path = std::filesystem::temp_directory_path() / "crq_roundtrip_test.csv";
    crq::write_panel(panel, path);
    CHECK(crq::load_panel(path) == panel);
    std::filesystem::remove(path);
}

TEST_CASE("format_full is shortest round-trip") {
    CHECK(crq::format_full(0.1) == "0.1");
    CHECK(crq::format_full(1e21) == "1e+21");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(crq::format_full(x)) == x);
}

TEST_CASE("synthetic generator") {
    crq::SyntheticSpec spec;
    spec.n_companies = 40;
    const auto a = crq::gen_synthetic(spec, 5);
    const auto b = crq::gen_synthetic(spec, 5);
    CHECK(a == b);
    CHECK_FALSE(a == crq::gen_synthetic(spec, 6));
    CHECK(a.company_count() == 40);
    CHECK(a.year_count() == 10);
    CHECK(a.first_year() == 2009);

    spec.contamination = 0.0;
    const auto clean = crq::gen_synthetic(spec, 5);
    for (std::size_t c = 0; c < clean.company_count(); ++c)
        for (int y = clean.first_year(); y <= clean.last_year(); ++y) CHECK(clean.at(c, y).eprof > 0.0);

    spec.contamination = 0.5;
    const auto dirty = crq::gen_synthetic(spec, 5);
    int negative = 0;
    for (std::size_t c = 0; c < dirty.company_count(); ++c)
        for (int y = dirty.first_year(); y <= dirty.last_year(); ++y) negative += dirty.at(c, y).tsr < 0.0;
    CHECK(negative > 100);

    crq::SyntheticSpec heavy;
    heavy.tail = crq::NoiseTail::student_t;
    CHECK(crq::gen_synthetic(heavy, 1).company_count() == 100);

    crq::SyntheticSpec bad;
    bad.n_years = 8;
    CHECK_THROWS_AS(crq::gen_synthetic(bad, 1), crq::Error);
    bad = {};
    bad.contamination = 1.0;
    CHECK_THROWS_AS(crq::gen_synthetic(bad, 1), crq::Error);
}

TEST_CASE("synthetic spec parsing") {
    const auto spec = crq::parse_synthetic_spec(
        "# low-noise run\n"
        "[panel]\n"
        "n_companies = 80\n"
        "n_years = 11   # one extra year\n"
        "tail = \"student_t\"\n"
        "true_alpha = [0.5, 0.5, 0, 0, 0]\n"
        "contamination = 0\n");
    CHECK(spec.n_companies == 80);
    CHECK(spec.n_years == 11);
    CHECK(spec.tail == crq::NoiseTail::student_t);
    CHECK(spec.true_alpha[1] == 0.5);
    CHECK(spec.contamination == 0.0);
    CHECK_THROWS_AS(crq::parse_synthetic_spec("colour = blue\n"), crq::Error);
    CHECK_THROWS_AS(crq::parse_synthetic_spec("n_years = ten\n"), crq::Error);
    CHECK_THROWS_AS(crq::parse_synthetic_spec("true_alpha = [1, 0]\n"), crq::Error);
    CHECK_THROWS_AS(crq::parse_synthetic_spec("n_years 10\n"), crq::Error);
}
