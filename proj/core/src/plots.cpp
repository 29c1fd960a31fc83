#include "crq/plots.hpp"

#include "crq/error.hpp"
#include "crq/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace crq {

QqData qq_pairs(const Eigen::VectorXd& fitted, const Eigen::VectorXd& observed) {
    if (fitted.size() != observed.size()) throw Error("qq_pairs: length mismatch");
    QqData out;
    out.fitted.assign(fitted.data(), fitted.data() + fitted.size());
    out.observed.assign(observed.data(), observed.data() + observed.size());
    std::sort(out.fitted.begin(), out.fitted.end());
    std::sort(out.observed.begin(), out.observed.end());
    return out;
}

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::vector<ScatterPanel> figure_index_panels(const WindowAnalysis& a, QuantileLevel tau) {
    const std::string year = std::to_string(a.ahead.target_year);
    ScatterPanel by_index{year + ": response index vs prediction index", "prediction index", "response index", {}};
    by_index.series.push_back({"Index", to_vec(a.ahead.index), to_vec(a.ahead.response_index),
                               quantile_line(a.ahead.index, a.ahead.response_index, tau)});
    ScatterPanel by_ceo{year + ": response index vs CEOtot", "CEOtot", "response index", {}};
    by_ceo.series.push_back({"CEOtot", to_vec(a.baselines.ceo), to_vec(a.ahead.response_index),
                             quantile_line(a.baselines.ceo, a.ahead.response_index, tau)});
    return {by_index, by_ceo};
}

std::vector<ScatterPanel> figure_response_panels(const WindowAnalysis& a) {
    std::vector<ScatterPanel> out;
    for (std::size_t j = 0; j < kResponseCount; ++j) {
        const std::string name(kResponseLabels[j]);
        const Eigen::VectorXd y = a.ahead.observed.col(static_cast<Eigen::Index>(j));
        ScatterPanel pi{name + " vs prediction index", "prediction index", name, {}};
        pi.series.push_back({"Index", to_vec(a.ahead.index), to_vec(y), a.ahead.lines[j]});
        ScatterPanel pc{name + " vs CEOtot", "CEOtot", name, {}};
        pc.series.push_back({"CEOtot", to_vec(a.baselines.ceo), to_vec(y), a.baselines.ceo_rq_lines[j]});
        out.push_back(std::move(pi));
        out.push_back(std::move(pc));
    }
    return out;
}

std::vector<ScatterPanel> figure_qq_panels(const WindowAnalysis& a) {
    std::vector<ScatterPanel> out;
    for (std::size_t j = 0; j < kResponseCount; ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        const std::string name(kResponseLabels[j]);
        ScatterPanel p{name + ": Q-Q fit vs response", "sorted fit", "sorted " + name, {}};
        const QqData qi = qq_pairs(a.ahead.predicted.col(col), a.ahead.observed.col(col));
        const QqData qc = qq_pairs(a.baselines.ceo_rq.col(col), a.ahead.observed.col(col));
        p.series.push_back({"Index", qi.fitted, qi.observed, std::nullopt});
        p.series.push_back({"CEOtot", qc.fitted, qc.observed, std::nullopt});
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string label_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

}  // namespace

std::string render_svg(const std::vector<ScatterPanel>& panels, int columns) {
    constexpr double kW = 340.0, kH = 280.0, kLeft = 50.0, kRight = 15.0, kTop = 30.0, kBottom = 40.0;
    columns = std::max(1, columns);
    const int rows = static_cast<int>((panels.size() + static_cast<std::size_t>(columns) - 1) / static_cast<std::size_t>(columns));

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kW * columns) << "\" height=\""
        << num(kH * std::max(rows, 1)) << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t k = 0; k < panels.size(); ++k) {
        const ScatterPanel& p = panels[k];
        const double ox = kW * static_cast<double>(k % static_cast<std::size_t>(columns));
        const double oy = kH * static_cast<double>(k / static_cast<std::size_t>(columns));
        const double pw = kW - kLeft - kRight;
        const double ph = kH - kTop - kBottom;

        double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
        for (const ScatterSeries& s : p.series) {
            for (double v : s.x) xlo = std::min(xlo, v), xhi = std::max(xhi, v);
            for (double v : s.y) ylo = std::min(ylo, v), yhi = std::max(yhi, v);
        }
        if (!(xlo <= xhi)) xlo = 0.0, xhi = 1.0;
        if (!(ylo <= yhi)) ylo = 0.0, yhi = 1.0;
        if (xhi - xlo <= 0.0) xlo -= 0.5, xhi += 0.5;
        if (yhi - ylo <= 0.0) ylo -= 0.5, yhi += 0.5;
        const double xm = 0.05 * (xhi - xlo), ym = 0.05 * (yhi - ylo);
        xlo -= xm, xhi += xm, ylo -= ym, yhi += ym;
        const auto sx = [&](double x) { return ox + kLeft + (x - xlo) / (xhi - xlo) * pw; };
        const auto sy = [&](double y) { return oy + kTop + (1.0 - (y - ylo) / (yhi - ylo)) * ph; };

        svg << "<g>\n<clipPath id=\"clip" << k << "\"><rect x=\"" << num(ox + kLeft) << "\" y=\"" << num(oy + kTop)
            << "\" width=\"" << num(pw) << "\" height=\"" << num(ph) << "\"/></clipPath>\n";
        svg << "<text x=\"" << num(ox + kW / 2) << "\" y=\"" << num(oy + 16) << "\" text-anchor=\"middle\" font-size=\"11\">"
            << escape(p.title) << "</text>\n";
        svg << "<rect x=\"" << num(ox + kLeft) << "\" y=\"" << num(oy + kTop) << "\" width=\"" << num(pw)
            << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << num(ox + kLeft + pw / 2) << "\" y=\"" << num(oy + kH - 8)
            << "\" text-anchor=\"middle\">" << escape(p.x_label) << "</text>\n";
        svg << "<text x=\"" << num(ox + 12) << "\" y=\"" << num(oy + kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
            << num(ox + 12) << ' ' << num(oy + kTop + ph / 2) << ")\">" << escape(p.y_label) << "</text>\n";
        svg << "<text x=\"" << num(ox + kLeft) << "\" y=\"" << num(oy + kTop + ph + 12) << "\">" << label_num(xlo) << "</text>\n";
        svg << "<text x=\"" << num(ox + kLeft + pw) << "\" y=\"" << num(oy + kTop + ph + 12) << "\" text-anchor=\"end\">"
            << label_num(xhi) << "</text>\n";
        svg << "<text x=\"" << num(ox + kLeft - 3) << "\" y=\"" << num(oy + kTop + ph) << "\" text-anchor=\"end\">"
            << label_num(ylo) << "</text>\n";
        svg << "<text x=\"" << num(ox + kLeft - 3) << "\" y=\"" << num(oy + kTop + 8) << "\" text-anchor=\"end\">"
            << label_num(yhi) << "</text>\n";

        svg << "<g clip-path=\"url(#clip" << k << ")\">\n";
        for (std::size_t s = 0; s < p.series.size(); ++s) {
            const ScatterSeries& ser = p.series[s];
            const char* color = kColors[s % 4];
            for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i)
                svg << "<circle cx=\"" << num(sx(ser.x[i])) << "\" cy=\"" << num(sy(ser.y[i])) << "\" r=\"2\" fill=\""
                    << color << "\" fill-opacity=\"0.6\"/>\n";
            if (ser.line)
                svg << "<line x1=\"" << num(sx(xlo)) << "\" y1=\"" << num(sy(ser.line->at(xlo))) << "\" x2=\""
                    << num(sx(xhi)) << "\" y2=\"" << num(sy(ser.line->at(xhi))) << "\" stroke=\"" << color
                    << "\" stroke-width=\"1.5\"/>\n";
        }
        svg << "</g>\n";
        if (p.series.size() > 1)
            for (std::size_t s = 0; s < p.series.size(); ++s)
                svg << "<text x=\"" << num(ox + kLeft + 6) << "\" y=\"" << num(oy + kTop + 12 + 12 * static_cast<double>(s))
                    << "\" fill=\"" << kColors[s % 4] << "\">" << escape(p.series[s].label) << "</text>\n";
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

void emit_plot_data(const std::vector<PredictionReport>& reports, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ostringstream f1, f1l, f2, f2l, f3;
    f1 << "tau,target_year,row,prediction_index,ceo,response_index\n";
    f1l << "tau,target_year,x_variable,intercept,slope\n";
    f2 << "tau,target_year,row,response,prediction_index,ceo,observed\n";
    f2l << "tau,target_year,response,predictor,intercept,slope\n";
    f3 << "tau,target_year,response,method,rank,fitted,observed\n";

    for (const PredictionReport& r : reports) {
        const std::string tau = format_full(r.tau);
        for (const WindowReport& w : r.windows) {
            const WindowAnalysis& a = w.analysis;
            const std::string year = std::to_string(a.ahead.target_year);
            for (Eigen::Index i = 0; i < a.ahead.index.size(); ++i)
                f1 << tau << ',' << year << ',' << i << ',' << format_full(a.ahead.index(i)) << ','
                   << format_full(a.baselines.ceo(i)) << ',' << format_full(a.ahead.response_index(i)) << '\n';
            for (const ScatterPanel& p : figure_index_panels(a, QuantileLevel(r.tau))) {
                const Line& l = *p.series.front().line;
                f1l << tau << ',' << year << ',' << p.x_label << ',' << format_full(l.intercept) << ','
                    << format_full(l.slope) << '\n';
            }
            for (std::size_t j = 0; j < kResponseCount; ++j) {
                const auto col = static_cast<Eigen::Index>(j);
                for (Eigen::Index i = 0; i < a.ahead.index.size(); ++i)
                    f2 << tau << ',' << year << ',' << i << ',' << kResponseLabels[j] << ','
                       << format_full(a.ahead.index(i)) << ',' << format_full(a.baselines.ceo(i)) << ','
                       << format_full(a.ahead.observed(i, col)) << '\n';
                f2l << tau << ',' << year << ',' << kResponseLabels[j] << ",index," << format_full(a.ahead.lines[j].intercept)
                    << ',' << format_full(a.ahead.lines[j].slope) << '\n';
                f2l << tau << ',' << year << ',' << kResponseLabels[j] << ",ceo,"
                    << format_full(a.baselines.ceo_rq_lines[j].intercept) << ','
                    << format_full(a.baselines.ceo_rq_lines[j].slope) << '\n';
                const QqData qi = qq_pairs(a.ahead.predicted.col(col), a.ahead.observed.col(col));
                const QqData qc = qq_pairs(a.baselines.ceo_rq.col(col), a.ahead.observed.col(col));
                for (std::size_t k = 0; k < qi.fitted.size(); ++k)
                    f3 << tau << ',' << year << ',' << kResponseLabels[j] << ",index," << k << ','
                       << format_full(qi.fitted[k]) << ',' << format_full(qi.observed[k]) << '\n';
                for (std::size_t k = 0; k < qc.fitted.size(); ++k)
                    f3 << tau << ',' << year << ',' << kResponseLabels[j] << ",ceo," << k << ','
                       << format_full(qc.fitted[k]) << ',' << format_full(qc.observed[k]) << '\n';
            }
        }
    }
    write_text(dir / "fig1.csv", f1.str());
    write_text(dir / "fig1_lines.csv", f1l.str());
    write_text(dir / "fig2.csv", f2.str());
    write_text(dir / "fig2_lines.csv", f2l.str());
    write_text(dir / "fig3.csv", f3.str());

    if (reports.empty() || reports.front().windows.empty()) return;
    const WindowAnalysis& first = reports.front().windows.front().analysis;
    write_text(dir / "fig1.svg", render_svg(figure_index_panels(first, QuantileLevel(reports.front().tau)), 2));
    write_text(dir / "fig2.svg", render_svg(figure_response_panels(first), 2));
    write_text(dir / "fig3.svg", render_svg(figure_qq_panels(first), 3));
}

}  // namespace crq
