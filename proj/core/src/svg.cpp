#include "effortnn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "effortnn/error.hpp"
#include "effortnn/numeric.hpp"
#include "effortnn/table_io.hpp"

namespace effortnn {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 80, kRight = 20, kTop = 40, kBottom = 60;

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Rounds the upper axis bound up to 1, 2 or 5 times a power of ten.
double nice_ceiling(double v) {
    if (!(v > 0)) return 1.0;
    const double p = std::pow(10.0, std::floor(std::log10(v)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * p >= v) return m * p;
    }
    return 10 * p;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void open_svg(std::ostringstream& out, std::string_view title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<title>" << escape(title) << "</title>\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text class=\"title\" x=\"" << px(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(title) << "</text>\n";
}

void y_axis(std::ostringstream& out, double y_max, std::string_view label) {
    const double plot_h = kHeight - kTop - kBottom;
    out << "<line class=\"axis\" x1=\"" << px(kLeft) << "\" y1=\"" << px(kTop) << "\" x2=\"" << px(kLeft) << "\" y2=\""
        << px(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = y_max * i / 5.0;
        const double y = kHeight - kBottom - plot_h * i / 5.0;
        out << "<text x=\"" << px(kLeft - 6) << "\" y=\"" << px(y + 4) << "\" text-anchor=\"end\">" << tick_label(v)
            << "</text>\n";
    }
    out << "<text x=\"18\" y=\"" << px(kTop + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << px(kTop + plot_h / 2) << ")\">" << escape(label) << "</text>\n";
}

}  // namespace

std::string scatter_svg(std::string_view title, std::span<const ProjectRecord> records) {
    double x_max = 0, y_max = 0;
    for (const auto& r : records) {
        x_max = std::max(x_max, r.afp.value_or(0.0));
        y_max = std::max(y_max, r.normalised_effort.value_or(0.0));
    }
    x_max = nice_ceiling(x_max);
    y_max = nice_ceiling(y_max);
    const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;

    std::ostringstream out;
    open_svg(out, title);
    y_axis(out, y_max, "Effort (person-hours)");
    out << "<line class=\"axis\" x1=\"" << px(kLeft) << "\" y1=\"" << px(kHeight - kBottom) << "\" x2=\""
        << px(kWidth - kRight) << "\" y2=\"" << px(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double x = kLeft + plot_w * i / 5.0;
        out << "<text x=\"" << px(x) << "\" y=\"" << px(kHeight - kBottom + 16) << "\" text-anchor=\"middle\">"
            << tick_label(x_max * i / 5.0) << "</text>\n";
    }
    out << "<text x=\"" << px(kLeft + plot_w / 2) << "\" y=\"" << px(kHeight - 14)
        << "\" text-anchor=\"middle\">Size (adjusted function points)</text>\n";
    out << "<g class=\"points\" fill=\"steelblue\" fill-opacity=\"0.7\">\n";
    for (const auto& r : records) {
        if (!r.afp || !r.normalised_effort) continue;
        const double x = kLeft + plot_w * (*r.afp / x_max);
        const double y = kHeight - kBottom - plot_h * (*r.normalised_effort / y_max);
        out << "<circle class=\"point\" cx=\"" << px(x) << "\" cy=\"" << px(y) << "\" r=\"3\"><title>"
            << escape(r.project_id) << "</title></circle>\n";
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

IntervalGroup interval_of(std::string model, std::span<const double> abs_residuals) {
    if (abs_residuals.empty()) throw DomainError("interval_of: no residuals for " + model);
    IntervalGroup g;
    g.model = std::move(model);
    g.n = abs_residuals.size();
    g.mean = mean_of(abs_residuals);
    g.half_width = g.n > 1 ? 1.96 * sample_sd(abs_residuals) / std::sqrt(static_cast<double>(g.n)) : 0.0;
    return g;
}

std::vector<IntervalGroup> interval_groups(const BenchmarkReport& report, std::string_view dataset) {
    std::vector<IntervalGroup> groups;
    for (const auto& m : report.models) {
        const auto* c = report.cell(dataset, m);
        if (c && c->ok && !c->abs_residuals.empty()) groups.push_back(interval_of(m, c->abs_residuals));
    }
    return groups;
}

std::string interval_svg(std::string_view title, std::span<const IntervalGroup> groups) {
    double y_max = 0;
    for (const auto& g : groups) y_max = std::max(y_max, g.mean + g.half_width);
    y_max = nice_ceiling(y_max);
    const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
    auto y_of = [&](double v) { return kHeight - kBottom - plot_h * (std::max(v, 0.0) / y_max); };

    std::ostringstream out;
    open_svg(out, title);
    y_axis(out, y_max, "Absolute residual (person-hours)");
    out << "<line class=\"axis\" x1=\"" << px(kLeft) << "\" y1=\"" << px(kHeight - kBottom) << "\" x2=\""
        << px(kWidth - kRight) << "\" y2=\"" << px(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
    const double slot = groups.empty() ? plot_w : plot_w / static_cast<double>(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        const double x = kLeft + slot * (static_cast<double>(i) + 0.5);
        const double lo = y_of(g.mean - g.half_width), hi = y_of(g.mean + g.half_width), mid = y_of(g.mean);
        out << "<g class=\"whisker\" data-model=\"" << escape(g.model) << "\" data-mean=\"" << format_double(g.mean)
            << "\" data-half-width=\"" << format_double(g.half_width) << "\" data-n=\"" << g.n << "\">\n";
        out << "  <line x1=\"" << px(x) << "\" y1=\"" << px(lo) << "\" x2=\"" << px(x) << "\" y2=\"" << px(hi)
            << "\" stroke=\"black\"/>\n";
        for (double y : {lo, hi}) {
            out << "  <line x1=\"" << px(x - 10) << "\" y1=\"" << px(y) << "\" x2=\"" << px(x + 10) << "\" y2=\"" << px(y)
                << "\" stroke=\"black\"/>\n";
        }
        out << "  <circle cx=\"" << px(x) << "\" cy=\"" << px(mid) << "\" r=\"4\" fill=\"firebrick\"/>\n";
        out << "  <text x=\"" << px(x) << "\" y=\"" << px(kHeight - kBottom + 16) << "\" text-anchor=\"middle\">"
            << escape(g.model) << "</text>\n";
        out << "</g>\n";
    }
    out << "<text class=\"legend\" x=\"" << px(kLeft) << "\" y=\"" << px(kHeight - 14)
        << "\">Dot: mean absolute residual. Whiskers: mean +/- 1.96 * sd / sqrt(n) of the absolute residuals "
           "(95% normal interval).</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace effortnn
