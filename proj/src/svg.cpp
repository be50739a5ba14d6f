#include "tzinf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace tzinf {

namespace {

const char* const kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d"};

std::string fmt(double x, int digits = 2) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string escape(const std::string& s) {
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

class Canvas {
public:
    Canvas(double w, double h) : w_(w), h_(h) {}

    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0,
              const std::string& extra = "") {
        os_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2) << "\" y2=\"" << fmt(y2)
            << "\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt(width, 1) << '"' << extra << "/>\n";
    }
    void rect(double x, double y, double w, double h, const std::string& fill, const std::string& stroke) {
        os_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
            << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
    }
    void circle(double x, double y, double r, const std::string& fill) {
        os_ << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"" << fmt(r, 1) << "\" fill=\"" << fill
            << "\"/>\n";
    }
    void text(double x, double y, const std::string& s, const std::string& anchor = "start", int size = 11) {
        os_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-family=\"sans-serif\" font-size=\"" << size
            << "\" text-anchor=\"" << anchor << "\">" << escape(s) << "</text>\n";
    }
    std::string str() const {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w_, 0) << "\" height=\"" << fmt(h_, 0)
            << "\" viewBox=\"0 0 " << fmt(w_, 0) << ' ' << fmt(h_, 0) << "\">\n"
            << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" "
               "markerHeight=\"6\" orient=\"auto-start-reverse\"><path d=\"M0,0 L10,5 L0,10 z\"/></marker></defs>\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << os_.str() << "</svg>\n";
        return out.str();
    }

private:
    double w_, h_;
    std::ostringstream os_;
};

// Roughly five round tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (span / step <= 6.0) break;
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(t);
    return out;
}

} // namespace

std::string interval_plot_svg(const std::vector<InferenceResult>& results, const std::string& title) {
    std::vector<int> vars;
    std::vector<Method> methods;
    for (const auto& r : results) {
        if (std::find(vars.begin(), vars.end(), r.variable) == vars.end()) vars.push_back(r.variable);
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : results) {
        if (r.failed) continue;
        for (double v : {r.interval.lower, r.interval.upper, r.point_estimate, 0.0}) {
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (!(lo < hi)) {
        lo = -1.0;
        hi = 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const double left = 130, right = 30, top = 60, row = 12, gap = 10;
    const double band = row * static_cast<double>(std::max<size_t>(methods.size(), 1)) + gap;
    const double width = 760, height = top + band * static_cast<double>(vars.size()) + 50;
    const double plot_w = width - left - right;
    auto X = [&](double v) { return left + (v - lo) / (hi - lo) * plot_w; };

    Canvas c(width, height);
    c.text(width / 2, 20, title, "middle", 14);
    for (size_t m = 0; m < methods.size(); ++m) {
        const double lx = left + static_cast<double>(m) * 90.0;
        c.line(lx, 38, lx + 18, 38, kPalette[m % 7], 3);
        c.text(lx + 22, 42, to_string(methods[m]));
    }
    const double axis_y = top + band * static_cast<double>(vars.size());
    c.line(left, axis_y, width - right, axis_y, "#333");
    for (double t : ticks(lo, hi)) {
        c.line(X(t), axis_y, X(t), axis_y + 4, "#333");
        c.text(X(t), axis_y + 16, fmt(t, 2), "middle", 10);
    }
    if (lo < 0 && hi > 0) c.line(X(0), top - 4, X(0), axis_y, "#999", 1, " stroke-dasharray=\"3,3\"");

    for (size_t v = 0; v < vars.size(); ++v) {
        const double y0 = top + band * static_cast<double>(v);
        std::string name;
        for (const auto& r : results)
            if (r.variable == vars[v]) name = r.name;
        c.text(left - 8, y0 + band / 2, name, "end");
        for (const auto& r : results) {
            if (r.variable != vars[v] || r.failed) continue;
            const size_t m = static_cast<size_t>(std::find(methods.begin(), methods.end(), r.method) - methods.begin());
            const double y = y0 + row * (static_cast<double>(m) + 0.5);
            const char* col = kPalette[m % 7];
            const double a = std::isfinite(r.interval.lower) ? X(r.interval.lower) : left;
            const double b = std::isfinite(r.interval.upper) ? X(r.interval.upper) : width - right;
            std::string markers;
            if (!std::isfinite(r.interval.lower)) markers += " marker-start=\"url(#arrow)\"";
            if (!std::isfinite(r.interval.upper)) markers += " marker-end=\"url(#arrow)\"";
            c.line(a, y, b, y, col, 2, markers);
            if (std::isfinite(r.point_estimate)) c.circle(X(r.point_estimate), y, 3, col);
        }
    }
    return c.str();
}

std::string length_boxplot_svg(const StudyReport& report, const std::string& title) {
    const size_t nm = report.methods.size();
    double top_len = 0.0;
    for (const auto& m : report.methods)
        for (double l : m.lengths)
            if (std::isfinite(l)) top_len = std::max(top_len, l);
    if (!(top_len > 0.0)) top_len = 1.0;

    const double left = 60, right = 20, top = 40, bottom = 70, slot = 90;
    const double width = left + right + slot * static_cast<double>(std::max<size_t>(nm, 1));
    const double height = 420;
    const double plot_h = height - top - bottom;
    const double ymax = top_len * 1.05;
    auto Y = [&](double v) { return top + plot_h * (1.0 - v / ymax); };

    Canvas c(width, height);
    c.text(width / 2, 20, title, "middle", 14);
    c.line(left, top, left, top + plot_h, "#333");
    c.line(left, top + plot_h, width - right, top + plot_h, "#333");
    for (double t : ticks(0.0, ymax)) {
        c.line(left - 4, Y(t), left, Y(t), "#333");
        c.text(left - 6, Y(t) + 4, fmt(t, 2), "end", 10);
    }
    c.text(14, top + plot_h / 2, "length", "middle", 11);

    for (size_t m = 0; m < nm; ++m) {
        const MethodSummary& s = report.methods[m];
        const double cx = left + slot * (static_cast<double>(m) + 0.5);
        const char* col = kPalette[m % 7];
        c.text(cx, top + plot_h + 16, to_string(s.method), "middle");
        if (s.lengths.empty()) {
            c.text(cx, top + plot_h + 30, "no intervals", "middle", 10);
            continue;
        }
        std::vector<double> v = s.lengths;
        for (double& l : v)
            if (!std::isfinite(l)) l = top_len;
        const double q1 = quantile(v, 0.25), med = quantile(v, 0.5), q3 = quantile(v, 0.75);
        const double lo = *std::min_element(v.begin(), v.end());
        const double hi = *std::max_element(v.begin(), v.end());
        c.line(cx, Y(lo), cx, Y(q1), "#333");
        c.line(cx, Y(q3), cx, Y(hi), "#333");
        c.line(cx - 10, Y(lo), cx + 10, Y(lo), "#333");
        c.line(cx - 10, Y(hi), cx + 10, Y(hi), "#333");
        c.rect(cx - 25, Y(q3), 50, std::max(0.5, Y(q1) - Y(q3)), col, "#333");
        c.line(cx - 25, Y(med), cx + 25, Y(med), "#000", 2);
        c.text(cx, top + plot_h + 30, "cov " + fmt(s.coverage, 3), "middle", 10);
        c.text(cx, top + plot_h + 44, "inf " + fmt(100.0 * s.infinite_proportion, 1) + "%", "middle", 10);
    }
    return c.str();
}

} // namespace tzinf
