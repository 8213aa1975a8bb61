#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "glucam/core.hpp"

namespace glucam {

/// Minimal deterministic SVG line/scatter plot. Diagnostic output only;
/// no external plotting dependency.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void set_range(double x_min, double x_max, double y_min, double y_max) {
        x_min_ = x_min;
        x_max_ = x_max;
        y_min_ = y_min;
        y_max_ = y_max;
        fixed_range_ = true;
    }

    void add_line(const std::vector<std::pair<double, double>>& points, const std::string& color,
                  double width = 1.5) {
        lines_.push_back({points, color, width});
        grow_range(points);
    }

    void add_scatter(const std::vector<std::pair<double, double>>& points,
                     const std::string& color, double radius = 2.5) {
        scatters_.push_back({points, color, radius});
        grow_range(points);
    }

    void add_label(double x, double y, const std::string& text) {
        labels_.push_back({x, y, text});
    }

    std::string render() const {
        const double width = 640.0, height = 480.0;
        const double ml = 60.0, mr = 20.0, mt = 40.0, mb = 50.0;
        const double pw = width - ml - mr, ph = height - mt - mb;

        double x0 = x_min_, x1 = x_max_, y0 = y_min_, y1 = y_max_;
        if (x1 <= x0) x1 = x0 + 1.0;
        if (y1 <= y0) y1 = y0 + 1.0;
        const auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
        const auto py = [&](double y) { return mt + ph - (y - y0) / (y1 - y0) * ph; };

        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width)
            << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width) << ' '
            << num(height) << "\">\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out << "<text x=\"" << num(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"16\">" << title_ << "</text>\n";

        // frame and ticks
        out << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw)
            << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int i = 0; i <= 5; ++i) {
            const double fx = x0 + (x1 - x0) * i / 5.0;
            const double fy = y0 + (y1 - y0) * i / 5.0;
            out << "<line x1=\"" << num(px(fx)) << "\" y1=\"" << num(mt + ph) << "\" x2=\""
                << num(px(fx)) << "\" y2=\"" << num(mt + ph + 5) << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(mt + ph + 18)
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
                << num(fx) << "</text>\n";
            out << "<line x1=\"" << num(ml - 5) << "\" y1=\"" << num(py(fy)) << "\" x2=\""
                << num(ml) << "\" y2=\"" << num(py(fy)) << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(py(fy) + 3)
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(fy)
                << "</text>\n";
        }
        out << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(height - 12)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label_
            << "</text>\n";
        out << "<text x=\"16\" y=\"" << num(mt + ph / 2)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
            << "transform=\"rotate(-90 16 " << num(mt + ph / 2) << ")\">" << y_label_
            << "</text>\n";

        for (const auto& line : lines_) {
            out << "<polyline fill=\"none\" stroke=\"" << line.color << "\" stroke-width=\""
                << num(line.width) << "\" points=\"";
            for (const auto& [x, y] : line.points) out << num(px(x)) << ',' << num(py(y)) << ' ';
            out << "\"/>\n";
        }
        for (const auto& sc : scatters_) {
            for (const auto& [x, y] : sc.points)
                out << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\""
                    << num(sc.radius) << "\" fill=\"" << sc.color << "\"/>\n";
        }
        for (const auto& label : labels_) {
            out << "<text x=\"" << num(px(label.x)) << "\" y=\"" << num(py(label.y))
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
                << label.text << "</text>\n";
        }
        out << "</svg>\n";
        return out.str();
    }

private:
    struct Line {
        std::vector<std::pair<double, double>> points;
        std::string color;
        double width;
    };
    struct Scatter {
        std::vector<std::pair<double, double>> points;
        std::string color;
        double radius;
    };
    struct Label {
        double x, y;
        std::string text;
    };

    static std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return buf;
    }

    void grow_range(const std::vector<std::pair<double, double>>& points) {
        if (fixed_range_) return;
        for (const auto& [x, y] : points) {
            x_min_ = std::min(x_min_, x);
            x_max_ = std::max(x_max_, x);
            y_min_ = std::min(y_min_, y);
            y_max_ = std::max(y_max_, y);
        }
    }

    std::string title_, x_label_, y_label_;
    double x_min_ = 0.0, x_max_ = 0.0, y_min_ = 0.0, y_max_ = 0.0;
    bool fixed_range_ = false;
    std::vector<Line> lines_;
    std::vector<Scatter> scatters_;
    std::vector<Label> labels_;
};

}  // namespace glucam
