#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stylometer/common.hpp"
#include "stylometer/mds.hpp"

namespace stylo {

struct PlotStyle {
    int width = 800;
    int height = 600;
    int margin = 60;
    double marker_radius = 4.0;
    // Wong's colorblind-safe palette, 8 entries keyed by label index.
    std::vector<std::string> palette = {"#e69f00", "#56b4e9", "#009e73", "#f0e442",
                                        "#0072b2", "#d55e00", "#cc79a7", "#999999"};

    void validate() const {
        if (width <= 0 || height <= 0 || margin < 0) throw StyloError("plot style: bad dimensions");
        const std::size_t head = std::min<std::size_t>(palette.size(), 8);
        for (std::size_t i = 0; i < head; ++i)
            for (std::size_t j = i + 1; j < head; ++j)
                if (palette[i] == palette[j])
                    throw StyloError("plot style: duplicate color among the first 8");
    }
};

struct LabeledPoint {
    double x = 0.0;
    double y = 0.0;
    std::string label;
};

/// Data-space rectangle shared by scatter and circle plots so the two can be
/// overlaid; when absent, each plot derives it from its own data.
struct DataBounds {
    double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
};

namespace viz_detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string px(double v) { return format_fixed(v, 3); }

/// Uniform data->pixel transform (equal x/y scale so circles stay circular),
/// data bounds padded by 5%.
struct Transform {
    double scale = 1.0;
    double mid_x = 0.0, mid_y = 0.0;      // data-space center
    double cx = 0.0, cy = 0.0;            // pixel-space center

    static Transform fit(const DataBounds& b, const PlotStyle& style) {
        Transform t;
        const double pad_x = (b.max_x - b.min_x) * 0.05;
        const double pad_y = (b.max_y - b.min_y) * 0.05;
        const double span_x = std::max(b.max_x - b.min_x + 2 * pad_x, 1e-12);
        const double span_y = std::max(b.max_y - b.min_y + 2 * pad_y, 1e-12);
        const double plot_w = std::max(style.width - 2 * style.margin, 1);
        const double plot_h = std::max(style.height - 2 * style.margin, 1);
        t.scale = std::min(plot_w / span_x, plot_h / span_y);
        t.mid_x = (b.min_x + b.max_x) / 2.0;
        t.mid_y = (b.min_y + b.max_y) / 2.0;
        t.cx = style.width / 2.0;
        t.cy = style.height / 2.0;
        return t;
    }
    double x(double data_x) const { return cx + (data_x - mid_x) * scale; }
    double y(double data_y) const { return cy - (data_y - mid_y) * scale; }
};

inline std::string color_for(std::size_t index, const PlotStyle& style) {
    if (index < style.palette.size()) return style.palette[index];
    // Deterministic extension beyond the fixed palette: golden-angle hue walk.
    const double hue = std::fmod(static_cast<double>(index - style.palette.size()) * 137.50776405, 360.0);
    const double sat = 0.65, val = 0.8;
    const double c = val * sat;
    const double hp = hue / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else { r = c; b = x; }
    const double m = val - c;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>((r + m) * 255.0 + 0.5),
                  static_cast<int>((g + m) * 255.0 + 0.5), static_cast<int>((b + m) * 255.0 + 0.5));
    return buf;
}

inline void open_svg(std::ostringstream& out, const PlotStyle& style) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\""
        << style.height << "\" viewBox=\"0 0 " << style.width << " " << style.height << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << style.width << "\" height=\"" << style.height
        << "\" fill=\"#ffffff\"/>\n";
}

inline void frame_and_axes(std::ostringstream& out, const PlotStyle& style, const Transform& t,
                           const DataBounds& b) {
    const int m = style.margin;
    out << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << style.width - 2 * m
        << "\" height=\"" << style.height - 2 * m
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << px(t.x(b.min_x)) << "\" y=\"" << style.height - m + 16
        << "\" font-size=\"10\" fill=\"#333333\" text-anchor=\"middle\">" << format_fixed(b.min_x, 3)
        << "</text>\n";
    out << "<text x=\"" << px(t.x(b.max_x)) << "\" y=\"" << style.height - m + 16
        << "\" font-size=\"10\" fill=\"#333333\" text-anchor=\"middle\">" << format_fixed(b.max_x, 3)
        << "</text>\n";
    out << "<text x=\"" << m - 6 << "\" y=\"" << px(t.y(b.min_y))
        << "\" font-size=\"10\" fill=\"#333333\" text-anchor=\"end\">" << format_fixed(b.min_y, 3)
        << "</text>\n";
    out << "<text x=\"" << m - 6 << "\" y=\"" << px(t.y(b.max_y))
        << "\" font-size=\"10\" fill=\"#333333\" text-anchor=\"end\">" << format_fixed(b.max_y, 3)
        << "</text>\n";
}

inline void legend(std::ostringstream& out, const std::vector<std::string>& labels,
                   const PlotStyle& style) {
    const int m = style.margin;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double ly = m + 8 + static_cast<double>(i) * 16.0;
        out << "<rect x=\"" << style.width - m + 6 << "\" y=\"" << px(ly - 8)
            << "\" width=\"10\" height=\"10\" fill=\"" << color_for(i, style) << "\"/>\n";
        out << "<text x=\"" << style.width - m + 20 << "\" y=\"" << px(ly + 1)
            << "\" font-size=\"10\" fill=\"#333333\">" << xml_escape(labels[i]) << "</text>\n";
    }
}

inline DataBounds bounds_of_points(const std::vector<LabeledPoint>& points) {
    DataBounds b{points[0].x, points[0].x, points[0].y, points[0].y};
    for (const auto& p : points) {
        b.min_x = std::min(b.min_x, p.x);
        b.max_x = std::max(b.max_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_y = std::max(b.max_y, p.y);
    }
    return b;
}

}  // namespace viz_detail

/// Scatter plot of labeled 2D points with a color legend. Output is a
/// standalone SVG string, byte-identical for identical input.
inline std::string scatter_svg(const std::vector<LabeledPoint>& points, const PlotStyle& style = {},
                               std::optional<DataBounds> bounds = std::nullopt) {
    style.validate();
    if (points.empty()) throw StyloError("scatter_svg: no points");
    for (const auto& p : points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw NonFiniteCoordinate("scatter_svg: non-finite coordinate for label " + p.label);

    const DataBounds b = bounds ? *bounds : viz_detail::bounds_of_points(points);
    const auto t = viz_detail::Transform::fit(b, style);

    std::vector<std::string> labels;
    std::map<std::string, std::size_t> label_index;
    for (const auto& p : points) {
        if (label_index.emplace(p.label, 0).second) labels.push_back(p.label);
    }
    std::sort(labels.begin(), labels.end());
    for (std::size_t i = 0; i < labels.size(); ++i) label_index[labels[i]] = i;

    std::ostringstream out;
    viz_detail::open_svg(out, style);
    viz_detail::frame_and_axes(out, style, t, b);
    for (const auto& p : points) {
        out << "<circle cx=\"" << viz_detail::px(t.x(p.x)) << "\" cy=\"" << viz_detail::px(t.y(p.y))
            << "\" r=\"" << viz_detail::px(style.marker_radius) << "\" fill=\""
            << viz_detail::color_for(label_index[p.label], style) << "\" fill-opacity=\"0.8\"/>\n";
    }
    viz_detail::legend(out, labels, style);
    out << "</svg>\n";
    return out.str();
}

/// One unfilled circle per author at (center of mass, radius); radius-0
/// clusters degrade to a filled marker dot. Pass the same bounds used for
/// the companion scatter to overlay the two.
inline std::string cluster_circles_svg(const ClusterSummary& summary, const PlotStyle& style = {},
                                       std::optional<DataBounds> bounds = std::nullopt) {
    style.validate();
    if (summary.clusters.empty()) throw StyloError("cluster_circles_svg: no clusters");

    DataBounds b;
    if (bounds) {
        b = *bounds;
    } else {
        bool first = true;
        for (const auto& [author, st] : summary.clusters) {
            (void)author;
            if (first) {
                b = {st.center[0] - st.radius, st.center[0] + st.radius, st.center[1] - st.radius,
                     st.center[1] + st.radius};
                first = false;
            }
            b.min_x = std::min(b.min_x, st.center[0] - st.radius);
            b.max_x = std::max(b.max_x, st.center[0] + st.radius);
            b.min_y = std::min(b.min_y, st.center[1] - st.radius);
            b.max_y = std::max(b.max_y, st.center[1] + st.radius);
        }
    }
    const auto t = viz_detail::Transform::fit(b, style);

    std::vector<std::string> labels;
    for (const auto& [author, st] : summary.clusters) {
        (void)st;
        labels.push_back(author);  // std::map iteration is already sorted
    }

    std::ostringstream out;
    viz_detail::open_svg(out, style);
    viz_detail::frame_and_axes(out, style, t, b);
    std::size_t i = 0;
    for (const auto& [author, st] : summary.clusters) {
        const std::string color = viz_detail::color_for(i, style);
        const double cx = t.x(st.center[0]);
        const double cy = t.y(st.center[1]);
        const double r = st.radius * t.scale;
        if (r < 0.5) {
            out << "<circle cx=\"" << viz_detail::px(cx) << "\" cy=\"" << viz_detail::px(cy)
                << "\" r=\"" << viz_detail::px(style.marker_radius / 2.0) << "\" fill=\"" << color
                << "\"/>\n";
        } else {
            out << "<circle cx=\"" << viz_detail::px(cx) << "\" cy=\"" << viz_detail::px(cy)
                << "\" r=\"" << viz_detail::px(r) << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.5\"/>\n";
        }
        out << "<text x=\"" << viz_detail::px(cx + 4) << "\" y=\"" << viz_detail::px(cy - 4)
            << "\" font-size=\"10\" fill=\"#333333\">" << viz_detail::xml_escape(author)
            << "</text>\n";
        ++i;
    }
    out << "</svg>\n";
    return out.str();
}

/// Bar chart of a feature vector in axis order; y-axis spans [0, max*1.1].
inline std::string histogram_svg(const std::vector<double>& values,
                                 const std::vector<std::string>& names,
                                 const PlotStyle& style = {}) {
    style.validate();
    if (values.empty()) throw StyloError("histogram_svg: no values");
    for (double v : values)
        if (!(v >= 0.0 && v <= 1.0)) throw StyloError("histogram_svg: values must lie in [0,1]");

    double max_v = 0.0;
    for (double v : values) max_v = std::max(max_v, v);
    const double y_top = max_v > 0.0 ? max_v * 1.1 : 1.0;

    const int m = style.margin;
    const double plot_w = std::max(style.width - 2 * m, 1);
    const double plot_h = std::max(style.height - 2 * m, 1);
    const double slot = plot_w / static_cast<double>(values.size());
    const double bar_w = slot * 0.8;

    std::ostringstream out;
    viz_detail::open_svg(out, style);
    out << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << static_cast<int>(plot_w)
        << "\" height=\"" << static_cast<int>(plot_h)
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << m - 6 << "\" y=\"" << m + 4
        << "\" font-size=\"10\" fill=\"#333333\" text-anchor=\"end\">" << format_fixed(y_top, 3)
        << "</text>\n";
    out << "<text x=\"" << m - 6 << "\" y=\"" << style.height - m
        << "\" font-size=\"10\" fill=\"#333333\" text-anchor=\"end\">0</text>\n";

    for (std::size_t i = 0; i < values.size(); ++i) {
        const double h = plot_h * values[i] / y_top;
        const double x = m + slot * static_cast<double>(i) + (slot - bar_w) / 2.0;
        const double y = style.height - m - h;
        out << "<rect class=\"bar\" x=\"" << viz_detail::px(x) << "\" y=\"" << viz_detail::px(y)
            << "\" width=\"" << viz_detail::px(bar_w) << "\" height=\"" << viz_detail::px(h)
            << "\" fill=\"" << style.palette[0] << "\"/>\n";
        if (names.size() == values.size() && values.size() <= 24) {
            out << "<text x=\"" << viz_detail::px(x + bar_w / 2.0) << "\" y=\"" << style.height - m + 14
                << "\" font-size=\"9\" fill=\"#333333\" text-anchor=\"middle\">"
                << viz_detail::xml_escape(names[i]) << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace stylo
