#include "mcflab/svg.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace mcflab {

namespace {

const char* kPalette[] = {"#1b6ca8", "#c0392b", "#27824d", "#8e44ad", "#b07d2b"};

}  // namespace

std::string render_svg_frame(const std::vector<Polyline>& curves,
                             const std::vector<Vec2>& markers,
                             const std::string& caption) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    auto grow = [&](Vec2 p) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    };
    for (const auto& c : curves)
        for (const auto& p : c.vertices) grow(p);
    for (const auto& p : markers) grow(p);
    if (!(xmin <= xmax)) {
        xmin = ymin = 0.0;
        xmax = ymax = 1.0;
    }
    const double pad = 0.05 * std::max({xmax - xmin, ymax - ymin, 1e-6});
    xmin -= pad;
    ymin -= pad;
    xmax += pad;
    ymax += pad;
    const double w = xmax - xmin, h = ymax - ymin;
    // SVG y grows downward; flip so the math orientation is preserved.
    auto sy = [&](double y) { return ymin + ymax - y; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\""
       << format_double(640.0 * h / w) << "\" viewBox=\"" << format_double(xmin) << " "
       << format_double(ymin) << " " << format_double(w) << " " << format_double(h)
       << "\">\n";
    const double stroke = 0.004 * std::max(w, h);
    size_t ci = 0;
    for (const auto& c : curves) {
        if (c.vertices.empty()) continue;
        os << "<path fill=\"none\" stroke=\"" << kPalette[ci++ % 5] << "\" stroke-width=\""
           << format_double(stroke) << "\" d=\"M";
        for (size_t i = 0; i < c.vertices.size(); ++i) {
            const Vec2& p = c.vertices[i];
            os << (i ? " L" : "") << format_double(p.x) << " " << format_double(sy(p.y));
        }
        if (c.closed) os << " Z";
        os << "\"/>\n";
    }
    for (const auto& p : markers)
        os << "<circle cx=\"" << format_double(p.x) << "\" cy=\"" << format_double(sy(p.y))
           << "\" r=\"" << format_double(1.5 * stroke) << "\" fill=\"#111111\"/>\n";
    if (!caption.empty())
        os << "<text x=\"" << format_double(xmin + 0.02 * w) << "\" y=\""
           << format_double(ymin + 0.05 * h) << "\" font-size=\"" << format_double(0.04 * h)
           << "\" font-family=\"monospace\">" << caption << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace mcflab
