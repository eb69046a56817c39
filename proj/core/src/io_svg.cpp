#include "exitmap/io_svg.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace exitmap {

namespace {
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}
} // namespace

SvgPlot::SvgPlot(double x_lo, double x_hi, double y_lo, double y_hi, int width, int height)
    : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi), w_(width), h_(height) {}

Vec2 SvgPlot::to_px(Vec2 p) const {
    const double margin = 40.0;
    double fx = (p.x - x_lo_) / (x_hi_ - x_lo_);
    double fy = (p.y - y_lo_) / (y_hi_ - y_lo_);
    return {margin + fx * (w_ - 2 * margin), h_ - margin - fy * (h_ - 2 * margin)};
}

void SvgPlot::polyline(const std::vector<Vec2>& pts, const std::string& color, double sw) {
    if (pts.size() < 2) return;
    std::ostringstream os;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << sw
       << "\" points=\"";
    for (Vec2 p : pts) {
        Vec2 q = to_px(p);
        os << fmt(q.x) << ',' << fmt(q.y) << ' ';
    }
    os << "\"/>";
    elems_.push_back(os.str());
}

void SvgPlot::scatter(const std::vector<Vec2>& pts, const std::string& color, double radius) {
    for (Vec2 p : pts) {
        Vec2 q = to_px(p);
        std::ostringstream os;
        os << "<circle cx=\"" << fmt(q.x) << "\" cy=\"" << fmt(q.y) << "\" r=\"" << radius
           << "\" fill=\"" << color << "\"/>";
        elems_.push_back(os.str());
    }
}

void SvgPlot::text(Vec2 at, const std::string& s, const std::string& color) {
    Vec2 q = to_px(at);
    std::ostringstream os;
    os << "<text x=\"" << fmt(q.x) << "\" y=\"" << fmt(q.y) << "\" font-size=\"11\" fill=\""
       << color << "\">" << s << "</text>";
    elems_.push_back(os.str());
}

void SvgPlot::axes() {
    std::ostringstream os;
    Vec2 o = to_px({x_lo_, y_lo_});
    Vec2 xe = to_px({x_hi_, y_lo_});
    Vec2 ye = to_px({x_lo_, y_hi_});
    os << "<line x1=\"" << fmt(o.x) << "\" y1=\"" << fmt(o.y) << "\" x2=\"" << fmt(xe.x)
       << "\" y2=\"" << fmt(xe.y) << "\" stroke=\"#888\"/>"
       << "<line x1=\"" << fmt(o.x) << "\" y1=\"" << fmt(o.y) << "\" x2=\"" << fmt(ye.x)
       << "\" y2=\"" << fmt(ye.y) << "\" stroke=\"#888\"/>";
    elems_.push_back(os.str());
    text({x_lo_, y_lo_}, fmt(x_lo_) + "," + fmt(y_lo_));
    text({x_hi_, y_lo_}, fmt(x_hi_));
    text({x_lo_, y_hi_}, fmt(y_hi_));
}

void SvgPlot::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
      << "\" viewBox=\"0 0 " << w_ << ' ' << h_ << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& e : elems_) f << e << '\n';
    f << "</svg>\n";
}

} // namespace exitmap
