#pragma once

#include <string>
#include <vector>

#include "exitmap/vec2.hpp"

namespace exitmap {

/// Dependency-light line/scatter SVG plots.
class SvgPlot {
public:
    SvgPlot(double x_lo, double x_hi, double y_lo, double y_hi,
            int width = 640, int height = 640);

    void polyline(const std::vector<Vec2>& pts, const std::string& color,
                  double stroke_width = 1.0);
    void scatter(const std::vector<Vec2>& pts, const std::string& color, double radius = 2.0);
    void text(Vec2 at, const std::string& s, const std::string& color = "#444");
    void axes();
    void write(const std::string& path) const;

private:
    Vec2 to_px(Vec2 p) const;
    double x_lo_, x_hi_, y_lo_, y_hi_;
    int w_, h_;
    std::vector<std::string> elems_;
};

} // namespace exitmap
