// Deterministic SVG rendering of zero sets over the fundamental domain, with
// an optional dashed limit configuration. Fixed viewport: x in [-0.6, 0.6],
// y in [0.8, clip+0.3], 1000 px wide, y axis pointing up.

#pragma once

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "eiszero/limitset.hpp"
#include "eiszero/zeros.hpp"

namespace eiszero {

class SvgCanvas {
  public:
    SvgCanvas(double y_top) : y_top_(std::max(y_top, 1.3)) {
        width_ = 1000;
        scale_ = width_ / (x1_ - x0_);
        height_ = static_cast<int>(scale_ * (y_top_ - y0_));
    }

    double px(double x) const { return (x - x0_) * scale_; }
    double py(double y) const { return (y_top_ - y) * scale_; }

    void line(double x1, double y1, double x2, double y2, const std::string& style) {
        buf_ += fmt("<line x1='%.2f' y1='%.2f' x2='%.2f' y2='%.2f' %s/>\n", px(x1), py(y1),
                    px(x2), py(y2), style.c_str());
    }

    void polyline(const std::vector<Cd>& pts, const std::string& style) {
        if (pts.size() < 2) return;
        std::string s = "<polyline points='";
        for (auto& p : pts) s += fmt("%.2f,%.2f ", px(p.re), py(p.im));
        s += "' fill='none' " + style + "/>\n";
        buf_ += s;
    }

    void dot(double x, double y, double r, double opacity) {
        buf_ += fmt("<circle cx='%.2f' cy='%.2f' r='%.2f' fill='black' opacity='%.3f'/>\n",
                    px(x), py(y), r, opacity);
    }

    std::string finish() const {
        std::string out = fmt(
            "<svg xmlns='http://www.w3.org/2000/svg' width='%d' height='%d' "
            "viewBox='0 0 %d %d'>\n<rect width='%d' height='%d' fill='white'/>\n",
            width_, height_, width_, height_, width_, height_);
        return out + buf_ + "</svg>\n";
    }

    double y_top() const { return y_top_; }

  private:
    static std::string fmt(const char* f, ...) {
        char tmp[512];
        va_list ap;
        va_start(ap, f);
        vsnprintf(tmp, sizeof tmp, f, ap);
        va_end(ap);
        return tmp;
    }

    double x0_ = -0.6, x1_ = 0.6, y0_ = 0.8, y_top_;
    int width_, height_;
    double scale_;
    std::string buf_;
};

inline void draw_domain_outline(SvgCanvas& c) {
    const std::string style = "stroke='gray' stroke-width='1'";
    c.line(-0.5, std::sqrt(3.0) / 2, -0.5, c.y_top(), style);
    c.line(0.5, std::sqrt(3.0) / 2, 0.5, c.y_top(), style);
    std::vector<Cd> arc;
    for (int i = 0; i <= 120; ++i) {
        double th = M_PI / 3 + i * (M_PI / 3) / 120;
        arc.push_back({std::cos(th), std::sin(th)});
    }
    c.polyline(arc, style);
}

inline void draw_config(SvgCanvas& c, const GeodesicConfig& cfg) {
    const std::string style = "stroke='steelblue' stroke-width='1' stroke-dasharray='6,4'";
    for (auto& s : cfg.segments) c.polyline(s.polyline(cfg.resolution), style);
}

// dots darker with increasing weight k
inline std::string render_svg(const std::vector<ZeroSet>& sets,
                              const GeodesicConfig* cfg = nullptr) {
    int k_lo = 1 << 30, k_hi = 4;
    double y_top = 1.3;
    for (auto& zs : sets) {
        k_lo = std::min(k_lo, zs.k);
        k_hi = std::max(k_hi, zs.k);
        for (auto& r : zs.records) y_top = std::max(y_top, r.z.im + 0.3);
    }
    if (cfg) y_top = std::max(y_top, cfg->clip_im + 0.3);
    SvgCanvas c(y_top);
    draw_domain_outline(c);
    if (cfg) draw_config(c, *cfg);
    for (auto& zs : sets) {
        double op = k_hi > k_lo ? 0.25 + 0.75 * double(zs.k - k_lo) / double(k_hi - k_lo)
                                : 0.8;
        for (auto& r : zs.records) c.dot(r.z.re, r.z.im, 2.2, op);
    }
    return c.finish();
}

}  // namespace eiszero
