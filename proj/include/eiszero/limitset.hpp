// The k -> infinity limit configuration of zeros: a finite union of geodesic
// segments cut out by |f_v(z)| = |f_w(z)| <= |f_{v'}(z)| for index pairs from
// the Kluyver-filtered sets I (norms <= sqrt(2) kappa^{a,b}) and J (norms
// <= 4 (kappa^{a,b})^2), intersected with the box F_Gamma.
//
// On a circle z = c + r e^{i theta}, every |f|^2 is linear in cos(theta), so
// each constraint clips an exact interval; vertical lines are linear in y^2.
// Segments are stored with exact rational geodesic data plus the clipped
// parameter intervals; polylines are sampled at resolution h for distance
// work and rendering.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "eiszero/kluyver.hpp"
#include "eiszero/zeros.hpp"

namespace eiszero {

struct EmptyInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IPair {
    int64_t m, n;
    bool operator<(const IPair& o) const { return m != o.m ? m < o.m : n < o.n; }
    bool operator==(const IPair& o) const { return m == o.m && n == o.n; }
};

struct Geodesic {
    bool vertical;
    Rational x;          // vertical: Re(z) = x
    Rational center;     // circle: center on the real axis
    Rational radius_sq;  // circle: squared radius, > 0
    IPair v1{}, v2{};    // source pair

    bool same_curve(const Geodesic& o) const {
        if (vertical != o.vertical) return false;
        return vertical ? x == o.x : (center == o.center && radius_sq == o.radius_sq);
    }
};

// parameter: circle uses theta in (0, pi); vertical uses y > 0
struct GeodesicSegment {
    Geodesic geo;
    std::vector<std::pair<double, double>> intervals;

    std::vector<Cd> polyline(double h) const {
        std::vector<Cd> pts;
        if (geo.vertical) {
            double x = rational_to_real<double>(geo.x);
            for (auto& [lo, hi] : intervals) {
                int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / h)));
                for (int i = 0; i <= n; ++i) pts.push_back({x, lo + (hi - lo) * i / n});
            }
        } else {
            double c = rational_to_real<double>(geo.center);
            double r = std::sqrt(rational_to_real<double>(geo.radius_sq));
            for (auto& [lo, hi] : intervals) {
                int n = std::max(1, static_cast<int>(std::ceil(r * (hi - lo) / h)));
                for (int i = 0; i <= n; ++i) {
                    double th = lo + (hi - lo) * i / n;
                    pts.push_back({c + r * std::cos(th), r * std::sin(th)});
                }
            }
        }
        return pts;
    }
};

struct GeodesicConfig {
    std::vector<GeodesicSegment> segments;
    double clip_im = 1;  // the F_Gamma height used for clipping
    double resolution = 1e-3;

    bool empty() const {
        for (auto& s : segments)
            if (!s.intervals.empty()) return false;
        return true;
    }
    std::vector<Cd> polyline() const {
        std::vector<Cd> pts;
        for (auto& s : segments) {
            auto p = s.polyline(resolution);
            pts.insert(pts.end(), p.begin(), p.end());
        }
        return pts;
    }
};

// I and J index sets for one (group, index): pairs (m,n) from
// Z_{>0} x Z  union  {0} x Z_{>0} within the norm bound whose lattice
// coefficient rho^{(Na,Nb),(n,-m)}(1) does not vanish.
struct IndexSets {
    std::vector<IPair> I, J;
    int64_t kappa;
};

inline IndexSets index_sets(const CongruenceGroup& G, const SeriesIndex& idx,
                            double threshold = kRhoZeroThreshold,
                            double j_bound_scale = 1.0) {
    IndexSets out;
    out.kappa = kappa_ab(G, idx.A, idx.B).kappa;
    double bi = 2.0 * out.kappa * out.kappa;
    double bj = 16.0 * std::pow(double(out.kappa), 4.0) * j_bound_scale * j_bound_scale;
    auto coeff_nonzero = [&](int64_t m, int64_t n) {
        return std::abs(rho(G, {idx.A, idx.B}, {imod(n, G.N), imod(-m, G.N)}, 1)) >
               threshold;
    };
    int64_t mmax = static_cast<int64_t>(std::sqrt(bj));
    for (int64_t m = 0; m <= mmax; ++m) {
        int64_t nmax = static_cast<int64_t>(std::sqrt(bj - double(m) * double(m)));
        for (int64_t n = (m == 0 ? 1 : -nmax); n <= nmax; ++n) {
            if (m * m + n * n > bj) continue;
            if (!coeff_nonzero(m, n)) continue;
            out.J.push_back({m, n});
            if (m * m + n * n <= bi) out.I.push_back({m, n});
        }
    }
    return out;
}

namespace detail {

// |f_{(m,n)}(z)|^2 restricted to the circle z = c + r e^{i theta} is
// P + Q cos(theta); on the line z = x0 + i y it is m^2 y^2 + (m x0 + n)^2.
struct CircleForm {
    double P, Q;
};

inline CircleForm circle_form(int64_t m, int64_t n, double c, double r2, double r) {
    double md = double(m), nd = double(n);
    return {md * md * (c * c + r2) + 2 * md * nd * c + nd * nd,
            2 * r * md * (md * c + nd)};
}

// intersect [lo, hi] with {u : A + B u <= 0}
inline bool clip_halfline(double& lo, double& hi, double A, double B, double tol) {
    if (std::abs(B) < tol) return A <= tol;  // constant constraint
    double u = -A / B;
    if (B > 0)
        hi = std::min(hi, u);
    else
        lo = std::max(lo, u);
    return hi >= lo - tol;
}

}  // namespace detail

// Y_{v,w} for one pair: the geodesic |f_v| = |f_w| clipped by all J
// constraints and by the box {|Re| <= 1/2, |z| >= 1, Im <= clip_im}.
inline std::optional<GeodesicSegment> clip_pair(const IPair& a, const IPair& b,
                                                const std::vector<IPair>& J,
                                                double clip_im) {
    const double tol = 1e-12;
    GeodesicSegment seg;
    seg.geo.v1 = a;
    seg.geo.v2 = b;
    int64_t m1 = a.m, n1 = a.n, m2 = b.m, n2 = b.n;
    if (m1 == m2) {
        if (m1 == 0) return std::nullopt;  // |n1| = |n2| has no solution for n1 != n2 > 0
        seg.geo.vertical = true;
        seg.geo.x = Rational(-(n1 + n2), 2 * m1);
        double x0 = double(-(n1 + n2)) / double(2 * m1);
        if (x0 < -0.5 - tol || x0 > 0.5 + tol) return std::nullopt;
        // constraints are linear in y^2
        double y2lo = std::max(0.0, 1 - x0 * x0);  // |z| >= 1
        double y2hi = clip_im * clip_im;
        double fv = double(m1 * m1);
        double cv = (m1 * x0 + n1) * (m1 * x0 + n1);
        for (auto& w : J) {
            double fw = double(w.m * w.m);
            double cw = (w.m * x0 + w.n) * (w.m * x0 + w.n);
            // fv y^2 + cv <= fw y^2 + cw
            double A = cv - cw, B = fv - fw;
            if (std::abs(B) < tol) {
                if (A > tol) return std::nullopt;
            } else if (B > 0) {
                y2hi = std::min(y2hi, -A / B);
            } else {
                y2lo = std::max(y2lo, -A / B);
            }
            if (y2hi < y2lo - tol) return std::nullopt;
        }
        if (y2hi < y2lo) y2hi = y2lo;
        seg.intervals.push_back({std::sqrt(std::max(0.0, y2lo)), std::sqrt(y2hi)});
        return seg;
    }
    // circle: (m1^2 - m2^2)|z|^2 + 2(m1 n1 - m2 n2) x + (n1^2 - n2^2) = 0
    Rational d(m1 * m1 - m2 * m2);
    Rational cr = Rational(-(m1 * n1 - m2 * n2)) / d;
    Rational r2r = cr * cr - Rational(n1 * n1 - n2 * n2) / d;
    if (r2r <= 0) return std::nullopt;
    seg.geo.vertical = false;
    seg.geo.center = cr;
    seg.geo.radius_sq = r2r;
    double c = rational_to_real<double>(cr);
    double r2 = rational_to_real<double>(r2r);
    double r = std::sqrt(r2);
    // u = cos(theta) window from the J constraints and the box
    double ulo = -1, uhi = 1;
    auto fa = detail::circle_form(m1, n1, c, r2, r);
    for (auto& w : J) {
        auto fw = detail::circle_form(w.m, w.n, c, r2, r);
        if (!detail::clip_halfline(ulo, uhi, fa.P - fw.P, fa.Q - fw.Q, tol))
            return std::nullopt;
    }
    // |Re z| <= 1/2: c + r u in [-1/2, 1/2]
    ulo = std::max(ulo, (-0.5 - c) / r);
    uhi = std::min(uhi, (0.5 - c) / r);
    // |z| >= 1: c^2 + r^2 + 2 c r u >= 1
    if (std::abs(c) > tol) {
        double u = (1 - c * c - r2) / (2 * c * r);
        if (c > 0)
            ulo = std::max(ulo, u);
        else
            uhi = std::min(uhi, u);
    } else if (r2 < 1 - tol) {
        return std::nullopt;
    }
    ulo = std::max(ulo, -1.0);
    uhi = std::min(uhi, 1.0);
    if (uhi < ulo - tol) return std::nullopt;
    if (uhi < ulo) uhi = ulo;
    double th_lo = std::acos(std::min(1.0, std::max(-1.0, uhi)));
    double th_hi = std::acos(std::min(1.0, std::max(-1.0, ulo)));
    // Im <= clip_im: r sin(theta) <= clip_im splits the theta window
    if (r > clip_im + tol) {
        double s = std::asin(std::min(1.0, clip_im / r));
        double lo1 = th_lo, hi1 = std::min(th_hi, s);
        double lo2 = std::max(th_lo, M_PI - s), hi2 = th_hi;
        if (hi1 >= lo1 - tol) seg.intervals.push_back({lo1, std::max(hi1, lo1)});
        if (hi2 >= lo2 - tol) seg.intervals.push_back({lo2, std::max(hi2, lo2)});
        if (seg.intervals.empty()) return std::nullopt;
    } else {
        seg.intervals.push_back({th_lo, th_hi});
    }
    return seg;
}

struct ConfigOptions {
    std::optional<std::vector<SeriesIndex>> indices;  // default: all (A,B)
    bool conjugates = true;   // loop over distinct SL2(Z/N)-conjugates of G
    double resolution = 1e-3;
    std::optional<double> clip_im;  // default: max kappa^{a,b} over the run
    double rho_threshold = kRhoZeroThreshold;
    double j_bound_scale = 1.0;  // inflating the J norm bound must be a no-op
};

inline GeodesicConfig limit_configuration(const CongruenceGroup& G,
                                          ConfigOptions opt = {}) {
    std::vector<CongruenceGroup> groups;
    if (!opt.conjugates || G.order() == 1)
        groups.push_back(G);
    else
        groups = conjugate_subgroups(G);
    std::vector<SeriesIndex> idxs;
    if (opt.indices) {
        idxs = *opt.indices;
    } else {
        for (int64_t A = 0; A < G.N; ++A)
            for (int64_t B = 0; B < G.N; ++B) idxs.emplace_back(A, B, G.N);
    }

    // two passes: the clip height is the max kappa over everything included
    std::vector<std::pair<const CongruenceGroup*, IndexSets>> work;
    int64_t kmax = 1;
    for (auto& Gc : groups)
        for (auto& idx : idxs) {
            work.emplace_back(&Gc,
                              index_sets(Gc, idx, opt.rho_threshold, opt.j_bound_scale));
            kmax = std::max(kmax, work.back().second.kappa);
        }
    double clip = opt.clip_im.value_or(double(kmax));

    GeodesicConfig cfg;
    cfg.clip_im = clip;
    cfg.resolution = opt.resolution;
    for (auto& [Gc, sets] : work) {
        for (size_t i = 0; i < sets.I.size(); ++i)
            for (size_t j = i + 1; j < sets.I.size(); ++j) {
                auto seg = clip_pair(sets.I[i], sets.I[j], sets.J, clip);
                if (seg) cfg.segments.push_back(*seg);
            }
    }

    // merge segments on the same geodesic (interval union)
    std::vector<GeodesicSegment> merged;
    for (auto& s : cfg.segments) {
        GeodesicSegment* host = nullptr;
        for (auto& m : merged)
            if (m.geo.same_curve(s.geo)) {
                host = &m;
                break;
            }
        if (!host) {
            merged.push_back(s);
            continue;
        }
        for (auto& iv : s.intervals) host->intervals.push_back(iv);
    }
    for (auto& m : merged) {
        std::sort(m.intervals.begin(), m.intervals.end());
        std::vector<std::pair<double, double>> u;
        for (auto& iv : m.intervals) {
            if (!u.empty() && iv.first <= u.back().second + 1e-9)
                u.back().second = std::max(u.back().second, iv.second);
            else
                u.push_back(iv);
        }
        m.intervals = u;
    }
    cfg.segments = merged;
    return cfg;
}

// The circle radii d (centered at 0) in the limit of the E^{(a,0)} zero sets
// for Gamma^0(N): exactly the divisors of N / rad(N).
inline std::vector<int64_t> gamma0_radii(int64_t N) {
    return divisors(N / radical(N));
}

// exact point-to-segment distance (closed form; clamped to the intervals)
inline double distance_to_segment(const Cd& z, const GeodesicSegment& s) {
    double best = 1e300;
    if (s.geo.vertical) {
        double x = rational_to_real<double>(s.geo.x);
        for (auto& [lo, hi] : s.intervals) {
            double y = std::min(std::max(z.im, lo), hi);
            best = std::min(best, std::hypot(z.re - x, z.im - y));
        }
        return best;
    }
    double c = rational_to_real<double>(s.geo.center);
    double r = std::sqrt(rational_to_real<double>(s.geo.radius_sq));
    Cd d{z.re - c, z.im};
    double phi = std::atan2(d.im, d.re);  // in [0, pi] for Im z >= 0
    for (auto& [lo, hi] : s.intervals) {
        if (phi >= lo && phi <= hi) {
            best = std::min(best, std::abs(d.abs() - r));
        } else {
            for (double th : {lo, hi})
                best = std::min(best,
                                (z - Cd{c + r * std::cos(th), r * std::sin(th)}).abs());
        }
    }
    return best;
}

inline double distance_to_config(const Cd& z, const GeodesicConfig& cfg) {
    if (cfg.empty()) throw EmptyInput("empty configuration");
    double best = 1e300;
    for (auto& s : cfg.segments) best = std::min(best, distance_to_segment(z, s));
    return best;
}

struct HausdorffResult {
    double distance;
    double resolution_error;  // polyline sampling contributes <= h/2
};

inline HausdorffResult hausdorff(const std::vector<Cd>& zeros,
                                 const GeodesicConfig& cfg) {
    if (zeros.empty()) throw EmptyInput("empty zero set");
    if (cfg.empty()) throw EmptyInput("empty configuration");
    double d1 = 0;
    for (auto& z : zeros) d1 = std::max(d1, distance_to_config(z, cfg));
    double d2 = 0;
    for (auto& p : cfg.polyline()) {
        double dmin = 1e300;
        for (auto& z : zeros) dmin = std::min(dmin, (z - p).abs());
        d2 = std::max(d2, dmin);
    }
    return {std::max(d1, d2), cfg.resolution / 2};
}

inline std::vector<Cd> zero_points(const std::vector<ZeroSet>& sets) {
    std::vector<Cd> pts;
    for (auto& zs : sets)
        for (auto& r : zs.records) pts.push_back(r.z);
    return pts;
}

}  // namespace eiszero
