// Zero localization in (a margin-widened copy of) the standard fundamental
// domain, by quadtree subdivision with argument-principle counting on
// certified boundaries, Newton refinement, and recertification on a
// localization disk.
//
// Counting convention: the strict fundamental domain is
//   {|z| > 1, -1/2 <= Re z < 1/2} plus the left lower arc (pi/2 <= arg <= 2pi/3).
// Records carry an in_strict_F flag; weighted_count sums mult * weight over
// strict records only (weights 1/2 at i, 1/3 at rho), which is exactly the
// valence-formula bookkeeping when summed over all indices.
//
// The machinery is generic over the real type: double handles every small-kappa
// workload; groups whose trace forms decay like kappa^{-k} with large kappa
// (e.g. Gamma^0(36) at weight 72 takes values ~1e-56 near the top of the
// search region) need MPFR reals to certify boundaries at all.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "eiszero/eisenstein.hpp"
#include "eiszero/parallel.hpp"

namespace eiszero {

struct BoundaryTooClose : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnresolvedCluster : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LogDomainEmpty : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ImaginaryResidual : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Cd = Cplx<double>;

inline const Cd kPointI{0.0, 1.0};
inline const Cd kPointRho{-0.5, std::sqrt(3.0) / 2};
inline const Cd kPointRhoPrime{0.5, std::sqrt(3.0) / 2};

struct Region {
    double x_min, x_max, y_min, y_max;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double diam() const { return std::hypot(width(), height()); }
    Cd center() const { return {(x_min + x_max) / 2, (y_min + y_max) / 2}; }
    bool contains(const Cd& z, double pad = 0) const {
        return z.re >= x_min - pad && z.re <= x_max + pad && z.im >= y_min - pad &&
               z.im <= y_max + pad;
    }
};

struct ZeroRecord {
    Cd z;
    int multiplicity = 1;
    Rational elliptic_weight = 1;  // 1, 1/2 (at i), 1/3 (at rho)
    SeriesIndex index;
    int k = 0;
    double localization_radius = 0;
    bool in_strict_F = true;
};

struct ZeroSet {
    Family family = Family::Principal;
    int64_t N = 1;
    SeriesIndex index;
    int k = 0;
    double eps = 0;
    unsigned precision_bits = 53;
    std::vector<ZeroRecord> records;
};

inline Rational weighted_count(const ZeroSet& zs) {
    Rational s = 0;
    for (auto& r : zs.records)
        if (r.in_strict_F) s += Rational(r.multiplicity) * r.elliptic_weight;
    return s;
}

// ---------------------------------------------------------------------------
// certified boundary walker

template <class Real>
class CertifiedSeries {
  public:
    CertifiedSeries(SeriesEvaluator<Real>& ev, double kappa, double re_slack,
                    double cert_floor_log10 = -1e9)
        : ev_(ev), kappa_(kappa), re_slack_(re_slack) {
        // default floor: a few digits above the precision's absolute noise
        double p = real_traits<Real>::precision_bits();
        floor_log10_ = cert_floor_log10 > -1e8 ? cert_floor_log10 : (-p * 0.301 + 3);
        if (!ev_.fast_ready()) ev_.prepare_fast(std::max(0.5, kappa - 0.05), 1e-8, kappa, re_slack);
    }

    struct Point {
        Cplx<Real> v;
        Real bound;
        double speed;  // local |E'/E| estimate, limits the phase step
    };

    // |v| > 3 * bound or BoundaryTooClose.
    Point certified(const Cplx<Real>& z) const {
        auto key = std::make_pair(double(z.re), double(z.im));
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        double eps = 1e-4;
        for (int round = 0; round < 64; ++round) {
            EvalResult<Real> r;
            try {
                r = ev_.eval(z, Real(eps), kappa_, re_slack_);
            } catch (const PrecisionInsufficient&) {
                break;  // nothing smaller is certifiable at this precision
            } catch (const TailBoundDiverges&) {
                break;
            }
            Real b = r.error_bound();
            Real m = r.value.abs();
            if (m > 3 * b) {
                Point p{r.value, b, double(ev_.deriv_fast(z).abs() / m)};
                cache_.emplace(key, p);
                return p;
            }
            double md = double(m);
            eps = md > 0 ? std::min(md / 8, eps / 64) : eps / 4096;
            if (eps < std::pow(10.0, floor_log10_)) break;
        }
        throw BoundaryTooClose("|E| not certifiably nonzero near z = (" +
                               std::to_string(double(z.re)) + ", " +
                               std::to_string(double(z.im)) + ")");
    }

    const SeriesEvaluator<Real>& evaluator() const { return ev_; }
    void clear_cache() const { cache_.clear(); }

  private:
    SeriesEvaluator<Real>& ev_;
    double kappa_, re_slack_;
    double floor_log10_;
    mutable std::map<std::pair<double, double>, Point> cache_;
};

namespace detail {

// Phase increment along a parametrized contour segment. A step is accepted
// only when it is an unambiguous rotation: small measured angle, moderate
// chord, and short enough that the locally sampled phase speed |E'/E| rules
// out a hidden full loop between the samples.
template <class Real>
double phase_walk(const CertifiedSeries<Real>& f,
                  const std::function<Cplx<Real>(double)>& gamma, double ta,
                  const typename CertifiedSeries<Real>::Point& va, double tb,
                  const typename CertifiedSeries<Real>::Point& vb, int depth,
                  const Cplx<Real>& za, const Cplx<Real>& zb) {
    double d = double((vb.v / va.v).arg());
    double chord = double((vb.v - va.v).abs());
    double mva = double(va.v.abs()), mvb = double(vb.v.abs());
    double len = double((zb - za).abs());
    double speed = std::max(va.speed, vb.speed);
    if (std::abs(d) < M_PI / 2 && chord < 1.5 * std::min(mva, mvb) && len * speed < 0.7)
        return d;
    if (depth > 48) throw BoundaryTooClose("phase walk did not resolve");
    double tm = 0.5 * (ta + tb);
    Cplx<Real> zm = gamma(tm);
    auto vm = f.certified(zm);
    return phase_walk(f, gamma, ta, va, tm, vm, depth + 1, za, zm) +
           phase_walk(f, gamma, tm, vm, tb, vb, depth + 1, zm, zb);
}

template <class Real>
int winding_on_contour(const CertifiedSeries<Real>& f,
                       const std::function<Cplx<Real>(double)>& gamma, double t_end,
                       int coarse = 8) {
    std::vector<double> ts(coarse + 1);
    std::vector<Cplx<Real>> zs(coarse + 1);
    std::vector<typename CertifiedSeries<Real>::Point> vs(coarse + 1);
    for (int i = 0; i <= coarse; ++i) {
        ts[i] = t_end * i / coarse;
        zs[i] = gamma(ts[i]);
        vs[i] = i == coarse ? vs[0] : f.certified(zs[i]);
    }
    double total = 0;
    for (int i = 0; i < coarse; ++i)
        total += phase_walk(f, gamma, ts[i], vs[i], ts[i + 1], vs[i + 1], 0, zs[i],
                            zs[i + 1]);
    double w = total / (2 * M_PI);
    int wi = static_cast<int>(std::lround(w));
    if (std::abs(w - wi) > 0.25)
        throw BoundaryTooClose("winding number did not close up");
    return wi;
}

template <class Real>
std::function<Cplx<Real>(double)> rect_contour(const Region& r) {
    return [r](double t) -> Cplx<Real> {
        double s = t - std::floor(t / 4) * 4;
        double x, y;
        if (s < 1) {
            x = r.x_min + s * r.width();
            y = r.y_min;
        } else if (s < 2) {
            x = r.x_max;
            y = r.y_min + (s - 1) * r.height();
        } else if (s < 3) {
            x = r.x_max - (s - 2) * r.width();
            y = r.y_max;
        } else {
            x = r.x_min;
            y = r.y_max - (s - 3) * r.height();
        }
        return {Real(x), Real(y)};
    };
}

template <class Real>
std::function<Cplx<Real>(double)> circle_contour(const Cd& c, double r) {
    return [c, r](double t) -> Cplx<Real> {
        return {Real(c.re + r * std::cos(t)), Real(c.im + r * std::sin(t))};
    };
}

}  // namespace detail

template <class Real>
int winding_rectangle(const CertifiedSeries<Real>& f, const Region& r) {
    return detail::winding_on_contour(f, detail::rect_contour<Real>(r), 4.0, 8);
}

template <class Real>
int winding_circle(const CertifiedSeries<Real>& f, const Cd& c, double radius) {
    return detail::winding_on_contour(f, detail::circle_contour<Real>(c, radius),
                                      2 * M_PI, 8);
}

// Number of zeros (with multiplicity) of the series inside the rectangle.
// Precondition: |E| certifiably nonzero on the boundary; otherwise
// BoundaryTooClose is thrown and the caller must perturb the box.
template <class Real = double>
int count_zeros_region(const CongruenceGroup& G, const SeriesIndex& idx, int k,
                       const Region& region) {
    if (region.width() <= 0 || region.height() <= 0) return 0;
    SeriesEvaluator<Real> ev(G, idx, k);
    double kappa = std::max(0.5, std::min(region.y_min, 1.0));
    double re_slack =
        std::max(0.0, std::max(std::abs(region.x_min), std::abs(region.x_max)) - 0.5) + 0.01;
    CertifiedSeries<Real> f(ev, kappa, re_slack);
    return winding_rectangle(f, region);
}

// ---------------------------------------------------------------------------
// zero-free height

struct ImagBound {
    double bound;                       // certified: no zero with Im(z) > bound
    int64_t kappa_ab;                   // kappa^{a,b}
    std::optional<double> c_over_k;     // bound = kappa + c/k when the log route worked
    std::optional<double> closed_form;  // 1 + log(13N)/k when applicable
};

inline double zeta_upper(int k) { return std::riemann_zeta(double(k)) * (1 + 1e-12); }

// Rigorous lower bound on |C^{a,b,<=t}|. The Kluyver terms can cancel exactly
// (rho(j) = 0 for most j when kappa^{a,b} is large) while the true value sits
// at |rho(kappa)| / kappa^k; double arithmetic would drown that in noise, so
// the sum runs in MPFR with an explicit rounding allowance subtracted.
inline double truncated_constant_lower(const CongruenceGroup& G, const SeriesIndex& idx,
                                       int k, double t) {
    unsigned p = static_cast<unsigned>(k * std::log2(std::max(4.0, t)) / 2 + 96);
    PrecisionGuard guard(p);
    CosTable<BigFloat> tab(G.N);
    auto orbit = orbit_indices(G, idx);
    int64_t nmax = static_cast<int64_t>(std::sqrt(t));
    BigFloat s = 0;
    double ops = 0;
    for (int64_t j = 1; j <= nmax; ++j) {
        BigFloat rho = 0;
        for (auto& [v, mult] : orbit) rho += BigFloat(2 * mult) * tab.cos_at(v.A * j);
        using std::pow;
        s += rho / pow(BigFloat(j), k);
        ops += double(orbit.size()) + 2;
    }
    using std::fabs;
    double mag = double(fabs(s));
    double slack = 4 * (ops + 16) * double(G.order()) * std::pow(2.0, -double(p));
    return std::max(0.0, mag - slack);
}

// Certified zero-free height. First the truncated-constant-term criterion at
// kappa^{a,b} (giving kappa + c/k); if the log argument is empty at this k, a
// direct height scan with c = 0.
inline ImagBound imag_bound(const CongruenceGroup& G, const SeriesIndex& idx, int k) {
    ImagBound out{0, 0, std::nullopt, std::nullopt};
    auto kap = kappa_ab(G, idx.A, idx.B);
    out.kappa_ab = kap.kappa;
    double kappa = double(kap.kappa);
    double h = double(G.order());

    double alpha = alpha_kappa(kappa).alpha;
    double t = std::max(kappa + 1, std::floor(kappa * kappa / alpha) + 2);
    double Ct = truncated_constant_lower(G, idx, k, t);
    double Rb = remainder_bound(h, t, k, kappa);
    double zk = zeta_upper(k);
    if (Ct > Rb) {
        // c > -kappa log( (Ct - Rb) kappa^k / (8 h sqrt(t) zeta(k)) )
        double logarg = std::log(Ct - Rb) + k * std::log(kappa) -
                        std::log(8 * h * std::sqrt(t) * zk);
        double c = std::max(0.0, -kappa * logarg) + 1e-9;
        if (c <= k * std::sqrt(kappa * std::log(2.0))) {
            out.bound = kappa + c / k;
            out.c_over_k = c / k;
        }
    }
    if (!out.c_over_k) {
        for (double y : {kappa, kappa + 0.5, kappa + 1, kappa + 2, kappa + 3, kappa + 5,
                         kappa + 8, kappa + 12, kappa + 20, kappa + 40, kappa + 63}) {
            double ay = alpha_kappa(y).alpha;
            double ty = std::max(y + 1, std::floor(y * y / ay) + 2);
            double Cy = truncated_constant_lower(G, idx, k, ty);
            double Ry = remainder_bound(h, ty, k, y);
            double My = 8 * h * std::sqrt(ty) * zk / std::pow(y, k);
            if (Cy > Ry + My) {
                out.bound = y;
                break;
            }
        }
        if (out.bound == 0)
            throw LogDomainEmpty("no certifiable zero-free height (k too small?)");
    }
    // Gamma(N), 4 not dividing N, k > 5 log(54 N): Im <= 1 + log(13 N)/k
    if (G.order() == 1 && G.N % 4 != 0 && k > 5 * std::log(54.0 * double(G.N))) {
        out.closed_form = 1 + std::log(13.0 * double(G.N)) / k;
        out.bound = std::min(out.bound, *out.closed_form);
    }
    return out;
}

// ---------------------------------------------------------------------------
// quadtree search

struct FindOptions {
    double eps = 1e-8;
    double margin = 0;       // defaults to 10*eps
    double y_bottom = 0.86;  // just below sqrt(3)/2, so corner zeros are interior
    int max_depth = 52;
    bool keep_nonstrict = true;  // keep records in the closure but outside strict F
};

template <class Real = double>
class ZeroFinder {
  public:
    ZeroFinder(const CongruenceGroup& G, const SeriesIndex& idx, int k,
               FindOptions opt = {})
        : G_(G), idx_(idx), k_(k), opt_(opt), ev_(G, idx, k) {
        if (k < 4 || k % 2) throw std::invalid_argument("find_zeros needs even k >= 4");
        if (opt_.margin == 0) opt_.margin = 10 * opt_.eps;
        double p = real_traits<Real>::precision_bits();
        snap_tol_ = std::max(opt_.eps, std::pow(2.0, 10.0 - p));
    }

    ZeroSet run() {
        auto ib = imag_bound(G_, idx_, k_);
        // The search pad must clear multiple zeros sitting exactly at the
        // corners rho, rho': |E| ~ dist^m on a nearby edge, so an eps-sized
        // pad would defeat boundary certification. Out-of-domain extras the
        // wide pad lets in are classified away afterwards.
        double pad = std::max(10 * opt_.eps, 4e-3);
        double y_top = std::max(ib.bound + pad, 1.2);
        Region root{-0.5 - pad, 0.5 + pad, opt_.y_bottom, y_top};
        double re_slack = pad + 0.02;
        // The function scale near the top of the region is ~ rho(kappa)/kappa^k,
        // which can be astronomically small for large kappa; the Newton fast
        // path must resolve it.
        double kap = double(ib.kappa_ab);
        double tk = std::max(kap + 1, std::floor(kap * kap / alpha_kappa(kap).alpha) + 2);
        double scale = truncated_constant_lower(G_, idx_, k_, tk);
        double p = real_traits<Real>::precision_bits();
        // Newton resolves |f| ~ |E'| * eps near its targets and |E'| scales
        // with the local function size, so the fast-path truncation must sit
        // well below scale * eps.
        double eps_fast = std::min({1e-10, opt_.eps * 1e-2, scale * opt_.eps * 1e-3});
        eps_fast = std::max(eps_fast, std::pow(2.0, 12.0 - p));
        ev_.prepare_fast(opt_.y_bottom, eps_fast, std::min(1.0, opt_.y_bottom - 0.01),
                         re_slack);
        cert_ = std::make_unique<CertifiedSeries<Real>>(
            ev_, std::min(1.0, opt_.y_bottom - 0.01), re_slack);
        raw_.clear();
        process_with_jitter(root, 0);
        return assemble();
    }

  private:
    struct RawZero {
        Cd z;
        int mult;
        double rad;
    };

    // A box fully below the unit circle cannot meet the closure of F.
    bool below_arc(const Region& r) const {
        double xm = std::max(std::abs(r.x_min), std::abs(r.x_max));
        return xm * xm + r.y_max * r.y_max < (1 - 3 * opt_.eps) * (1 - 3 * opt_.eps);
    }

    void process_with_jitter(Region r, int depth) {
        const double phi = 0.6180339887498949;
        for (int attempt = 0;; ++attempt) {
            try {
                process(r, depth);
                return;
            } catch (const BoundaryTooClose&) {
                if (attempt >= 5) throw;
                double d = phi * opt_.eps * (attempt + 1);
                r.x_min -= d;
                r.x_max += d * 0.7;
                r.y_min -= d * 0.9;
                r.y_max += d * 0.8;
            }
        }
    }

    void process(const Region& r, int depth) {
        if (below_arc(r)) return;
        int w = winding_rectangle(*cert_, r);
        if (w == 0) return;
        if (depth >= opt_.max_depth)
            throw UnresolvedCluster("max subdivision depth with nonzero count");
        if (w == 1) {
            if (try_newton(r, w)) return;
        }
        // A multiple zero at i or rho keeps w >= 2 under subdivision forever,
        // and boundary values scale like r^w, so the disk check must happen
        // before boxes get small enough to defeat certification.
        if (w >= 2 && r.diam() < 4e-3) {
            if (try_elliptic(r, w)) return;
            if (r.diam() < cluster_floor())
                throw UnresolvedCluster("multiple zeros below separation floor");
        }
        split(r, depth);
    }

    double cluster_floor() const { return std::max(3 * opt_.eps, 1e-10); }

    void split(const Region& r, int depth) {
        const double phi = 0.6180339887498949;
        for (int attempt = 0; attempt < 6; ++attempt) {
            double jx = (attempt == 0) ? 0 : phi * opt_.eps * attempt * ((attempt % 2) ? 1 : -1);
            double jy = (attempt == 0) ? 0 : phi * opt_.eps * attempt * ((attempt % 2) ? -1 : 1);
            double xc = 0.5 * (r.x_min + r.x_max) + jx;
            double yc = 0.5 * (r.y_min + r.y_max) + jy;
            Region q[4] = {{r.x_min, xc, r.y_min, yc},
                           {xc, r.x_max, r.y_min, yc},
                           {r.x_min, xc, yc, r.y_max},
                           {xc, r.x_max, yc, r.y_max}};
            size_t before = raw_.size();
            try {
                for (auto& c : q) process(c, depth + 1);
                return;
            } catch (const BoundaryTooClose&) {
                raw_.resize(before);  // retry the whole split with a new cut
            }
        }
        throw BoundaryTooClose("could not place certified cuts");
    }

    bool try_newton(const Region& r, int w) {
        Cplx<Real> z{Real(r.center().re), Real(r.center().im)};
        double step = 0;
        for (int it = 0; it < 60; ++it) {
            Cplx<Real> f = ev_.eval_fast(z);
            Cplx<Real> fp = ev_.deriv_fast(z);
            if (double(fp.abs()) == 0) return false;
            Cplx<Real> dz = f / fp;
            z -= dz;
            step = double(dz.abs());
            if (!r.contains(Cd{double(z.re), double(z.im)}, 2 * r.diam())) return false;
            if (step < opt_.eps / 20) break;
        }
        if (step >= opt_.eps / 20) return false;
        Cd zd{double(z.re), double(z.im)};
        if (!r.contains(zd, 1e-12)) return false;
        // recertify on the localization disk
        double rad = std::max(3 * opt_.eps, 64 * step);
        for (int shrink = 0; shrink < 6; ++shrink) {
            int m;
            try {
                m = winding_circle(*cert_, zd, rad);
            } catch (const BoundaryTooClose&) {
                rad *= 1.37;
                continue;
            }
            if (m == w) {
                raw_.push_back({zd, m, rad});
                return true;
            }
            if (m > w) {
                rad /= 4;  // disk caught a neighbor outside the box
                continue;
            }
            return false;  // m < w: zero not where Newton says
        }
        return false;
    }

    bool try_elliptic(const Region& r, int w) {
        for (const Cd& p : {kPointI, kPointRho, kPointRhoPrime}) {
            // farthest box corner from p; the disk must cover the whole box
            double far = 0;
            for (double x : {r.x_min, r.x_max})
                for (double y : {r.y_min, r.y_max})
                    far = std::max(far, (Cd{x, y} - p).abs());
            if (far > 0.02) continue;
            double rad = far * 1.3 + snap_tol_;
            int m;
            try {
                m = winding_circle(*cert_, p, rad);
            } catch (const BoundaryTooClose&) {
                continue;
            }
            // m == w: every zero of the box sits in the disk around p and
            // vice versa, so this is the multiplicity at (or vanishingly
            // near) p. m > w means the disk caught a neighbor: keep splitting.
            if (m == w) {
                raw_.push_back({p, m, rad});
                return true;
            }
        }
        return false;
    }

    ZeroSet assemble() {
        std::sort(raw_.begin(), raw_.end(), [](const RawZero& a, const RawZero& b) {
            return a.z.re != b.z.re ? a.z.re < b.z.re : a.z.im < b.z.im;
        });
        std::vector<RawZero> merged;
        for (auto& rz : raw_) {
            bool dup = false;
            for (auto& m : merged)
                if ((m.z - rz.z).abs() <= 3 * opt_.eps) {
                    dup = true;
                    break;
                }
            if (!dup) merged.push_back(rz);
        }

        ZeroSet zs;
        zs.family = G_.family;
        zs.N = G_.N;
        zs.index = idx_;
        zs.k = k_;
        zs.eps = opt_.eps;
        zs.precision_bits = static_cast<unsigned>(real_traits<Real>::precision_bits());
        double tol = 3 * opt_.eps;
        for (auto& rz : merged) {
            ZeroRecord rec;
            rec.z = rz.z;
            rec.multiplicity = rz.mult;
            rec.index = idx_;
            rec.k = k_;
            rec.localization_radius = rz.rad;
            if ((rec.z - kPointI).abs() <= snap_tol_) {
                rec.z = kPointI;
                rec.elliptic_weight = Rational(1, 2);
                rec.in_strict_F = true;
            } else if ((rec.z - kPointRho).abs() <= snap_tol_) {
                rec.z = kPointRho;
                rec.elliptic_weight = Rational(1, 3);
                rec.in_strict_F = true;
            } else if ((rec.z - kPointRhoPrime).abs() <= snap_tol_) {
                rec.z = kPointRhoPrime;
                rec.elliptic_weight = Rational(1, 3);
                rec.in_strict_F = false;  // glued to rho
            } else {
                double az = rec.z.abs();
                if (az < 1 - tol) continue;  // below the arc: outside closure(F)
                if (rec.z.re > 0.5 + tol || rec.z.re < -0.5 - tol) continue;
                if (std::abs(rec.z.re + 0.5) <= tol) rec.z.re = -0.5;
                if (std::abs(az - 1) <= tol) {
                    rec.z = rec.z / az;                      // on the arc
                    rec.in_strict_F = rec.z.re <= 0;         // right arc glued to left
                } else {
                    rec.in_strict_F = rec.z.re < 0.5 - tol;  // right edge glued to left
                }
            }
            if (!opt_.keep_nonstrict && !rec.in_strict_F) continue;
            zs.records.push_back(rec);
        }
        std::sort(zs.records.begin(), zs.records.end(),
                  [](const ZeroRecord& a, const ZeroRecord& b) {
                      return a.z.re != b.z.re ? a.z.re < b.z.re : a.z.im < b.z.im;
                  });
        return zs;
    }

    CongruenceGroup G_;
    SeriesIndex idx_;
    int k_;
    FindOptions opt_;
    SeriesEvaluator<Real> ev_;
    std::unique_ptr<CertifiedSeries<Real>> cert_;
    std::vector<RawZero> raw_;
    double snap_tol_;
};

template <class Real = double>
ZeroSet find_zeros(const CongruenceGroup& G, const SeriesIndex& idx, int k,
                   double eps = 1e-8) {
    FindOptions opt;
    opt.eps = eps;
    return ZeroFinder<Real>(G, idx, k, opt).run();
}

// All indices (A,B) in [0,N)^2 for one weight.
inline std::vector<ZeroSet> find_zeros_all(const CongruenceGroup& G, int k,
                                           double eps = 1e-8, unsigned threads = 0) {
    std::vector<SeriesIndex> idxs;
    for (int64_t A = 0; A < G.N; ++A)
        for (int64_t B = 0; B < G.N; ++B) idxs.emplace_back(A, B, G.N);
    std::vector<ZeroSet> out(idxs.size());
    parallel_for(idxs.size(), [&](size_t i) { out[i] = find_zeros(G, idxs[i], k, eps); },
                 threads);
    return out;
}

// ---------------------------------------------------------------------------
// sign changes of h_k on the lower arc (indices with a = +-b, N odd)

struct ArcZeroReport {
    std::vector<double> angles;  // bisected sign-change roots (values of t)
    int sign_changes = 0;
    int lower_bound = 0;  // floor(k/12) - ltilde - lambda_k
    int ltilde = 0;
    int lambda_k = 0;
    double w2 = 0;
};

// h_k^{a,b}(t) = (u_A^{-1}/2) e^{ikt/2} E_k^{a,b}(e^{it}); real for a = +-b.
template <class Real>
class ArcFunction {
  public:
    ArcFunction(const CongruenceGroup& G, const SeriesIndex& idx, int k)
        : ev_(G, idx, k), k_(k) {
        Real two_pi = 2 * pi_const<Real>();
        using std::cos;
        uA_ = cos(two_pi * Real(idx.A) / Real(idx.N));
        if (double(uA_) == 0) throw std::invalid_argument("u_A = 0: arc function undefined");
    }

    // returns (h(t), certified bound)
    std::pair<Real, Real> value(const Real& t, const Real& eps) const {
        Cplx<Real> z = polar_unit(t);
        auto r = ev_.eval(z, eps);
        Real scale = uA_ < 0 ? -2 * uA_ : 2 * uA_;
        Cplx<Real> h = polar_unit(Real(k_) * t / 2) * r.value / (2 * uA_);
        Real bound = r.error_bound() / scale;
        Real resid = h.im < 0 ? -h.im : h.im;
        if (resid > bound + Real(1e-12))
            throw ImaginaryResidual("h should be real on the arc");
        return {h.re, bound};
    }

    const SeriesEvaluator<Real>& evaluator() const { return ev_; }

  private:
    SeriesEvaluator<Real> ev_;
    int k_;
    Real uA_;
};

inline int lambda_k_of(int k) {
    int r = imod(k, 12);
    return (r == 0 || r == 2 || r == 4 || r == 8) ? 1 : 0;
}

// Case table for the mesh-shortening constant ltilde.
inline int ltilde_of(double w2, int k) {
    double aw = std::abs(w2);
    if (std::abs(aw - 2) < 1e-12) return imod(k, 3) == 0 ? 1 : 0;
    if (aw < 2) return 0;
    int mu = imod(k, 3) == 0 ? 0 : (imod(k, 3) == 1 ? 1 : 2);
    double x = (std::log(aw) - std::log(2.0)) / (std::sqrt(3.0) * M_PI) - mu / 3.0;
    int lt = static_cast<int>(std::ceil(x));
    if (std::abs(x - std::round(x)) < 1e-12) lt += 1;  // integrality indicator
    return lt;
}

inline ArcZeroReport zeros_on_arc(const CongruenceGroup& G, const SeriesIndex& idx, int k,
                                  double t_lo = M_PI / 2, double t_hi = 2 * M_PI / 3,
                                  double eps = 1e-9) {
    int64_t N = idx.N;
    if (N % 2 == 0) throw std::invalid_argument("zeros_on_arc needs odd level");
    if (imod(idx.A - idx.B, N) != 0 && imod(idx.A + idx.B, N) != 0)
        throw std::invalid_argument("zeros_on_arc needs A = +-B mod N");
    ArcZeroReport rep;
    double uA = std::cos(2 * M_PI * double(idx.A) / double(N));
    double uAB = std::cos(2 * M_PI * double(imod(idx.A - idx.B, N)) / double(N));
    rep.w2 = uAB / uA;
    rep.lambda_k = lambda_k_of(k);
    rep.ltilde = ltilde_of(rep.w2, k);
    rep.lower_bound = k / 12 - rep.ltilde - rep.lambda_k;

    ArcFunction<double> h(G, idx, k);
    // sample points t = 2 pi m / k (the proof's alternation points), the
    // interval ends, and midpoints
    std::vector<double> mesh{t_lo, t_hi};
    int m_lo = static_cast<int>(std::ceil(t_lo * k / (2 * M_PI) - 1e-12));
    int m_hi = static_cast<int>(std::floor(t_hi * k / (2 * M_PI) + 1e-12));
    for (int m = m_lo; m <= m_hi; ++m) {
        double t = 2 * M_PI * m / k;
        if (t > t_lo && t < t_hi) mesh.push_back(t);
    }
    std::sort(mesh.begin(), mesh.end());
    std::vector<double> fine;
    for (size_t i = 0; i + 1 < mesh.size(); ++i) {
        fine.push_back(mesh[i]);
        fine.push_back(0.5 * (mesh[i] + mesh[i + 1]));
    }
    fine.push_back(mesh.back());

    std::vector<std::pair<double, int>> signs;  // certified points only
    for (double t : fine) {
        auto [v, b] = h.value(t, eps);
        if (std::abs(v) > 3 * b) signs.emplace_back(t, v > 0 ? 1 : -1);
    }
    for (size_t i = 0; i + 1 < signs.size(); ++i) {
        if (signs[i].second * signs[i + 1].second < 0) {
            ++rep.sign_changes;
            double a = signs[i].first, b = signs[i + 1].first;
            int sa = signs[i].second;
            for (int it = 0; it < 60 && b - a > 1e-13; ++it) {
                double m = 0.5 * (a + b);
                auto [v, bb] = h.value(m, eps);
                if (std::abs(v) <= 3 * bb) break;  // pinned to the root
                if ((v > 0 ? 1 : -1) == sa)
                    a = m;
                else
                    b = m;
            }
            rep.angles.push_back(0.5 * (a + b));
        }
    }
    return rep;
}

}  // namespace eiszero
