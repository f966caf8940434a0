// Convergence diagnostics: angular discrepancy of zeros against the uniform
// density 6/pi on arg(A), distance-to-arc profiles, exceptional-zero probes
// near i and rho (bisection on certified real restrictions), and the
// CM-point audit.

#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eiszero/limitset.hpp"
#include "eiszero/zeros.hpp"

namespace eiszero {

struct EmptyRestriction : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct HypothesisViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// angular discrepancy

struct DiscrepancyReport {
    int k = 0;
    double D = 0;
    double weight_used = 0;   // total weighted count with Re(z) < 0
    int n_zeros_used = 0;
    int axis_zeros = 0;       // zeros on Re(z) = 0, excluded and reported
};

// D_k = sup over [t1,t2] in [pi/2, 2pi/3] of
//   | mu([t1,t2]) / mu(total) - (6/pi)(t2 - t1) |
// with mu the weighted counting measure of arg(z) for zeros with Re(z) < 0.
// The supremum over a finite atomic measure is attained with endpoints at
// atoms (closed or open), so the computation is exact.
inline DiscrepancyReport angular_discrepancy(const std::vector<ZeroSet>& sets, int k,
                                             double axis_tol = 1e-9) {
    DiscrepancyReport rep;
    rep.k = k;
    std::vector<std::pair<double, double>> atoms;  // (angle, weight)
    for (auto& zs : sets)
        for (auto& r : zs.records) {
            if (!r.in_strict_F) continue;
            if (std::abs(r.z.re) <= axis_tol) {
                ++rep.axis_zeros;
                continue;
            }
            if (r.z.re > 0) continue;
            double th = std::atan2(r.z.im, r.z.re);
            th = std::min(std::max(th, M_PI / 2), 2 * M_PI / 3);
            double w = r.multiplicity *
                       (double(boost::multiprecision::numerator(r.elliptic_weight)) /
                        double(boost::multiprecision::denominator(r.elliptic_weight)));
            atoms.emplace_back(th, w);
            rep.weight_used += w;
            ++rep.n_zeros_used;
        }
    if (atoms.empty()) throw EmptyRestriction("no zeros with Re(z) < 0");
    std::sort(atoms.begin(), atoms.end());

    const double lo = M_PI / 2, hi = 2 * M_PI / 3;
    const double c = 6.0 / M_PI;
    std::vector<double> pos{lo, hi};
    for (auto& [t, w] : atoms) pos.push_back(t);
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    auto mass = [&](double a, double b, bool closed) {
        double m = 0;
        for (auto& [t, w] : atoms) {
            bool in = closed ? (t >= a && t <= b) : (t > a && t < b);
            if (in) m += w;
        }
        return m;
    };
    double W = rep.weight_used;
    double D = 0;
    for (size_t i = 0; i < pos.size(); ++i)
        for (size_t j = i; j < pos.size(); ++j) {
            double len = pos[j] - pos[i];
            D = std::max(D, mass(pos[i], pos[j], true) / W - c * len);
            D = std::max(D, c * len - mass(pos[i], pos[j], false) / W);
        }
    rep.D = D;
    return rep;
}

// ---------------------------------------------------------------------------
// distance-to-arc profile

struct ArcProfileEntry {
    Cd z;
    double d;   // Euclidean distance to the lower arcs A u A'
    double kd;  // k * d
    int band;   // 0: on-arc, 1: moderate (k d in [c1, c2]), 2: other
};

inline double distance_to_lower_arcs(const Cd& z) {
    double phi = std::atan2(z.im, z.re);
    if (phi >= M_PI / 3 && phi <= 2 * M_PI / 3) return std::abs(z.abs() - 1);
    Cd e1{0.5, std::sqrt(3.0) / 2}, e2{-0.5, std::sqrt(3.0) / 2};
    return std::min((z - e1).abs(), (z - e2).abs());
}

struct ArcProfileOptions {
    double eps_on = 1e-8;
    double c1 = 1e-2;  // classification metadata, not an assertion
    double c2 = 1e2;
};

inline std::vector<ArcProfileEntry> arc_distance_profile(const std::vector<ZeroSet>& sets,
                                                         ArcProfileOptions opt = {}) {
    std::vector<ArcProfileEntry> out;
    for (auto& zs : sets)
        for (auto& r : zs.records) {
            ArcProfileEntry e;
            e.z = r.z;
            e.d = distance_to_lower_arcs(r.z);
            e.kd = zs.k * e.d;
            if (e.d < opt.eps_on)
                e.band = 0;
            else if (e.kd >= opt.c1 && e.kd <= opt.c2)
                e.band = 1;
            else
                e.band = 2;
            out.push_back(e);
        }
    return out;
}

// ---------------------------------------------------------------------------
// exceptional-zero probes

enum class ProbeKind { near_i, near_rho };

struct ProbeResult {
    std::optional<Cd> zero;     // the bracketed zero, if a sign change exists
    double bracket_lo = 0, bracket_hi = 0;  // in t (arc angle resp. height)
    int sign_lo = 0, sign_hi = 0;
    bool hypothesis_ok = false;
    std::string note;
    unsigned precision_bits = 0;
};

namespace detail {

// certified sign of a real-valued quantity with error bound
template <class F>
int certified_sign(F&& value_and_bound, double t) {
    auto [v, b] = value_and_bound(t);
    if (!(v > b) && !(v < -b)) return 0;  // not certified
    return v > 0 ? 1 : -1;
}

}  // namespace detail

// Bisection probe for a zero of E_k^{a,b} within beta^{-k} of i (along the
// unit circle) or of rho (along Re = -1/2). Hypotheses follow the sign
// analysis of the main term; with exploratory=true a violated hypothesis only
// annotates the result instead of throwing.
inline ProbeResult exceptional_zero_probe(ProbeKind kind, const CongruenceGroup& G,
                                          const SeriesIndex& idx, int k, double beta,
                                          bool exploratory = false) {
    if (beta <= 1 || beta >= std::sqrt(2.0))
        throw std::invalid_argument("probe needs 1 < beta < sqrt(2)");
    int64_t N = idx.N;
    ProbeResult res;
    unsigned p = static_cast<unsigned>(k * std::log2(beta) + 64);
    p = std::max(p, 96u);
    res.precision_bits = p;
    PrecisionGuard guard(p);

    auto u = [N](int64_t j) { return std::cos(2 * M_PI * double(imod(j, N)) / double(N)); };
    std::string why;
    if (kind == ProbeKind::near_i) {
        int d = imod(k, 8);
        bool cong = (d == 2 || d == 6);
        bool ab = imod(idx.A - idx.B, N) == 0 || imod(idx.A + idx.B, N) == 0;
        bool a_ok = idx.A != 0 && imod(4 * idx.A, N) != 0;
        double sgn_arg = (u(idx.A - idx.B) - u(idx.A + idx.B)) / u(idx.A);
        int want = ((d - 2) / 4) % 2 == 0 ? 1 : -1;
        bool sign_ok = (sgn_arg > 0 ? 1 : -1) == want;
        res.hypothesis_ok = cong && ab && a_ok && sign_ok;
        if (!res.hypothesis_ok) {
            why = !cong ? "k not 2,6 mod 8" : !ab ? "|a| != |b|" : !a_ok ? "a in {0, 1/4, 1/2, 3/4}" : "sign condition fails";
            if (!exploratory) throw HypothesisViolated("near_i probe: " + why);
            res.note = "exploratory: " + why;
        }
    } else {
        bool idx_ok = idx.A == 0 && N % 3 == 0 &&
                      (imod(3 * idx.B, N) == 0 && imod(idx.B, N) != 0);
        bool cong = imod(k, 12) == 0;
        res.hypothesis_ok = idx_ok && cong;
        if (!res.hypothesis_ok) {
            why = !idx_ok ? "(a,b) != (0, +-1/3)" : "k not 0 mod 12";
            if (!exploratory) throw HypothesisViolated("near_rho probe: " + why);
            res.note = "exploratory: " + why;
        }
    }

    using std::pow;
    BigFloat eps_eval = pow(BigFloat(2), -int(p / 2));  // certify down to 2^{-p/2}
    double delta = std::pow(beta, -double(k));

    std::function<std::pair<double, double>(double)> f;
    if (kind == ProbeKind::near_i) {
        // h_k(t) = (u_A^{-1}/2) e^{ikt/2} E(e^{it}), real for a = +-b
        auto h = std::make_shared<ArcFunction<BigFloat>>(G, idx, k);
        f = [h, eps_eval](double t) {
            auto [v, b] = h->value(BigFloat(t), eps_eval);
            return std::make_pair(double(v), double(b));
        };
        res.bracket_lo = M_PI / 2;
        res.bracket_hi = M_PI / 2 + delta;
    } else {
        // E(-1/2 + it) is real-valued for (a,b) = (0, 1/3)
        auto evp = std::make_shared<SeriesEvaluator<BigFloat>>(G, idx, k);
        f = [evp, eps_eval](double t) {
            Cplx<BigFloat> z{BigFloat(-0.5), BigFloat(t)};
            auto r = evp->eval(z, eps_eval, 0.99, 0.01);
            double im = std::abs(double(r.value.im));
            double bd = double(r.error_bound());
            if (im > bd + 1e-12)
                throw ImaginaryResidual("E(-1/2+it) should be real");
            return std::make_pair(double(r.value.re), bd);
        };
        res.bracket_lo = std::sqrt(3.0) / 2;
        res.bracket_hi = std::sqrt(3.0) / 2 + delta;
    }

    double a = res.bracket_lo, b = res.bracket_hi;
    res.sign_lo = detail::certified_sign(f, a);
    res.sign_hi = detail::certified_sign(f, b);
    if (res.sign_lo == 0 || res.sign_hi == 0) {
        res.note += (res.note.empty() ? "" : "; ") + std::string("endpoint sign uncertified");
        return res;
    }
    if (res.sign_lo == res.sign_hi) return res;  // no bracketed zero
    for (int it = 0; it < 80 && (b - a) > delta * 1e-6; ++it) {
        double m = 0.5 * (a + b);
        int s = detail::certified_sign(f, m);
        if (s == 0) break;  // pinned at the zero to within certification
        if (s == res.sign_lo)
            a = m;
        else
            b = m;
    }
    double t = 0.5 * (a + b);
    res.zero = (kind == ProbeKind::near_i) ? Cd{std::cos(t), std::sin(t)} : Cd{-0.5, t};
    res.bracket_lo = a;
    res.bracket_hi = b;
    return res;
}

// Negative control: the disk |z - i| < c/k contains no zeros when the main
// term does not vanish at i (argument-principle count on the circle is 0).
inline int negative_control_near_i(const CongruenceGroup& G, const SeriesIndex& idx,
                                   int k, double c = 0.5) {
    SeriesEvaluator<double> ev(G, idx, k);
    double rad = c / k;
    CertifiedSeries<double> cert(ev, 1 - 2 * rad, 2 * rad);
    return winding_circle(cert, kPointI, rad);
}

// ---------------------------------------------------------------------------
// CM-point audit

struct CmAuditRow {
    std::string point_name;
    Cd point;
    int64_t A, B;
    double abs_value;
    double bound;
    bool flagged_zero;
};

inline std::vector<std::pair<std::string, Cd>> cm_candidate_points() {
    double s3 = std::sqrt(3.0);
    return {
        {"i", {0.0, 1.0}},
        {"rho", {-0.5, s3 / 2}},
        {"sqrt(-2)", {0.0, std::sqrt(2.0)}},
        {"sqrt(-3)", {0.0, s3}},
        {"(-1+sqrt(-7))/2", {-0.5, std::sqrt(7.0) / 2}},
        {"(-1+sqrt(-11))/2", {-0.5, std::sqrt(11.0) / 2}},
        {"(-1+sqrt(-15))/2", {-0.5, std::sqrt(15.0) / 2}},
        {"(-1+sqrt(-15))/4", {-0.25, std::sqrt(15.0) / 4}},
    };
}

// Evaluate every E_k^{a,b} at the CM candidates with certified bound <= eps;
// flag zero iff |value| <= bound.
inline std::vector<CmAuditRow> cm_point_audit(int64_t N, int k, double eps) {
    unsigned p = eps < 1e-13 ? static_cast<unsigned>(-std::log2(eps) + 64) : 53;
    std::vector<CmAuditRow> rows;
    auto G = coset_reps(Family::Principal, N);
    auto run = [&](auto real_tag) {
        using R = decltype(real_tag);
        for (int64_t A = 0; A < N; ++A)
            for (int64_t B = 0; B < N; ++B) {
                SeriesEvaluator<R> ev(G, SeriesIndex(A, B, N), k);
                for (auto& [name, z] : cm_candidate_points()) {
                    auto r = ev.eval(Cplx<R>{R(z.re), R(z.im)}, R(eps), std::min(1.0, z.abs()),
                                     0.01);
                    CmAuditRow row;
                    row.point_name = name;
                    row.point = z;
                    row.A = A;
                    row.B = B;
                    row.abs_value = double(r.value.abs());
                    row.bound = double(r.error_bound());
                    row.flagged_zero = !(row.abs_value > row.bound);
                    rows.push_back(row);
                }
            }
    };
    if (p > 53) {
        PrecisionGuard guard(p);
        run(BigFloat{});
    } else {
        run(double{});
    }
    return rows;
}

}  // namespace eiszero
