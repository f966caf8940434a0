// Certified evaluation of E_k^{a,b} and of trace forms E_{k,Gamma}^{a,b}.
//
// Two evaluators, both with rigorous truncation bounds:
//  - lattice: sum over m^2+n^2 <= t; remainder bounded via
//    |mz+n|^2 >= alpha_kappa (m^2+n^2) for z in the fundamental domain with
//    |z| >= kappa. The bound decays like ((t+1) alpha)^{-k/2}, so this is the
//    cheap path for large weight.
//  - q-expansion: partial q_N-series with a geometric tail bound from
//    |sigma_{k-1}[a,b](n)| <= 2 n^k. This is the cheap path for small weight
//    (the lattice bound is nearly useless at k = 4).
// eval() picks whichever certifies the target at lower cost.
//
// Truncation error and accumulated rounding slack are tracked separately;
// the reported error_bound is their sum.

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "eiszero/arith.hpp"
#include "eiszero/cnum.hpp"
#include "eiszero/groups.hpp"
#include "eiszero/kluyver.hpp"

namespace eiszero {

struct RegionViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PrecisionInsufficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TailBoundDiverges : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LevelMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SeriesIndex {
    int64_t A = 0, B = 0, N = 1;  // (a,b) = (A/N, B/N), stored reduced mod N

    SeriesIndex() = default;
    SeriesIndex(int64_t A_, int64_t B_, int64_t N_)
        : A(imod(A_, N_)), B(imod(B_, N_)), N(N_) {}
};

struct AlphaKappa {
    double kappa;
    double alpha;
};

// alpha such that |mz+n|^2 >= alpha (m^2+n^2) when z is in the fundamental
// domain (|Re z| <= 1/2) and |z| >= kappa; cos_bound generalizes the |cos t|
// estimate for slightly widened real parts.
inline double alpha_general(double kappa, double cos_bound) {
    double k2 = kappa * kappa;
    double d = (k2 - 1) * (k2 - 1) + 4 * cos_bound * cos_bound;
    return 0.5 * (k2 + 1 - std::sqrt(d));
}

inline AlphaKappa alpha_kappa(double kappa) {
    if (kappa < 1) throw std::invalid_argument("alpha_kappa: kappa must be >= 1");
    return {kappa, alpha_general(kappa, 1.0 / std::sqrt(4 * kappa * kappa + 1))};
}

// |R^{a,b,>t}_{k,Gamma}| <= h 4(t+1)(2 sqrt(t+1)+1) / ((t+1) alpha_kappa)^{k/2}
inline double remainder_bound_alpha(double h, double t, int k, double alpha) {
    double tp = t + 1;
    return h * 4 * tp * (2 * std::sqrt(tp) + 1) / std::pow(tp * alpha, 0.5 * k);
}

inline double remainder_bound(double h, double t, int k, double kappa) {
    return remainder_bound_alpha(h, t, k, alpha_kappa(kappa).alpha);
}

enum class EvalMethod { lattice, qexpansion };

template <class Real>
struct EvalResult {
    Cplx<Real> value{};
    Real truncation_error{};  // rigorous bound on the dropped tail
    Real rounding_slack{};    // n_terms * 2^{1-p} * sum |term|
    double truncation_t = 0;  // lattice t, or number of q-expansion terms
    EvalMethod method = EvalMethod::lattice;

    Real error_bound() const { return truncation_error + rounding_slack; }
};

// Orbit of (A,B) under the coset group, as distinct vectors with multiplicity.
inline std::vector<std::pair<Vec2, int64_t>> orbit_indices(const CongruenceGroup& G,
                                                           const SeriesIndex& idx) {
    if (G.N != idx.N) throw LevelMismatch("group level != index level");
    std::map<Vec2, int64_t> mult;
    for (auto& g : G.cosets) ++mult[vector_action({idx.A, idx.B}, g)];
    return {mult.begin(), mult.end()};
}

// Exact constant Fourier coefficient of the normalized trace form at the
// infinite cusp: sum over cosets of B_k({alpha a + gamma b}).
inline Rational constant_coeff_infty(const CongruenceGroup& G, const SeriesIndex& idx,
                                     int k) {
    if (G.N != idx.N) throw LevelMismatch("group level != index level");
    Rational s = 0;
    for (auto& g : G.cosets) s += bernoulli_at(k, g.a * idx.A + g.c * idx.B, idx.N);
    return s;
}

template <class Real>
class SeriesEvaluator {
  public:
    SeriesEvaluator(const CongruenceGroup& G, const SeriesIndex& idx, int k)
        : N_(idx.N), k_(k), idx_(idx), orbit_(orbit_indices(G, idx)), tab_(idx.N) {
        if (k < 3) throw std::invalid_argument("weight must be >= 3");
        h_ = 0;
        for (auto& [v, m] : orbit_) h_ += m;
        prec_bits_ = real_traits<Real>::precision_bits();
        // (2 pi i)^k / (k-1)!
        Real two_pi = 2 * pi_const<Real>();
        Cplx<Real> ik = pow_int(Cplx<Real>(Real(0), Real(1)), k);
        Real p = 1;
        for (int j = 1; j <= k; ++j) p *= two_pi / (j < k ? Real(j) : Real(1));
        pref_ = ik * p;
        Rational c0 = 0;
        for (auto& [v, m] : orbit_)
            c0 -= Rational(m) * bernoulli_at(k, v.A, N_) / k;
        const_term_q_ = Cplx<Real>(rational_to_real<Real>(c0));
    }

    int weight() const { return k_; }
    int64_t level() const { return N_; }
    int64_t h() const { return h_; }
    const SeriesIndex& index() const { return idx_; }

    // Combined lattice coefficient: sum over the orbit of
    // e(a'n - b'm) + e(-(a'n - b'm)) = 2 cos(2 pi (A'n - B'm)/N).
    Real lattice_coeff(int64_t m, int64_t n) const {
        Real c = 0;
        for (auto& [v, mult] : orbit_)
            c += Real(2 * mult) * tab_.cos_at(imod(v.A * n - v.B * m, N_));
        return c;
    }

    // ---- lattice evaluation -------------------------------------------------

    // Fixed truncation t; caller guarantees |z| >= kappa and
    // |Re z| <= 1/2 + re_slack.
    EvalResult<Real> eval_lattice_t(const Cplx<Real>& z, double t, double kappa = 1.0,
                                    double re_slack = 0.0) const {
        if (k_ % 2) throw std::invalid_argument("lattice evaluator needs even weight");
        check_region(z, kappa, re_slack);
        double alpha = alpha_general(kappa, cos_bound(kappa, re_slack));
        EvalResult<Real> r;
        r.method = EvalMethod::lattice;
        r.truncation_t = t;
        Real sum_abs = 0;
        Cplx<Real> acc{Real(0), Real(0)};
        size_t n_terms = 0;
        int64_t mmax = static_cast<int64_t>(std::sqrt(t));
        for (int64_t m = 0; m <= mmax; ++m) {
            int64_t nmax = static_cast<int64_t>(std::sqrt(t - double(m) * double(m)));
            int64_t nmin = (m == 0) ? 1 : -nmax;
            Cplx<Real> mz = z * Real(m);
            for (int64_t n = nmin; n <= nmax; ++n) {
                if (m == 0 && n == 0) continue;
                Real c = lattice_coeff(m, n);
                Cplx<Real> term = Cplx<Real>(c) / pow_int(mz + Cplx<Real>(Real(n)), k_);
                acc += term;
                sum_abs += term.abs();
                ++n_terms;
            }
        }
        r.value = acc;
        r.truncation_error = Real(remainder_bound_alpha(double(h_), t, k_, alpha) *
                                  (1 + 1e-9));
        r.rounding_slack =
            Real(2.0 * (double(n_terms) + 64)) * ldexp_pos(sum_abs, -int(prec_bits_));
        return r;
    }

    // Smallest t certifying eps, by doubling.
    static double lattice_t_for(double h, int k, double eps, double alpha,
                                double t_cap = 3e7) {
        double t = 2;
        while (remainder_bound_alpha(h, t, k, alpha) > eps) {
            t *= 2;
            if (t > t_cap) return -1;
        }
        return t;
    }

    EvalResult<Real> eval_lattice(const Cplx<Real>& z, const Real& eps, double kappa = 1.0,
                                  double re_slack = 0.0) const {
        if (k_ % 2) throw std::invalid_argument("lattice evaluator needs even weight");
        check_region(z, kappa, re_slack);
        double alpha = alpha_general(kappa, cos_bound(kappa, re_slack));
        double t = lattice_t_for(double(h_), k_, double(eps) * 0.9, alpha);
        if (t < 0)
            throw PrecisionInsufficient("lattice truncation for requested eps is infeasible");
        auto r = eval_lattice_t(z, t, kappa, re_slack);
        if (r.rounding_slack > eps)
            throw PrecisionInsufficient("rounding slack exceeds target eps");
        return r;
    }

    // ---- q-expansion evaluation ---------------------------------------------

    // Partial series with M terms. Tail certified through
    // |sigma_{k-1}[a,b](n)| <= 2 sigma_{k-1}(n) <= 2 n^k.
    EvalResult<Real> eval_qexp_n(const Cplx<Real>& z, int M) const {
        using std::exp;
        using std::pow;
        if (!(z.im > 0)) throw RegionViolation("q-expansion needs Im z > 0");
        extend_qcoeffs(M);
        EvalResult<Real> r;
        r.method = EvalMethod::qexpansion;
        r.truncation_t = M;
        Real two_pi = 2 * pi_const<Real>();
        Real qmod = exp(-two_pi * z.im / Real(N_));
        Cplx<Real> q = polar_unit(two_pi * z.re / Real(N_)) * qmod;
        Cplx<Real> acc = const_term_q_;
        Real sum_abs = const_term_q_.abs();
        Real nk1 = pow(Real(N_), 1 - k_);
        Cplx<Real> qn(Real(1));
        for (int n = 1; n <= M; ++n) {
            qn *= q;
            Cplx<Real> term = qc_[n - 1] * qn * nk1;
            acc += term;
            sum_abs += term.abs();
        }
        // tail: 2 h sum_{n>M} n^k |q|^n, ratio bounded by |q| (1+1/(M+1))^k
        Real ratio = qmod * pow(Real(1) + Real(1) / Real(M + 1), k_);
        if (!(ratio < 1))
            throw TailBoundDiverges("Im z too small for this term count");
        Real tail = Real(2 * h_) * pow(Real(M + 1), k_) * pow(qmod, M + 1) / (1 - ratio);
        Real pa = pref_.abs();
        r.value = pref_ * acc;
        r.truncation_error = pa * nk1 * tail;
        r.rounding_slack =
            Real(2.0 * (M + 65.0)) * ldexp_pos(pa * sum_abs, -int(prec_bits_));
        return r;
    }

    // Smallest M certifying eps (estimated in double, then verified exactly).
    EvalResult<Real> eval_qexp(const Cplx<Real>& z, const Real& eps) const {
        int M = qexp_terms_for(double(z.im), double(eps) * 0.9);
        if (M < 0) throw TailBoundDiverges("q-expansion tail does not certify");
        auto r = eval_qexp_n(z, M);
        int guard = 0;
        while (r.truncation_error > eps * Real(0.95) && guard++ < 8) {
            M *= 2;
            r = eval_qexp_n(z, M);
        }
        if (r.error_bound() > eps)
            throw PrecisionInsufficient("q-expansion cannot certify eps at this precision");
        return r;
    }

    int qexp_terms_for(double y, double eps) const {
        double lq = -2 * M_PI * y / double(N_);
        double lpref = std::log(2 * double(h_)) + log_pref_abs() + (1 - k_) * std::log(double(N_));
        for (int M = 8; M <= (1 << 22); M *= 2) {
            double ratio = std::exp(lq) * std::pow(1 + 1.0 / (M + 1), k_);
            if (ratio >= 1) continue;
            double ltail = lpref + k_ * std::log(M + 1.0) + (M + 1) * lq - std::log1p(-ratio);
            if (ltail < std::log(eps)) return M;
        }
        return -1;
    }

    // Max |single q-term| estimate, used for the cancellation/slack check.
    double qexp_peak_log(double y) const {
        double lq = -2 * M_PI * y / double(N_);
        double npeak = std::max(1.0, -double(k_) / lq);
        return std::log(2.0 * double(h_)) + log_pref_abs() + (1 - k_) * std::log(double(N_)) +
               k_ * std::log(npeak) + npeak * lq;
    }

    // ---- automatic dispatch ---------------------------------------------------

    EvalResult<Real> eval(const Cplx<Real>& z, const Real& eps, double kappa = 1.0,
                          double re_slack = 0.0) const {
        double eps_d = double(eps);
        double alpha = alpha_general(kappa, cos_bound(kappa, re_slack));
        double t_lat = lattice_t_for(double(h_), k_, eps_d * 0.9, alpha);
        double cost_lat = t_lat < 0 ? -1 : 2.0 * t_lat * double(orbit_.size());
        int m_q = qexp_terms_for(double(z.im), eps_d * 0.9);
        // cancellation kills the q-path when the peak term dwarfs eps at p bits
        if (m_q > 0 &&
            qexp_peak_log(double(z.im)) + std::log(4.0 * m_q) - prec_bits_ * std::log(2.0) >
                std::log(eps_d * 0.25))
            m_q = -1;
        double cost_q = m_q < 0 ? -1 : 3.0 * m_q;
        if (cost_lat < 0 && cost_q < 0)
            throw PrecisionInsufficient("neither evaluator certifies the requested eps");
        if (cost_q >= 0 && (cost_lat < 0 || cost_q <= cost_lat)) {
            try {
                return eval_qexp(z, eps);
            } catch (const PrecisionInsufficient&) {
                if (cost_lat < 0) throw;
            }
        }
        return eval_lattice(z, eps, kappa, re_slack);
    }

    // ---- uncertified fast path for Newton refinement -------------------------

    bool fast_ready() const { return fast_ready_; }

    void prepare_fast(double y_min, double eps, double kappa = 1.0,
                      double re_slack = 0.05) {
        fast_ready_ = true;
        double alpha = alpha_general(std::max(kappa, 0.9), cos_bound(kappa, re_slack));
        double t_lat = lattice_t_for(double(h_), k_, eps, alpha);
        int m_q = qexp_terms_for(y_min, eps);
        if (m_q > 0 && qexp_peak_log(y_min) + std::log(4.0 * m_q) -
                           prec_bits_ * std::log(2.0) > std::log(eps * 0.25))
            m_q = -1;
        double cost_lat = t_lat < 0 ? -1 : 2.0 * t_lat * double(orbit_.size());
        if (m_q >= 0 && (cost_lat < 0 || 3.0 * m_q <= cost_lat)) {
            fast_method_ = EvalMethod::qexpansion;
            fast_n_ = m_q;
            extend_qcoeffs(fast_n_);
        } else if (t_lat > 0) {
            fast_method_ = EvalMethod::lattice;
            fast_t_ = t_lat;
        } else {
            throw PrecisionInsufficient("no fast evaluator for requested eps");
        }
    }

    Cplx<Real> eval_fast(const Cplx<Real>& z) const {
        if (fast_method_ == EvalMethod::qexpansion) return qexp_value(z, fast_n_, false);
        return lattice_value(z, fast_t_, false);
    }

    Cplx<Real> deriv_fast(const Cplx<Real>& z) const {
        if (fast_method_ == EvalMethod::qexpansion) return qexp_value(z, fast_n_, true);
        return lattice_value(z, fast_t_, true);
    }

  private:
    static Real ldexp_pos(const Real& x, int e) {
        using std::ldexp;
        using std::pow;
        if constexpr (std::is_same_v<Real, double>) return ldexp(x, e);
        else return x * pow(Real(2), e);
    }

    double log_pref_abs() const {
        double lp = 0;
        for (int j = 1; j <= k_; ++j)
            lp += std::log(2 * M_PI) - (j < k_ ? std::log(double(j)) : 0.0);
        return lp;
    }

    static double cos_bound(double kappa, double re_slack) {
        return std::min(1.0, (0.5 + re_slack) / std::max(kappa, 1e-9));
    }

    void check_region(const Cplx<Real>& z, double kappa, double re_slack) const {
        if (double(z.norm()) < kappa * kappa * (1 - 1e-12))
            throw RegionViolation("|z| < kappa: lattice certificate does not apply");
        if (std::fabs(double(z.re)) > 0.5 + re_slack + 1e-12)
            throw RegionViolation("|Re z| outside the certified strip");
    }

    // sigma_{k-1}[a,b](n) = sum over j | n, j = A mod N of sgn(j) e(b n/j) j^{k-1},
    // j running over both signs; combined over the orbit.
    void add_divisor_terms(Cplx<Real>& s, int64_t dd, int64_t n) const {
        using std::pow;
        Real dk = pow(Real(dd), k_ - 1);
        for (auto& [v, mult] : orbit_) {
            if (imod(dd - v.A, N_) == 0)
                s += tab_.cis(imod(v.B * (n / dd), N_)) * (dk * Real(mult));
            if (imod(-dd - v.A, N_) == 0) {
                Real sg = (k_ % 2 == 0) ? Real(1) : Real(-1);
                s += tab_.cis(imod(-v.B * (n / dd), N_)) * (dk * sg * Real(mult));
            }
        }
    }

    void extend_qcoeffs(int M) const {
        int old = static_cast<int>(qc_.size());
        if (M <= old) return;
        qc_.resize(M);
        for (int n = old + 1; n <= M; ++n) {
            Cplx<Real> s{Real(0), Real(0)};
            for (int64_t d = 1; d * d <= n; ++d) {
                if (n % d) continue;
                add_divisor_terms(s, d, n);
                if (d != n / d) add_divisor_terms(s, n / d, n);
            }
            qc_[n - 1] = s;
        }
    }

    Cplx<Real> qexp_value(const Cplx<Real>& z, int M, bool deriv) const {
        using std::exp;
        extend_qcoeffs(M);
        Real two_pi = 2 * pi_const<Real>();
        Real qmod = exp(-two_pi * z.im / Real(N_));
        Cplx<Real> q = polar_unit(two_pi * z.re / Real(N_)) * qmod;
        Cplx<Real> acc = deriv ? Cplx<Real>(Real(0)) : const_term_q_;
        Cplx<Real> qn(Real(1));
        using std::pow;
        Real nk1 = pow(Real(N_), 1 - k_);
        Cplx<Real> ifac = Cplx<Real>(Real(0), two_pi / Real(N_));
        for (int n = 1; n <= M; ++n) {
            qn *= q;
            Cplx<Real> term = qc_[n - 1] * qn * nk1;
            if (deriv) term = term * ifac * Real(n);
            acc += term;
        }
        return pref_ * acc;
    }

    Cplx<Real> lattice_value(const Cplx<Real>& z, double t, bool deriv) const {
        Cplx<Real> acc{Real(0), Real(0)};
        int64_t mmax = static_cast<int64_t>(std::sqrt(t));
        for (int64_t m = 0; m <= mmax; ++m) {
            int64_t nmax = static_cast<int64_t>(std::sqrt(t - double(m) * double(m)));
            int64_t nmin = (m == 0) ? 1 : -nmax;
            Cplx<Real> mz = z * Real(m);
            for (int64_t n = nmin; n <= nmax; ++n) {
                if (m == 0 && n == 0) continue;
                Real c = lattice_coeff(m, n);
                Cplx<Real> w = mz + Cplx<Real>(Real(n));
                if (!deriv) {
                    acc += Cplx<Real>(c) / pow_int(w, k_);
                } else if (m != 0) {
                    acc += Cplx<Real>(c * Real(-k_) * Real(m)) / pow_int(w, k_ + 1);
                }
            }
        }
        return acc;
    }

    int64_t N_;
    int k_;
    SeriesIndex idx_;
    std::vector<std::pair<Vec2, int64_t>> orbit_;
    CosTable<Real> tab_;
    int64_t h_ = 1;
    unsigned prec_bits_ = 53;
    Cplx<Real> pref_;          // (2 pi i)^k/(k-1)!
    Cplx<Real> const_term_q_;  // sum over orbit of -B_k({a'})/k
    mutable std::vector<Cplx<Real>> qc_;

    bool fast_ready_ = false;
    EvalMethod fast_method_ = EvalMethod::lattice;
    double fast_t_ = 30;
    int fast_n_ = 64;
};

// Truncated constant term C^{a,b,<=t}: the direct n-sum and the Kluyver-sum
// form (they must agree; both are returned).
struct TruncatedConstant {
    double direct;
    double kluyver;
};

inline TruncatedConstant truncated_constant(const CongruenceGroup& G,
                                            const SeriesIndex& idx, int k, double t) {
    auto orbit = orbit_indices(G, idx);
    const auto& tab = detail::cos_table(idx.N);
    int64_t nmax = static_cast<int64_t>(std::sqrt(t));
    double direct = 0;
    for (auto& [v, mult] : orbit)
        for (int64_t n = 1; n <= nmax; ++n)
            direct += 2.0 * mult * tab.cos_at(imod(v.A * n, idx.N)) / std::pow(double(n), k);
    double klu = 0;
    for (int64_t j = 1; j <= nmax; ++j)
        klu += rho_ab(G, idx.A, idx.B, j) / std::pow(double(j), k);
    return {direct, klu};
}

// Norm form: product of all E_k^{a,b} over (A,B) in [0,N)^2 (and over the
// distinct SL2(Z/N)-conjugates when a non-normal group is supplied).
// Declared weight k N^2 (#conjugates).
template <class Real>
struct NormFormResult {
    Cplx<Real> value;
    Real error_bound;
    int64_t weight;
};

template <class Real>
NormFormResult<Real> norm_form_eval(const CongruenceGroup& G, int k, const Cplx<Real>& z,
                                    const Real& eps_factor) {
    std::vector<CongruenceGroup> groups;
    if (G.order() == 1 || G.family == Family::Principal)
        groups.push_back(G);
    else
        groups = conjugate_subgroups(G);
    Cplx<Real> prod{Real(1)};
    Real lo = 1, hi = 1;
    for (auto& Gc : groups)
        for (int64_t A = 0; A < G.N; ++A)
            for (int64_t B = 0; B < G.N; ++B) {
                SeriesEvaluator<Real> ev(Gc, SeriesIndex(A, B, G.N), k);
                auto r = ev.eval(z, eps_factor);
                prod *= r.value;
                Real m = r.value.abs(), e = r.error_bound();
                hi *= m + e;
                lo *= m > e ? m - e : Real(0);
            }
    NormFormResult<Real> out;
    out.value = prod;
    out.error_bound = hi - lo;
    out.weight = k * G.N * G.N * static_cast<int64_t>(groups.size());
    return out;
}

// The primitive-index series form a basis iff N is squarefree; for small N the
// character-table minor is also rank-checked numerically.
inline bool primitive_basis_predicate(int64_t N) {
    bool squarefree = (radical(N) == N);
    if (N > 6 || N < 2) return N == 1 ? true : squarefree;
    std::vector<Vec2> prim;
    for (int64_t A = 0; A < N; ++A)
        for (int64_t B = 0; B < N; ++B)
            if (igcd(igcd(A == 0 ? N : A, B == 0 ? N : B), N) == 1)
                prim.push_back({A, B});
    size_t n = prim.size();
    std::vector<std::vector<Cplx<double>>> M(n, std::vector<Cplx<double>>(n));
    CosTable<double> tab(N);
    for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < n; ++c)
            M[r][c] = tab.cis(imod(prim[r].A * prim[c].B - prim[r].B * prim[c].A, N));
    // LU with partial pivoting; singular iff a pivot collapses
    double min_pivot = 1e300;
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (M[r][col].norm() > M[piv][col].norm()) piv = r;
        std::swap(M[col], M[piv]);
        double p = std::sqrt(M[col][col].norm());
        min_pivot = std::min(min_pivot, p);
        if (p < 1e-9) break;
        for (size_t r = col + 1; r < n; ++r) {
            Cplx<double> f = M[r][col] / M[col][col];
            for (size_t c = col; c < n; ++c) M[r][c] -= f * M[col][c];
        }
    }
    bool invertible = min_pivot > 1e-9 * double(n) * double(N);
    if (invertible != squarefree)
        throw std::logic_error("basis predicate rank check disagrees with squarefree test");
    return squarefree;
}

}  // namespace eiszero
