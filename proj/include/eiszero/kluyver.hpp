// Kluyver sums rho_G^{v,w}(j) = 2 sum_{g in G} cos(2 pi j v g w^T / N) and the
// kappa invariants (smallest j with nonvanishing sum). kappa controls both the
// zero-free region height and the limit-configuration index sets.
//
// rho is a sum of at most 2|G| cosines of rational angles; the nonzero values
// met at desk scale are bounded well away from 0, so a fixed threshold decides
// (non)vanishing without exact cyclotomic arithmetic.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "eiszero/arith.hpp"
#include "eiszero/cnum.hpp"
#include "eiszero/groups.hpp"

namespace eiszero {

inline constexpr double kRhoZeroThreshold = 1e-6;

struct KappaNotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KappaReport {
    int64_t kappa = 0;      // = witness_j
    int64_t witness_j = 0;
    double rho_at_kappa = 0;
    int64_t search_bound = 0;
};

namespace detail {
inline const CosTable<double>& cos_table(int64_t N) {
    static thread_local std::map<int64_t, CosTable<double>> tables;
    auto it = tables.find(N);
    if (it == tables.end()) it = tables.emplace(N, CosTable<double>(N)).first;
    return it->second;
}
}  // namespace detail

// Exponents v g w^T mod N over the group, computed once per (G,v,w).
inline std::vector<int64_t> kluyver_exponents(const CongruenceGroup& G, const Vec2& v,
                                              const Vec2& w) {
    std::vector<int64_t> e;
    e.reserve(G.cosets.size());
    for (auto& g : G.cosets) {
        Vec2 vg = vector_action(v, g);
        e.push_back(imod(vg.A * w.A + vg.B * w.B, G.N));
    }
    return e;
}

inline double rho(const CongruenceGroup& G, const Vec2& v, const Vec2& w, int64_t j) {
    const auto& tab = detail::cos_table(G.N);
    double s = 0;
    for (int64_t e : kluyver_exponents(G, v, w)) s += tab.cos_at(e * imod(j, G.N));
    return 2 * s;
}

inline Cplx<double> rho_hat(const CongruenceGroup& G, const Vec2& v, const Vec2& w,
                            int64_t j) {
    const auto& tab = detail::cos_table(G.N);
    Cplx<double> s{0.0, 0.0};
    for (int64_t e : kluyver_exponents(G, v, w)) s += tab.cis(imod(e * imod(j, G.N), G.N));
    return s;
}

// rho for the index pair (a,b) = (A/N, B/N): v = (A,B), w = (1,0).
inline double rho_ab(const CongruenceGroup& G, int64_t A, int64_t B, int64_t j) {
    return rho(G, {imod(A, G.N), imod(B, G.N)}, {1, 0}, j);
}

// Smallest j >= 1 with rho != 0. The minimum over nonvanishing j divides N
// and is <= 2|G|; divisors of N are searched first, then a linear fallback.
inline KappaReport kappa_vw(const CongruenceGroup& G, const Vec2& v, const Vec2& w,
                            double threshold = kRhoZeroThreshold) {
    auto exps = kluyver_exponents(G, v, w);
    const auto& tab = detail::cos_table(G.N);
    auto rho_of = [&](int64_t j) {
        double s = 0;
        for (int64_t e : exps) s += tab.cos_at(e * imod(j, G.N));
        return 2 * s;
    };
    int64_t bound = 2 * G.order();
    KappaReport rep;
    rep.search_bound = bound;
    int64_t best = -1;
    double best_rho = 0;
    for (int64_t j : divisors(G.N)) {
        double r = rho_of(j);
        if (std::abs(r) > threshold) {
            best = j;
            best_rho = r;
            break;
        }
    }
    // A nonvanishing divisor always exists; the linear scan below is a
    // numerical guard (it can only lower the result or rescue a threshold
    // failure, never raise it).
    int64_t scan_to = best > 0 ? best - 1 : bound;
    for (int64_t j = 1; j <= scan_to; ++j) {
        double r = rho_of(j);
        if (std::abs(r) > threshold) {
            best = j;
            best_rho = r;
            break;
        }
    }
    if (best < 0) throw KappaNotFound("rho vanished numerically for all candidate j");
    // the minimum nonvanishing index divides N and is at most 2|G|; a
    // violation can only come from a threshold failure
    if (G.N % best != 0 || best > bound)
        throw KappaNotFound("kappa candidate violates divisibility bounds");
    rep.kappa = rep.witness_j = best;
    rep.rho_at_kappa = best_rho;
    return rep;
}

inline KappaReport kappa_ab(const CongruenceGroup& G, int64_t A, int64_t B,
                            double threshold = kRhoZeroThreshold) {
    return kappa_vw(G, {imod(A, G.N), imod(B, G.N)}, {1, 0}, threshold);
}

// kappa_Gamma = max over all v,w of kappa_vw; looping over vectors replaces
// looping over conjugate subgroups.
inline KappaReport kappa_group(const CongruenceGroup& G,
                               double threshold = kRhoZeroThreshold) {
    KappaReport best;
    for (int64_t a = 0; a < G.N; ++a)
        for (int64_t b = 0; b < G.N; ++b)
            for (int64_t c = 0; c < G.N; ++c)
                for (int64_t d = 0; d < G.N; ++d) {
                    KappaReport r = kappa_vw(G, {a, b}, {c, d}, threshold);
                    if (r.kappa > best.kappa) best = r;
                }
    if (best.kappa == 0) throw KappaNotFound("empty kappa search");
    return best;
}

}  // namespace eiszero
