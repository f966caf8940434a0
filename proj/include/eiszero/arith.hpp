// Exact number-theoretic primitives: rationals, Bernoulli polynomials,
// multiplicative functions, Ramanujan and Kloosterman sums.
//
// Everything here is exact except kloosterman_sum, which is a floating-point
// sum of cosines of rational angles (only its (non)vanishing matters
// downstream, tested against a threshold well below the observed gap).

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace eiszero {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;  // always stored reduced, den > 0

inline int64_t imod(int64_t a, int64_t n) {
    int64_t r = a % n;
    return r < 0 ? r + n : r;
}

inline int64_t igcd(int64_t a, int64_t b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) { int64_t t = a % b; a = b; b = t; }
    return a;
}

// Trial division; inputs here are levels and truncation indices (<= ~10^6).
inline std::vector<std::pair<int64_t, int>> factorize(int64_t n) {
    if (n < 1) throw std::invalid_argument("factorize: n must be >= 1");
    std::vector<std::pair<int64_t, int>> f;
    for (int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) { n /= p; ++e; }
            f.emplace_back(p, e);
        }
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

inline int mobius(int64_t n) {
    int m = 1;
    for (auto& [p, e] : factorize(n)) {
        if (e > 1) return 0;
        m = -m;
    }
    return m;
}

inline int64_t euler_phi(int64_t n) {
    int64_t r = n;
    for (auto& [p, e] : factorize(n)) r = r / p * (p - 1);
    return r;
}

inline int64_t radical(int64_t n) {
    int64_t r = 1;
    for (auto& [p, e] : factorize(n)) r *= p;
    return r;
}

inline std::vector<int64_t> divisors(int64_t n) {
    std::vector<int64_t> d{1};
    for (auto& [p, e] : factorize(n)) {
        size_t sz = d.size();
        int64_t pk = 1;
        for (int i = 1; i <= e; ++i) {
            pk *= p;
            for (size_t j = 0; j < sz; ++j) d.push_back(d[j] * pk);
        }
    }
    std::sort(d.begin(), d.end());
    return d;
}

// Ramanujan sum c_n(q) = mu(n/(n,q)) * phi(n)/phi(n/(n,q)); integer-valued.
inline int64_t ramanujan_sum(int64_t n, int64_t q) {
    if (n < 1) throw std::invalid_argument("ramanujan_sum: n must be >= 1");
    int64_t g = igcd(n, imod(q, n) == 0 ? n : q);
    int64_t m = n / g;
    int mu = mobius(m);
    if (mu == 0) return 0;
    return mu * (euler_phi(n) / euler_phi(m));
}

inline Int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    Int r = 1;
    for (int i = 0; i < k; ++i) { r *= n - i; r /= i + 1; }
    return r;
}

// Bernoulli numbers B_0..B_k, convention B_1 = -1/2
// (so that B_1(x) = x - 1/2).
inline std::vector<Rational> bernoulli_numbers(int k) {
    std::vector<Rational> B(k + 1);
    B[0] = 1;
    for (int m = 1; m <= k; ++m) {
        Rational s = 0;
        for (int j = 0; j < m; ++j) s += Rational(binomial(m + 1, j)) * B[j];
        B[m] = -s / (m + 1);
    }
    return B;
}

struct BernoulliPoly {
    int degree;
    std::vector<Rational> coeff;  // ascending degree, coeff.size() == degree+1

    Rational operator()(const Rational& x) const {
        Rational v = 0;
        for (int i = degree; i >= 0; --i) v = v * x + coeff[i];
        return v;
    }
};

// B_k(x) = sum_{j=0}^{k} C(k,j) B_j x^{k-j}
inline BernoulliPoly bernoulli_poly(int k) {
    if (k < 0) throw std::invalid_argument("bernoulli_poly: k must be >= 0");
    auto B = bernoulli_numbers(k);
    BernoulliPoly p;
    p.degree = k;
    p.coeff.assign(k + 1, Rational(0));
    for (int j = 0; j <= k; ++j) p.coeff[k - j] = Rational(binomial(k, j)) * B[j];
    return p;
}

inline Rational fractional_part(const Rational& x) {
    Int num = boost::multiprecision::numerator(x);
    Int den = boost::multiprecision::denominator(x);
    Int q = num / den;
    if (num < 0 && q * den != num) q -= 1;  // floor
    return x - Rational(q);
}

// Cached B_k evaluated at {r/N}: exact rationals reused heavily by the
// constant-coefficient sums.
inline Rational bernoulli_at(int k, int64_t r, int64_t N) {
    static thread_local std::map<std::pair<int, int64_t>, std::vector<Rational>> cache;
    auto key = std::make_pair(k, N);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto poly = bernoulli_poly(k);
        std::vector<Rational> vals(N);
        for (int64_t j = 0; j < N; ++j) vals[j] = poly(Rational(j, N));
        it = cache.emplace(key, std::move(vals)).first;
    }
    return it->second[imod(r, N)];
}

// Modular inverse for a unit mod n.
inline int64_t inv_mod(int64_t a, int64_t n) {
    int64_t t = 0, newt = 1, r = n, newr = imod(a, n);
    while (newr != 0) {
        int64_t q = r / newr;
        int64_t tmp = t - q * newt; t = newt; newt = tmp;
        tmp = r - q * newr; r = newr; newr = tmp;
    }
    if (r != 1) throw std::invalid_argument("inv_mod: not a unit");
    return imod(t, n);
}

// Kloosterman sum S(a,b;n) = sum over units alpha of e((alpha a + alpha^-1 b)/n).
// Real by the alpha <-> -alpha symmetry; evaluated in floating point.
template <class Real>
Real kloosterman_sum(int64_t a, int64_t b, int64_t n) {
    if (n < 1) throw std::invalid_argument("kloosterman_sum: n must be >= 1");
    const Real two_pi = 2 * acos(Real(-1));
    Real s = 0;
    for (int64_t alpha = 0; alpha < n; ++alpha) {
        if (igcd(alpha == 0 ? n : alpha, n) != 1) continue;
        int64_t ai = inv_mod(alpha, n);
        int64_t e = imod(alpha * imod(a, n) + ai * imod(b, n), n);
        s += cos(two_pi * Real(e) / Real(n));
    }
    return s;
}

}  // namespace eiszero
