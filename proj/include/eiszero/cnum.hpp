// Complex arithmetic over a generic real type.
//
// The library runs either on plain double (p = 53) or on MPFR floats with a
// runtime-selected precision. std::complex is not specified for
// multiprecision types, so we carry a minimal complex struct of our own.

#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

namespace eiszero {

using BigFloat = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                               boost::multiprecision::et_off>;

inline unsigned bits_to_digits10(unsigned bits) {
    return static_cast<unsigned>(bits * 0.30103) + 2;
}

// Scoped default precision for BigFloat construction (thread-local in boost).
class PrecisionGuard {
  public:
    explicit PrecisionGuard(unsigned bits)
        : saved_(BigFloat::default_precision()) {
        BigFloat::default_precision(bits_to_digits10(bits));
    }
    ~PrecisionGuard() { BigFloat::default_precision(saved_); }
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

  private:
    unsigned saved_;
};

template <class Real>
struct real_traits {
    static constexpr unsigned precision_bits() { return 53; }
};
template <>
struct real_traits<BigFloat> {
    static unsigned precision_bits() {
        return static_cast<unsigned>(BigFloat::default_precision() * 3.3219) + 1;
    }
};

template <class Real>
Real pi_const() {
    using std::acos;
    return acos(Real(-1));
}

// Conversions from exact integers/rationals go through decimal strings: the
// direct cpp_int -> mpfr interconversion in boost 1.74 silently corrupts some
// limb patterns (observed: 541200 * 2^79 came out wrong by 3e-5).
template <class Real, class IntT>
Real int_to_real(const IntT& n) {
    if constexpr (std::is_same_v<Real, double>) {
        return n.template convert_to<double>();
    } else {
        std::ostringstream os;
        os << n;
        return Real(os.str());
    }
}

template <class Real, class Rat>
Real rational_to_real(const Rat& q) {
    return int_to_real<Real>(numerator(q)) / int_to_real<Real>(denominator(q));
}

template <class Real>
struct Cplx {
    Real re{}, im{};

    Cplx() = default;
    Cplx(Real r) : re(std::move(r)), im(Real(0)) {}
    Cplx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

    Cplx operator-() const { return {-re, -im}; }
    Cplx operator+(const Cplx& o) const { return {re + o.re, im + o.im}; }
    Cplx operator-(const Cplx& o) const { return {re - o.re, im - o.im}; }
    Cplx operator*(const Cplx& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    Cplx operator*(const Real& s) const { return {re * s, im * s}; }
    Cplx operator/(const Real& s) const { return {re / s, im / s}; }
    Cplx operator/(const Cplx& o) const {
        Real d = o.re * o.re + o.im * o.im;
        return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
    }
    Cplx& operator+=(const Cplx& o) { re += o.re; im += o.im; return *this; }
    Cplx& operator-=(const Cplx& o) { re -= o.re; im -= o.im; return *this; }
    Cplx& operator*=(const Cplx& o) { *this = *this * o; return *this; }

    Cplx conj() const { return {re, -im}; }
    Real norm() const { return re * re + im * im; }
    Real abs() const { using std::sqrt; return sqrt(norm()); }
    Real arg() const { using std::atan2; return atan2(im, re); }
};

template <class Real>
Cplx<Real> operator*(const Real& s, const Cplx<Real>& z) { return z * s; }

// z^n for integer n (binary powering; n may be negative).
template <class Real>
Cplx<Real> pow_int(Cplx<Real> z, long n) {
    if (n < 0) return Cplx<Real>(Real(1)) / pow_int(z, -n);
    Cplx<Real> r(Real(1));
    while (n) {
        if (n & 1) r *= z;
        z *= z;
        n >>= 1;
    }
    return r;
}

template <class Real>
Cplx<Real> polar_unit(const Real& angle) {
    using std::cos;
    using std::sin;
    return {cos(angle), sin(angle)};
}

// cos/sin(2*pi*e/N) for integer residues e; one table per (N, precision).
template <class Real>
class CosTable {
  public:
    CosTable() = default;
    explicit CosTable(int64_t N) : N_(N), c_(N), s_(N) {
        Real two_pi = 2 * pi_const<Real>();
        for (int64_t e = 0; e < N; ++e) {
            using std::cos;
            using std::sin;
            Real x = two_pi * Real(e) / Real(N);
            c_[e] = cos(x);
            s_[e] = sin(x);
        }
    }
    int64_t modulus() const { return N_; }
    const Real& cos_at(int64_t e) const { return c_[imod64(e)]; }
    const Real& sin_at(int64_t e) const { return s_[imod64(e)]; }
    Cplx<Real> cis(int64_t e) const { int64_t r = imod64(e); return {c_[r], s_[r]}; }

  private:
    int64_t imod64(int64_t e) const { int64_t r = e % N_; return r < 0 ? r + N_ : r; }
    int64_t N_ = 0;
    std::vector<Real> c_, s_;
};

}  // namespace eiszero
