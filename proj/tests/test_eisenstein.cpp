#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "eiszero/eisenstein.hpp"

using namespace eiszero;

using C = Cplx<double>;

static double rat_to_double(const Rational& r) {
    return double(boost::multiprecision::numerator(r)) /
           double(boost::multiprecision::denominator(r));
}

TEST_CASE("alpha_kappa values") {
    auto a1 = alpha_kappa(1);
    REQUIRE(a1.alpha == Catch::Approx(1 - 1 / std::sqrt(5.0)).epsilon(1e-12));
    REQUIRE(a1.alpha >= 0.5);
    auto a2 = alpha_kappa(2);
    REQUIRE(a2.alpha == Catch::Approx(0.9805).margin(5e-4));
    REQUIRE(a2.alpha >= 0.9);
    REQUIRE(alpha_kappa(3).alpha >= 0.99);
    // monotone to 1
    double prev = 0;
    for (double kap = 1; kap < 40; kap += 0.5) {
        double a = alpha_kappa(kap).alpha;
        REQUIRE(a > prev);
        prev = a;
    }
    REQUIRE(alpha_kappa(1000).alpha == Catch::Approx(1.0).margin(1e-4));
}

TEST_CASE("remainder bound formula") {
    double b = remainder_bound(1, 2, 4, 1);
    REQUIRE(b == Catch::Approx(12 * (2 * std::sqrt(3.0) + 1) /
                               std::pow(3 * alpha_kappa(1).alpha, 2))
                     .epsilon(1e-9));
    REQUIRE(b == Catch::Approx(19.47).margin(0.02));
    // monotone decreasing in k once (t+1) alpha > 1
    for (int k = 4; k <= 40; k += 2)
        REQUIRE(remainder_bound(1, 3, k + 2, 1) < remainder_bound(1, 3, k, 1));
    // the k-dependence matches the 80 h / 2^{k/2} shape at t = 3
    for (int k = 4; k <= 24; k += 2)
        REQUIRE(remainder_bound(1, 3, k, 1) <=
                80.0 / std::pow(2.0 * alpha_kappa(1).alpha, 0.5 * k) + 1e-12);
}

TEST_CASE("orbit indices") {
    auto gp = coset_reps(Family::Principal, 5);
    auto o1 = orbit_indices(gp, SeriesIndex(2, 3, 5));
    REQUIRE(o1.size() == 1);
    REQUIRE(o1[0].first == Vec2{2, 3});
    REQUIRE(o1[0].second == 1);

    auto lam = coset_reps(Family::Theta, 2);
    auto o2 = orbit_indices(lam, SeriesIndex(1, 0, 2));
    REQUIRE(o2.size() == 2);
    REQUIRE(o2[0].first == Vec2{0, 1});
    REQUIRE(o2[1].first == Vec2{1, 0});

    auto g1 = coset_reps(Family::Gamma1, 4);
    auto o3 = orbit_indices(g1, SeriesIndex(1, 0, 4));
    REQUIRE(o3.size() == 4);  // {(1,0),(1,1),(1,2),(1,3)}
    for (auto& [v, m] : o3) {
        REQUIRE(v.A == 1);
        REQUIRE(m == 1);
    }

    REQUIRE_THROWS_AS(orbit_indices(gp, SeriesIndex(0, 0, 3)), LevelMismatch);
}

TEST_CASE("lattice and q-expansion agree") {
    auto gp = coset_reps(Family::Principal, 3);
    SeriesEvaluator<double> ev(gp, SeriesIndex(1, 0, 3), 6);
    C z{0.0, 2.0};
    auto rl = ev.eval_lattice(z, 1e-8, 2.0);
    auto rq = ev.eval_qexp(z, 1e-10);
    double d = (rl.value - rq.value).abs();
    REQUIRE(d <= double(rl.error_bound() + rq.error_bound()));

    // at a generic point with both paths
    C z2{-0.31, 1.07};
    SeriesEvaluator<double> ev2(gp, SeriesIndex(2, 1, 3), 8);
    auto a = ev2.eval_lattice(z2, 1e-7);
    auto b = ev2.eval_qexp(z2, 1e-10);
    REQUIRE((a.value - b.value).abs() <= double(a.error_bound() + b.error_bound()));
}

TEST_CASE("eisrel transformation relations hold numerically") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ux(-0.45, 0.45), uy(1.01, 1.8);
    int64_t N = 5;
    auto gp = coset_reps(Family::Principal, N);
    for (int trial = 0; trial < 6; ++trial) {
        int64_t A = trial % N, B = (2 * trial + 1) % N;
        int k = 8;
        C z{ux(rng), uy(rng)};
        SeriesEvaluator<double> e_ab(gp, SeriesIndex(A, B, N), k);
        SeriesEvaluator<double> e_neg(gp, SeriesIndex(-A, -B, N), k);
        auto v1 = e_ab.eval(z, 1e-9);
        auto v2 = e_neg.eval(z, 1e-9);
        REQUIRE((v1.value - v2.value).abs() <= 2.1e-9);  // (-1)^k = 1

        // E(z+1) = E^{a,a+b}(z)
        SeriesEvaluator<double> e_shift(gp, SeriesIndex(A, A + B, N), k);
        auto v3 = e_ab.eval(z + C{1.0, 0.0}, 1e-9, 1.0, 1.0);
        auto v4 = e_shift.eval(z, 1e-9);
        REQUIRE((v3.value - v4.value).abs() <= 2.1e-9);

        // E(-1/z) = z^k E^{-b,a}(z)
        SeriesEvaluator<double> e_s(gp, SeriesIndex(-B, A, N), k);
        C minv = C{-1.0, 0.0} / z;
        auto v5 = e_ab.eval(C{minv.re, minv.im}, 1e-9, 0.5, 1.0);
        auto v6 = e_s.eval(z, 1e-11);
        REQUIRE((v5.value - pow_int(z, k) * v6.value).abs() <=
                1e-9 + std::pow(z.abs(), k) * 1e-10);

        // conj(E^{a,b}(z)) = E^{a,-b}(-conj z)
        SeriesEvaluator<double> e_c(gp, SeriesIndex(A, -B, N), k);
        auto v7 = e_c.eval(C{-z.re, z.im}, 1e-9);
        REQUIRE((v1.value.conj() - v7.value).abs() <= 2.1e-9);
    }
}

TEST_CASE("trace form equals orbit sum of plain series") {
    int64_t N = 6;
    auto g0 = coset_reps(Family::Gamma0, N);
    auto gp = coset_reps(Family::Principal, N);
    SeriesIndex idx(1, 2, N);
    int k = 6;
    C z{0.21, 1.33};
    SeriesEvaluator<double> trace(g0, idx, k);
    auto tv = trace.eval(z, 1e-8);
    C sum{0, 0};
    double err = 0;
    for (auto& [v, mult] : orbit_indices(g0, idx)) {
        SeriesEvaluator<double> ev(gp, SeriesIndex(v.A, v.B, N), k);
        auto r = ev.eval(z, 1e-10);
        sum += r.value * double(mult);
        err += mult * double(r.error_bound());
    }
    REQUIRE((tv.value - sum).abs() <= double(tv.error_bound()) + err);
}

TEST_CASE("constant coefficient at infinity: closed forms") {
    // Gamma1(5), a = 1/5, k = 4  ->  5 B_4(1/5)
    auto g1 = coset_reps(Family::Gamma1, 5);
    auto poly4 = bernoulli_poly(4);
    REQUIRE(constant_coeff_infty(g1, SeriesIndex(1, 3, 5), 4) ==
            Rational(5) * poly4(Rational(1, 5)));

    // Lambda: B_k(a) + B_k(b); equals 2 B_k at (0,0)
    auto lam = coset_reps(Family::Theta, 2);
    auto poly6 = bernoulli_poly(6);
    REQUIRE(constant_coeff_infty(lam, SeriesIndex(0, 0, 2), 6) ==
            Rational(2) * poly6(Rational(0)));
    REQUIRE(constant_coeff_infty(lam, SeriesIndex(1, 0, 2), 6) ==
            poly6(Rational(1, 2)) + poly6(Rational(0)));

    // Gamma0(N), A in [1,N): N sum_alpha B_k({alpha a}) =
    //   B_k N / M^{k-1} phi(N)/phi(M) prod_{p | M}(1 - p^{k-1}),  M = N/(N,A)
    for (int64_t N = 2; N <= 12; ++N) {
        auto g0 = coset_reps(Family::Gamma0, N);
        for (int64_t A = 1; A < N; ++A)
            for (int k : {4, 6, 8, 10}) {
                int64_t M = N / igcd(N, A);
                Int Mk = 1;
                for (int i = 0; i < k - 1; ++i) Mk *= M;
                Rational closed = bernoulli_numbers(k)[k] * Rational(N) / Rational(Mk) *
                                  Rational(euler_phi(N), euler_phi(M));
                for (auto& [p, e] : factorize(M)) {
                    Int pk = 1;
                    for (int i = 0; i < k - 1; ++i) pk *= p;
                    closed *= Rational(1) - Rational(pk);
                }
                REQUIRE(constant_coeff_infty(g0, SeriesIndex(A, 3 % N, N), k) == closed);
            }
    }
}

TEST_CASE("truncated constant term") {
    // Gamma(N), t = 2: 2 cos(2 pi A / N)
    for (int64_t N : {3, 5, 8}) {
        auto gp = coset_reps(Family::Principal, N);
        for (int64_t A = 0; A < N; ++A) {
            auto tc = truncated_constant(gp, SeriesIndex(A, 1, N), 8, 2);
            REQUIRE(tc.direct == Catch::Approx(2 * std::cos(2 * M_PI * A / N)).margin(1e-12));
            REQUIRE(tc.kluyver == Catch::Approx(tc.direct).margin(1e-12));
        }
    }
    // Gamma(8), A=2, t=4: 2cos(pi/2) + 2cos(pi)/2^k = -2^{1-k}
    auto g8 = coset_reps(Family::Principal, 8);
    for (int k : {4, 8, 12}) {
        auto tc = truncated_constant(g8, SeriesIndex(2, 0, 8), k, 4);
        REQUIRE(tc.direct == Catch::Approx(-std::pow(2.0, 1 - k)).margin(1e-14));
        REQUIRE(tc.kluyver == Catch::Approx(tc.direct).margin(1e-14));
    }
    // t -> infinity limit matches the exact rational constant coefficient:
    // C^{<= t} -> -(-1)^{k/2} (2 pi)^k / k! * (bsum)
    {
        int64_t N = 5;
        int k = 6;
        auto gp = coset_reps(Family::Principal, N);
        SeriesIndex idx(2, 1, N);
        auto tc = truncated_constant(gp, idx, k, 1e4);
        double target = -std::pow(-1.0, k / 2) * std::pow(2 * M_PI, k) *
                        rat_to_double(constant_coeff_infty(gp, idx, k));
        for (int j = 1; j <= k; ++j) target /= j;
        REQUIRE(tc.kluyver == Catch::Approx(target).margin(1e-8));
    }
}

TEST_CASE("lattice value at iY tends to the constant coefficient") {
    int64_t N = 4;
    int k = 6;
    auto gp = coset_reps(Family::Principal, N);
    for (int64_t A = 0; A < N; ++A) {
        SeriesIndex idx(A, 1, N);
        SeriesEvaluator<double> ev(gp, idx, k);
        auto r = ev.eval_lattice(C{0.0, 20.0}, 1e-5, 20.0);
        // normalized: (k-1)!/(2 pi i)^k E(iY)  ->  -B_k(a)/k
        // (the remaining m != 0 terms at Y = 20 are below e^{-31})
        double pref = std::pow(2 * M_PI, k) * std::pow(-1.0, k / 2);
        for (int j = 1; j < k; ++j) pref /= j;
        double want = -rat_to_double(bernoulli_at(k, A, N)) / k;
        REQUIRE(r.value.re / pref == Catch::Approx(want).margin(1e-7));
        REQUIRE(std::abs(r.value.im / pref) < 1e-7);
    }
}

TEST_CASE("certificate soundness under eps refinement") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.87, 2.5);
    std::uniform_int_distribution<int64_t> uN(1, 5);
    std::uniform_int_distribution<int> uk(2, 6);
    for (int trial = 0; trial < 60; ++trial) {
        int64_t N = uN(rng);
        int k = 2 * uk(rng);
        std::uniform_int_distribution<int64_t> uAB(0, N - 1);
        SeriesIndex idx(uAB(rng), uAB(rng), N);
        auto gp = coset_reps(Family::Principal, N);
        SeriesEvaluator<double> ev(gp, idx, k);
        C z{ux(rng), uy(rng)};
        if (z.norm() < 1.0001) z.im = std::sqrt(1.0001 - z.re * z.re) + 0.01;
        double eps = 1e-6;
        auto r1 = ev.eval(z, eps);
        auto r2 = ev.eval(z, eps / 100);
        REQUIRE((r1.value - r2.value).abs() <= eps);
    }
}

TEST_CASE("high precision evaluation at 128 bits") {
    PrecisionGuard guard(128);
    using R = BigFloat;
    auto gp = coset_reps(Family::Principal, 3);
    SeriesEvaluator<R> ev(gp, SeriesIndex(1, 0, 3), 6);
    Cplx<R> z{R(0), R(2)};
    auto r = ev.eval_qexp(z, R(1e-25));
    REQUIRE(double(r.error_bound()) < 1e-24);
    SeriesEvaluator<double> evd(gp, SeriesIndex(1, 0, 3), 6);
    auto rd = evd.eval(Cplx<double>{0.0, 2.0}, 1e-9);
    REQUIRE(std::abs(double(r.value.re) - rd.value.re) < 1e-9);
    REQUIRE(std::abs(double(r.value.im) - rd.value.im) < 1e-9);
}

TEST_CASE("norm form") {
    // N=1: the single factor is the classical Eisenstein series
    auto g1 = coset_reps(Family::Principal, 1);
    auto nf = norm_form_eval<double>(g1, 8, C{0.13, 1.4}, 1e-9);
    SeriesEvaluator<double> ev(g1, SeriesIndex(0, 0, 1), 8);
    auto r = ev.eval(C{0.13, 1.4}, 1e-9);
    REQUIRE((nf.value - r.value).abs() <= 1e-8);
    REQUIRE(nf.weight == 8);

    // nonvanishing high in the cusp and weight bookkeeping
    auto g3 = coset_reps(Family::Principal, 3);
    auto nf3 = norm_form_eval<double>(g3, 4, C{0.0, 6.0}, 1e-10);
    REQUIRE(nf3.weight == 36);
    REQUIRE(nf3.value.abs() > nf3.error_bound);
}

TEST_CASE("primitive basis predicate") {
    REQUIRE(primitive_basis_predicate(1));
    REQUIRE(primitive_basis_predicate(2));
    REQUIRE(primitive_basis_predicate(3));
    REQUIRE_FALSE(primitive_basis_predicate(4));
    REQUIRE(primitive_basis_predicate(5));
    REQUIRE(primitive_basis_predicate(6));
    REQUIRE_FALSE(primitive_basis_predicate(8));
    REQUIRE_FALSE(primitive_basis_predicate(9));
    REQUIRE(primitive_basis_predicate(10));
}

TEST_CASE("degenerate weights are rejected") {
    auto gp = coset_reps(Family::Principal, 3);
    REQUIRE_THROWS_AS(SeriesEvaluator<double>(gp, SeriesIndex(1, 0, 3), 2),
                      std::invalid_argument);
    SeriesEvaluator<double> odd(gp, SeriesIndex(1, 0, 3), 5);
    REQUIRE_THROWS_AS(odd.eval_lattice(C{0.0, 1.5}, 1e-6), std::invalid_argument);
    SeriesEvaluator<double> ev(gp, SeriesIndex(1, 0, 3), 8);
    REQUIRE_THROWS_AS(ev.eval_lattice(C{0.0, 0.5}, 1e-6), RegionViolation);
}

TEST_CASE("exact-to-float conversion survives large power-of-two factors") {
    // boost 1.74 corrupts the direct cpp_int -> mpfr conversion for some limb
    // patterns; conversions must go through int_to_real / rational_to_real.
    PrecisionGuard guard(160);
    Int bad("327135326787718654675491225600");  // 541200 * 2^79
    BigFloat via_helper = int_to_real<BigFloat>(bad);
    BigFloat via_string("327135326787718654675491225600");
    REQUIRE(via_helper == via_string);
    Rational r = Rational(Int("-143531742398845896012634103722237"), bad);
    BigFloat q = rational_to_real<BigFloat>(r);
    REQUIRE(double(q) == Catch::Approx(-438.753416845).epsilon(1e-9));
}

TEST_CASE("evaluators agree at high weight where cancellation is severe") {
    // regression: the constant term of E_40^{1/4,0} once differed between the
    // two evaluators by 5.4e-17 (conversion bug above)
    PrecisionGuard guard(200);
    auto g4 = coset_reps(Family::Principal, 4);
    SeriesEvaluator<BigFloat> ev(g4, SeriesIndex(1, 0, 4), 40);
    for (double y : {1.2, 1.9753766382581865, 4.0}) {
        Cplx<BigFloat> z{BigFloat("-0.3128689232814138"), BigFloat(y)};
        auto rl = ev.eval_lattice(z, BigFloat(1e-30), 0.9, 0.01);
        auto rq = ev.eval_qexp(z, BigFloat(1e-40));
        REQUIRE(double((rl.value - rq.value).abs()) <=
                double(rl.error_bound() + rq.error_bound()));
    }
}

TEST_CASE("q-expansion error paths") {
    auto gp = coset_reps(Family::Principal, 3);
    SeriesEvaluator<double> ev(gp, SeriesIndex(1, 0, 3), 8);
    // Im z too small for the term count to certify a geometric tail
    REQUIRE_THROWS_AS(ev.eval_qexp_n(C{0.0, 0.005}, 4), TailBoundDiverges);
    REQUIRE_THROWS_AS(ev.eval_qexp_n(C{0.0, -1.0}, 16), RegionViolation);
    // odd weight works through the q-expansion (k >= 3)
    SeriesEvaluator<double> odd(gp, SeriesIndex(1, 2, 3), 5);
    auto r = odd.eval_qexp(C{0.1, 1.4}, 1e-10);
    REQUIRE(double(r.error_bound()) < 1e-10);
}
