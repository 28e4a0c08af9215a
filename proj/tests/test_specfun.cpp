#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>

#include "doctest.h"
#include "ultraslow/lapinv.hpp"
#include "ultraslow/specfun.hpp"

using namespace ultraslow;
using constants::euler_gamma;

namespace {

PrabhakarParams pp(real a, real b, real g, real lam = 0) {
    PrabhakarParams p;
    p.alpha = a;
    p.beta = b;
    p.gamma = g;
    p.lambda = lam;
    return p;
}

}  // namespace

TEST_CASE("reciprocal gamma vanishes at the poles") {
    for (int n = 0; n >= -6; --n) CHECK(rgamma(real(n)) == 0);
    CHECK(double(rgamma(0.5L)) == doctest::Approx(1 / std::sqrt(M_PI)).epsilon(1e-15));
    CHECK(double(rgamma(-0.5L)) == doctest::Approx(-1 / (2 * std::sqrt(M_PI))).epsilon(1e-15));
    CHECK(rgamma(1500.5L) > 0);
}

TEST_CASE("pochhammer") {
    CHECK(pochhammer(0.5L, 0) == 1);
    CHECK(double(pochhammer(0.5L, 3)) == doctest::Approx(0.5 * 1.5 * 2.5));
    CHECK(pochhammer(-2, 3) == 0);
}

TEST_CASE("digamma against boost and its recurrence") {
    CHECK(double(digamma(1)) == doctest::Approx(-0.5772156649015329).epsilon(1e-15));
    for (real x = 0.1L; x <= 10; x += 0.37L) {
        CHECK(std::fabs(double(digamma(x + 1) - digamma(x) - 1 / x)) < 1e-12);
        CHECK(double(digamma(x)) == doctest::Approx(boost::math::digamma(double(x))).epsilon(1e-13));
    }
    CHECK(double(digamma(-1.5L)) == doctest::Approx(boost::math::digamma(-1.5)).epsilon(1e-13));
    CHECK_THROWS_AS(digamma(0), DomainError);
    CHECK_THROWS_AS(digamma(-3), DomainError);
}

TEST_CASE("harmonic numbers tie to digamma and trigamma") {
    CHECK(harmonic(0, 1) == 0);
    CHECK(double(harmonic(4, 2)) == doctest::Approx(1 + 0.25 + 1.0 / 9 + 1.0 / 16));
    for (int n = 0; n < 30; ++n) {
        CHECK(std::fabs(double(digamma(n + 1) - (-euler_gamma + harmonic(n, 1)))) < 1e-15);
        // trigamma(n + 1) = pi^2/6 - H_n^(2), oracle from Boost
        const double tri = boost::math::trigamma(double(n + 1));
        CHECK(double(constants::pi2_over_6 - harmonic(n, 2)) == doctest::Approx(tri).epsilon(1e-14));
    }
}

TEST_CASE("exponential integrals") {
    CHECK(double(exp_integral_ei(-1)) == doctest::Approx(-0.21938393439552029).epsilon(1e-15));
    for (real x : {-60.0L, -7.5L, -1.0L, -0.01L, 0.01L, 0.5L, 3.0L, 39.0L, 41.0L, 80.0L}) {
        const double oracle = boost::math::expint(double(x));
        CHECK(double(exp_integral_ei(x)) == doctest::Approx(oracle).epsilon(1e-14));
    }
    for (real t : {0.1L, 1.0L, 2.5L, 10.0L}) {
        CHECK(double(exp_integral_e1(t)) == doctest::Approx(double(-exp_integral_ei(-t))).epsilon(1e-16));
        CHECK(double(ein(t)) == doctest::Approx(double(euler_gamma + std::log(t) + exp_integral_e1(t))).epsilon(1e-15));
        CHECK(double(scaled_e1(t)) == doctest::Approx(double(std::exp(t) * exp_integral_e1(t))).epsilon(1e-15));
    }
    CHECK(ein(0) == 0);
    // Ein(-u) = -sum u^k/(k k!)
    CHECK(double(ein(-1.5L)) == doctest::Approx(-(boost::math::expint(1.5) - 0.5772156649015329 - std::log(1.5))).epsilon(1e-14));
    const double e50 = double(exp_integral_e1(50));
    CHECK(e50 / (std::exp(-50.0) / 50) == doctest::Approx(1).epsilon(0.02));
    CHECK_THROWS_AS(exp_integral_ei(0), DomainError);
    CHECK_THROWS_AS(exp_integral_e1(0), DomainError);
}

TEST_CASE("hypergeometric series") {
    CHECK(double(hyper_pfq({1, 1}, {2, 2}, 0).value) == 1);
    // 2F2(1,1;2,2;-t) = (C + E1(t) + ln t)/t
    for (real t : {0.5L, 1.0L, 4.0L, 20.0L}) {
        const real expected = (euler_gamma + exp_integral_e1(t) + std::log(t)) / t;
        CHECK(double(hyper_pfq({1, 1}, {2, 2}, -t).value) == doctest::Approx(double(expected)).epsilon(1e-13));
    }
    CHECK(double(hyper_pfq({1, 1}, {2, 2}, -1).value) == doctest::Approx(0.79659959929705315).epsilon(1e-14));
    // 3F3(1,1,1;2,2,2;-1) by direct summation of sum (-1)^r / ((r+1)^3 r!)
    double direct = 0, fact = 1;
    for (int r = 0; r < 200; ++r) {
        if (r > 0) fact *= r;
        direct += (r % 2 ? -1.0 : 1.0) / (std::pow(r + 1.0, 3) * fact);
    }
    CHECK(double(hyper_pfq({1, 1, 1}, {2, 2, 2}, -1).value) == doctest::Approx(direct).epsilon(1e-15));
    // terminating
    CHECK(double(hyper_pfq({-2, 1}, {3}, 2).value) == doctest::Approx(1 - 2.0 * 2 / 3 + 2.0 * 4 / 12));
    CHECK_THROWS_AS(hyper_pfq({1}, {-1}, 0.5), DomainError);
    CHECK_THROWS_AS(hyper_pfq({1, 1, 1}, {2}, 0.5), DomainError);
}

TEST_CASE("three-parameter Mittag-Leffler: closed forms") {
    CHECK(double(mittag_leffler_3p(pp(0.7L, 0.3L, 0.5L), 0).value) == doctest::Approx(double(rgamma(0.3L))).epsilon(1e-16));
    CHECK(double(mittag_leffler_3p(pp(1, 1, 1), 1).value) == doctest::Approx(M_E).epsilon(1e-15));
    CHECK(double(mittag_leffler_3p(pp(1, 2, 1), -1).value) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(mittag_leffler_3p(pp(0.7L, 0, 0), 0).value == 0);
    CHECK(mittag_leffler_3p(pp(0.5L, 0, 0), -2.5L).value == 0);
    CHECK_THROWS_AS(mittag_leffler_3p(pp(0, 1, 1), 1), DomainError);
}

TEST_CASE("three-parameter Mittag-Leffler: frozen high-precision values") {
    struct Case {
        double a, b, g, z, expected;
    };
    // 40-digit reference values from an independent arbitrary-precision evaluation.
    const Case cases[] = {
        {0.5, 1, 0.5, -3, 0.4413272098724754723748644465673435367586},
        {0.7, 0.3, 0.5, -2.5, 0.00778126173529593713755730062503112203563},
        {0.5, 1, 0.5, -10, 0.2534767079262051321272796817937302998686},
        {0.4, 0.3, 0.8, -5, 0.005121859233662719491321348884468173904581},
        {0.4, 0.3, 0.8, -20, -0.0008318052404014648077318643339000843016829},
        {0.5, 1, 0.5, -60, 0.1050520304077820534390799454260427154124},
        {0.3, 0.7, 1.5, -100, 0.0002764959596905220537343880544201058719083},
        {0.9, 1.2, 0.6, -30, 0.09563421660696302300547217247345935281996},
        {1, 0.5, -2.5, 4, 4.641200603643888149676072978310254299715},
    };
    for (const auto& c : cases) {
        CAPTURE(c.a);
        CAPTURE(c.z);
        const auto r = mittag_leffler_3p(pp(c.a, c.b, c.g), c.z);
        CAPTURE(r.diagnostics);
        CHECK(std::fabs(double(r.value) - c.expected) < 1e-11 * std::max(1.0, std::fabs(c.expected)));
    }
}

TEST_CASE("Mittag-Leffler asymptotic and series/contour routes overlap") {
    EvalConfig cfg;
    for (double x : {50.0, 80.0}) {
        cfg.ml_asymptotic_crossover = 50;
        const auto asym = mittag_leffler_3p(pp(0.5L, 1, 0.5L), -x, cfg);
        cfg.ml_asymptotic_crossover = 1e9;
        const auto contour = mittag_leffler_3p(pp(0.5L, 1, 0.5L), -x, cfg);
        CHECK(asym.diagnostics == "route=asymptotic");
        CHECK(contour.diagnostics == "route=talbot");
        CHECK(std::fabs(double(asym.value - contour.value)) < 1e-11);
    }
}

TEST_CASE("Prabhakar function") {
    CHECK(double(prabhakar_e(pp(0.5L, 1, 0, 2), 3).value) == doctest::Approx(1.0));
    CHECK(double(prabhakar_e(pp(1, 1, 1, 1), 2).value) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    // gamma = 1, alpha = 1, beta = 2: e(t) = (1 - e^{-lambda t}) / lambda
    CHECK(double(prabhakar_e(pp(1, 2, 1, 0.7L), 1.3L).value) ==
          doctest::Approx((1 - std::exp(-0.7 * 1.3)) / 0.7).epsilon(1e-14));
    // beta = 0: the r = 0 term drops out
    CHECK(double(prabhakar_e(pp(1, 0, 1, 1), 0.5L).value) == doctest::Approx(-std::exp(-0.5)).epsilon(1e-14));
    // Inverse-Laplace oracle for s^{ag-b} / (s^a + lambda)^g
    const real a = 0.6L, b = 0.4L, g = 0.8L, lam = 1;
    auto F = [=](real s) { return std::pow(s, a * g - b) / std::pow(std::pow(s, a) + lam, g); };
    const auto gs = gaver_stehfest(F, 1, 16);
    CHECK(std::fabs(double(prabhakar_e(pp(a, b, g, lam), 1).value - gs.value)) < 1e-6);
    CHECK_THROWS_AS(prabhakar_e(pp(a, b, g, lam), 0), DomainError);
}

TEST_CASE("series error estimate does not grow with max_terms") {
    real prev = std::numeric_limits<real>::infinity();
    for (int n : {100, 120, 150, 200, 600}) {
        EvalConfig cfg;
        cfg.series.max_terms = n;
        const auto r = mittag_leffler_3p(pp(0.5L, 1, 0.5L), -3, cfg);
        CHECK(r.abs_err <= prev);
        prev = r.abs_err;
    }
    EvalConfig tight;
    tight.series.max_terms = 5;
    CHECK_THROWS_AS(mittag_leffler_3p(pp(0.5L, 1, 0.5L), -3, tight), NonConvergence);
}

TEST_CASE("double accumulator selection") {
    EvalConfig cfg;
    cfg.precision = Precision::Double;
    cfg.series.abs_tol = cfg.series.rel_tol = 1e-13L;
    const auto r = mittag_leffler_3p(pp(0.5L, 1, 0.5L), -3, cfg);
    CHECK(std::fabs(double(r.value) - 0.4413272098724754723748644465673435367586) < 1e-12);
}
