#include <cmath>
#include <string>

#include "doctest.h"
#include "ultraslow/cmcheck.hpp"
#include "ultraslow/kernels.hpp"
#include "ultraslow/volterra.hpp"

using namespace ultraslow;

namespace {

// e^t / 2^gamma - eps^gamma_{alpha,p}(t), lambda = 1, through the nu series
RealFn eps_gap(real alpha, real gamma, real p) {
    VPArgs a;
    a.params.alpha = alpha;
    a.params.gamma = gamma;
    a.params.lambda = 1;
    a.p = p;
    return [a, gamma](real t) { return std::exp(t) / std::pow(real(2), gamma) - vp_epsilon(a, t, VPRoute::NuSeries).value; };
}

}  // namespace

TEST_CASE("canonical CM function") {
    const auto r = check_cm([](real s) { return 1 / s; }, 0.1L, 10, 4);
    CHECK(r.passed());
    CHECK(r.violations.empty());
    CHECK(r.grid.size() == 24);
    CHECK(r.grid.front() > 0.1L);
    CHECK(r.grid.back() < 10);
    CHECK(r.note.find("not proof") != std::string::npos);
    CHECK(r.noise_floor < 1e-3L);
}

TEST_CASE("kernels and the partner") {
    CHECK(check_cm([](real t) { return m1_time(t); }, 0.1L, 5, 4, 1e-10L, {"M1"}).passed());
    CHECK(check_cm([](real t) { return k1_time(t).value; }, 0.1L, 5, 4, 1e-10L, {"k1"}).passed());
    CHECK(check_cm([](real t) { return k2_time(0.5L, 0.5L, 1, t).value; }, 0.1L, 5, 4, 1e-10L, {"k2"}).passed());
}

TEST_CASE("controls are flagged") {
    const auto up = check_cm([](real t) { return std::exp(t); }, 0.1L, 2, 1);
    CHECK(up.verdict == CmVerdict::ViolationFound);
    CHECK(up.violations.size() == up.grid.size());
    for (const auto& v : up.violations) CHECK(v.order == 1);
    CHECK(up.passed_to(0));

    // positive and decreasing, but concave below 1/sqrt 3
    const auto r = check_cm([](real t) { return 1 / (1 + t * t); }, 0.1L, 5, 4);
    CHECK_FALSE(r.passed());
    CHECK(r.passed_to(1));
    CHECK_FALSE(r.passed_to(2));
}

TEST_CASE("passing at order n implies passing below n") {
    for (int n = 0; n <= 6; ++n) {
        CAPTURE(n);
        const auto r = check_cm([](real t) { return std::exp(-2 * t) + 1 / t; }, 0.2L, 4, n);
        CHECK(r.passed());
        CHECK(r.max_order_checked == n);
    }
    // and a failure found at order k is still there when more orders are asked for
    const RealFn f = [](real t) { return std::exp(-t) * (1 + std::sin(5 * t) / 10); };
    for (int n = 1; n <= 6; ++n) {
        const auto lo = check_cm(f, 0.1L, 3, n - 1), hi = check_cm(f, 0.1L, 3, n);
        if (!lo.passed()) CHECK_FALSE(hi.passed());
        CHECK(hi.passed_to(n - 1) == lo.passed());
    }
}

TEST_CASE("e^t - nu(t)") {
    const RealFn f = [](real t) { return std::exp(t) - nu(t).value; };
    CHECK(check_cm(f, 0.05L, 3, 4, 1e-10L, {"e^t - nu", 24, 1e-13L}).passed());
    CHECK(check_log_convex(f, 0.05L, 3).passed());
}

TEST_CASE("exponential gap of the Volterra-Prabhakar function") {
    // (0.4, 2): the spectral density is positive and the gap is CM
    CHECK(check_cm(eps_gap(0.4L, 2, 0.8L), 0.1L, 3, 4, 1e-10L, {"eps 0.4 2", 24, 1e-13L}).passed());
    // (0.4, 3): the density changes sign and the gap is increasing near t = 0.1
    const auto r = check_cm(eps_gap(0.4L, 3, 1.2L), 0.1L, 3, 4, 1e-10L, {"eps 0.4 3", 24, 1e-13L});
    CHECK(r.verdict == CmVerdict::ViolationFound);
    CHECK(r.passed_to(0));
    CHECK_FALSE(r.passed_to(1));
    // the sampled values agree with the branch-cut integral
    CHECK(double(eps_gap(0.4L, 3, 1.2L)(1)) == doctest::Approx(double(spectral_laplace(0.4L, 3, 1.2L, 1).value)).epsilon(1e-12));
}

TEST_CASE("zero shift on (0, 1)") {
    // e^t/2^gamma - eps^gamma_{alpha,0} is the positive one; the opposite sign is negative
    for (auto [alpha, gamma] : {std::pair{0.75L, 1.0L}, std::pair{1.0L, 0.5L}}) {
        CAPTURE(double(alpha));
        const auto f = eps_gap(alpha, gamma, 0);
        CHECK(f(0.5L) > 0);
        const auto r = check_cm(f, 0.05L, 0.95L, 4, 1e-10L, {"eps p=0", 24, 1e-13L});
        CHECK(r.passed());
    }
}

TEST_CASE("Bernstein and log-convex tests") {
    const RealFn psi = [](real s) { return s == 1 ? real(1) : (s - 1) / std::log(s); };
    CHECK(check_bernstein(psi, 0.1L, 10, 4).passed());
    // sqrt is Bernstein; s^2 is increasing but its derivative grows
    CHECK(check_bernstein([](real s) { return std::sqrt(s); }, 0.1L, 10, 4).passed());
    const auto sq = check_bernstein([](real s) { return s * s; }, 0.1L, 10, 2);
    CHECK_FALSE(sq.passed());
    CHECK(sq.passed_to(1));

    CHECK(check_log_convex([](real t) { return 1 / t; }, 0.1L, 5).passed());
    // log-concave
    CHECK_FALSE(check_log_convex([](real t) { return std::exp(-t * t); }, 0.1L, 3).passed());
    CHECK_THROWS_AS(check_log_convex([](real t) { return std::cos(t); }, 0.1L, 3), DomainError);
}

TEST_CASE("argument checks") {
    const RealFn f = [](real s) { return 1 / s; };
    CHECK_THROWS_AS(check_cm(f, 0, 1), DomainError);
    CHECK_THROWS_AS(check_cm(f, 2, 1), DomainError);
    CHECK_THROWS_AS(check_cm(f, 0.1L, 1, 7), DomainError);
    CHECK_THROWS_AS(check_bernstein(f, 0.1L, 1, 0), DomainError);
    CHECK_THROWS_AS(check_cm([](real) -> real { throw NonConvergence("boom"); }, 0.1L, 1), NonConvergence);
}

TEST_CASE("json report") {
    const auto r = check_cm([](real t) { return std::exp(t); }, 0.1L, 2, 1, 1e-10L, {"exp"});
    const std::string j = to_json(r);
    CHECK(j.find("\"verdict\": \"ViolationFound\"") != std::string::npos);
    CHECK(j.find("\"id\": \"exp\"") != std::string::npos);
    CHECK(j.find("\"order\": 1") != std::string::npos);
    CHECK(j.find("not proof") != std::string::npos);
}
