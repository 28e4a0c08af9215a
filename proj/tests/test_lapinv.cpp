#include <cmath>

#include "doctest.h"
#include "ultraslow/lapinv.hpp"

using namespace ultraslow;

namespace {

LaplaceFn simple(std::function<cplx(cplx)> f, real abscissa = 0) {
    LaplaceFn L;
    L.eval = std::move(f);
    L.abscissa = abscissa;
    L.name = "test";
    return L;
}

IltConfig talbot_cfg() {
    IltConfig c;
    c.method = IltMethod::ShiftedTalbot;
    return c;
}

}  // namespace

TEST_CASE("elementary inverses") {
    auto one = simple([](cplx s) { return real(1) / s; });
    auto ramp = simple([](cplx s) { return real(1) / (s * s); });
    for (real t : {0.3L, 1.0L, 4.0L}) {
        CHECK(std::fabs(double(ilt(one, t).value - 1)) < 1e-6);
        CHECK(std::fabs(double(ilt(ramp, t).value - t)) < 1e-6 * t);
        CHECK(std::fabs(double(ilt(one, t, talbot_cfg()).value - 1)) < 1e-10);
        CHECK(std::fabs(double(ilt(ramp, t, talbot_cfg()).value - t)) < 1e-10 * t);
    }
}

TEST_CASE("Gaver-Stehfest and Talbot agree with known inverses") {
    // Sixteen Stehfest terms stall near 1e-5 on decaying exponentials at t ~ 10;
    // twenty terms is the extended-precision sweet spot.
    IltConfig gs;
    gs.gs_terms = 20;
    const real a = 0.7L, nu = 0.4L;
    auto expo = simple([=](cplx s) { return real(1) / (s + a); });
    auto power = simple([=](cplx s) { return std::pow(s, cplx(-nu)); });
    for (real t = 0.1L; t <= 10; t *= 1.6L) {
        const real e = std::exp(-a * t);
        const real p = std::pow(t, nu - 1) / std::tgamma(nu);
        CHECK(std::fabs(double(gaver_stehfest([&](real s) { return expo(s); }, t, gs.gs_terms).value - e)) < 1e-6);
        CHECK(std::fabs(double(ilt(expo, t, talbot_cfg()).value - e)) < 1e-6);
        CHECK(std::fabs(double(ilt(power, t, gs).value - p)) < 1e-6 * std::max<real>(1, p));
        CHECK(std::fabs(double(ilt(power, t, talbot_cfg()).value - p)) < 1e-6 * std::max<real>(1, p));
    }
}

TEST_CASE("shifted inversion handles singularities right of the origin") {
    // 1/(s - 2) -> e^{2t}
    auto grow = simple([](cplx s) { return real(1) / (s - real(2)); }, 2);
    CHECK(double(ilt(grow, 1, talbot_cfg()).value) == doctest::Approx(std::exp(2.0)).epsilon(1e-10));
    CHECK(double(ilt(grow, 1).value) == doctest::Approx(std::exp(2.0)).epsilon(1e-6));
    IltConfig bad;
    bad.shift = 0;
    CHECK_THROWS_AS(ilt(grow, 1, bad), SingularSample);
}

TEST_CASE("removable point and kernel transforms") {
    const auto k1 = make_kernel_laplace(MemoryKernel::distributed(), LaplaceObject::Kernel);
    const auto m1 = make_kernel_laplace(MemoryKernel::distributed(), LaplaceObject::Partner);
    CHECK(k1(1.0L) == 1);
    CHECK(m1(1.0L) == 1);
    CHECK(double(k1(1 + 1e-9L)) == doctest::Approx(1 - 0.5e-9).epsilon(1e-15));
    CHECK(std::isfinite(double(k1(1 + 2e-16L))));

    const auto mk = MemoryKernel::distributed_prabhakar(0.5L, 0.5L, 1);
    const auto k2 = make_kernel_laplace(mk, LaplaceObject::Kernel);
    const auto m2 = make_kernel_laplace(mk, LaplaceObject::Partner);
    for (real s : {0.5L, 1.0L, 2.0L, 10.0L}) CHECK(std::fabs(double(s * k2(s) * m2(s) - 1)) < 1e-15);
    for (real s = 1e-3L; s <= 1e3L; s *= 1.5L) {
        CHECK(std::fabs(double(s * k1(s) * m1(s) - 1)) < 1e-12);
        CHECK(std::fabs(double(s * k2(s) * m2(s) - 1)) < 1e-12);
    }
    // k2^(s -> 0) ~ lambda^gamma s^{-(1 + alpha gamma)} / ln(1/s)
    const real s = 1e-6L;
    const real asym = std::pow(s, -(1 + 0.25L)) / std::log(1 / s);
    CHECK(double(k2(s) / asym) == doctest::Approx(1).epsilon(0.05));
    // Fading memory: 1/(s k^(s)) -> 0 as s -> infinity
    CHECK(double(1 / (1e8L * k1(1e8L))) < 1e-4);
    CHECK(double(1 / (1e8L * k2(1e8L))) < 1e-4);
}

TEST_CASE("single-order kernels") {
    const auto K1 = make_kernel_laplace(MemoryKernel::caputo(0.3L), LaplaceObject::Kernel);
    // k(t) = t^{-mu}/Gamma(1 - mu)
    const real t = 1.7L;
    CHECK(double(ilt(K1, t, talbot_cfg()).value) == doctest::Approx(double(std::pow(t, -0.3L) / std::tgamma(0.7L))).epsilon(1e-9));
}
