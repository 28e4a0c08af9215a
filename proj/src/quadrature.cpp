#include "ultraslow/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

namespace ultraslow::quad {

namespace bq = boost::math::quadrature;

namespace {

// The engines grow their node tables lazily, so each thread keeps its own.
bq::tanh_sinh<real>& tanh_sinh_engine() {
    thread_local bq::tanh_sinh<real> engine(15);
    return engine;
}

bq::exp_sinh<real>& exp_sinh_engine() {
    thread_local bq::exp_sinh<real> engine(12);
    return engine;
}

bq::sinh_sinh<real>& sinh_sinh_engine() {
    thread_local bq::sinh_sinh<real> engine(12);
    return engine;
}

template <class Body>
QuadResult guarded(const char* what, Body&& body) {
    try {
        QuadResult r = body();
        if (!std::isfinite(r.value)) throw QuadratureFailure(std::string(what) + ": non-finite result");
        return r;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw QuadratureFailure(std::string(what) + ": " + e.what());
    }
}

}  // namespace

QuadResult tanh_sinh(const Integrand& f, real a, real b, real tol) {
    if (a == b) return {};
    if (b < a) {
        QuadResult r = tanh_sinh(f, b, a, tol);
        r.value = -r.value;
        return r;
    }
    return guarded("tanh_sinh", [&] {
        QuadResult r;
        r.value = tanh_sinh_engine().integrate([&](real x) { return f(x); }, a, b, tol, &r.abs_err, &r.l1);
        r.abs_err = std::max(r.abs_err, tol * r.l1);
        return r;
    });
}

QuadResult tanh_sinh_split(const SplitIntegrand& f, real a, real b, real tol) {
    if (a == b) return {};
    if (b < a) throw DomainError("tanh_sinh_split: b < a");
    const real half = (b - a) / 2;
    // Left half in terms of d = x - a, right half in terms of e = b - x.
    QuadResult left = tanh_sinh([&](real d) { return f(a + d, d, (b - a) - d); }, 0, half, tol);
    QuadResult right = tanh_sinh([&](real e) { return f(b - e, (b - a) - e, e); }, 0, half, tol);
    return {left.value + right.value, left.abs_err + right.abs_err, left.l1 + right.l1};
}

QuadResult gauss_kronrod(const Integrand& f, real a, real b, real tol, int max_depth) {
    if (a == b) return {};
    return guarded("gauss_kronrod", [&] {
        QuadResult r;
        r.value = bq::gauss_kronrod<real, 31>::integrate([&](real x) { return f(x); }, a, b, static_cast<unsigned>(max_depth), tol,
                                                          &r.abs_err, &r.l1);
        return r;
    });
}

QuadResult gauss_kronrod_panels(const Integrand& f, const std::vector<real>& breaks, real tol) {
    QuadResult total;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        QuadResult r = gauss_kronrod(f, breaks[i], breaks[i + 1], tol);
        total.value += r.value;
        total.abs_err += r.abs_err;
        total.l1 += r.l1;
    }
    return total;
}

QuadResult exp_sinh(const Integrand& f, real a, real tol) {
    return guarded("exp_sinh", [&] {
        QuadResult r;
        r.value = exp_sinh_engine().integrate([&](real x) { return f(x); }, a, std::numeric_limits<real>::infinity(), tol, &r.abs_err, &r.l1);
        return r;
    });
}

QuadResult sinh_sinh(const Integrand& f, real tol) {
    return guarded("sinh_sinh", [&] {
        QuadResult r;
        r.value = sinh_sinh_engine().integrate([&](real x) { return f(x); }, tol, &r.abs_err, &r.l1);
        return r;
    });
}

QuadResult log_cauchy(const Integrand& g, real tol, real focus_x) {
    using constants::pi;
    auto mapped = [&](real theta) -> real {
        const real x = pi * std::tan(theta);
        if (!std::isfinite(x)) return 0;
        return g(x) / pi;
    };
    std::vector<real> breaks = {-pi / 2, -1.2L, 0, 1.2L, pi / 2};
    if (std::isfinite(focus_x)) {
        const real tf = std::atan(focus_x / pi);
        breaks.push_back(tf);
        breaks.push_back(std::atan((focus_x - 3) / pi));
        breaks.push_back(std::atan((focus_x + 3) / pi));
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [](real a, real b) { return std::fabs(a - b) < 1e-6L; }),
                 breaks.end());
    QuadResult total;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const QuadResult r = tanh_sinh(mapped, breaks[i], breaks[i + 1], tol);
        total.value += r.value;
        total.abs_err += r.abs_err;
        total.l1 += r.l1;
    }
    return total;
}

}  // namespace ultraslow::quad
