#include "ultraslow/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <sstream>
#include <vector>

#include "ultraslow/quadrature.hpp"
#include "ultraslow/specfun.hpp"

namespace ultraslow {

namespace {

using constants::pi;

// t^{x-1} / Gamma(x) without intermediate overflow.
real power_over_gamma(real x, real ln_t) {
    if (x > 1) return std::exp((x - 1) * ln_t - std::lgamma(x));
    return std::exp((x - 1) * ln_t) * rgamma(x);
}

// Integral over u in (0, inf) of an integrand whose size is governed by
//   (u + q) ln t + beta ln u - ln Gamma(u + q + 1).
// The tail is cut where this envelope has dropped by a factor tol/100 below
// its maximum; panels break at the zeros of 1/Gamma(u + q + 1) and at the peak.
EvalResult u_integral(const std::function<real(real)>& g, real t, real q, real beta, real tol) {
    const real ln_t = std::log(t);
    auto env = [&](real u) { return (u + q) * ln_t + (beta != 0 ? beta * std::log(u) : 0) - std::lgamma(u + q + 1); };
    auto slope = [&](real u) { return ln_t + beta / u - digamma(u + q + 1); };

    const real u0 = std::max<real>(1, 1.5L - q);
    real us = u0;
    if (slope(u0) > 0) {
        real lo = u0, hi = u0 + 1;
        while (slope(hi) > 0) {
            lo = hi;
            hi = u0 + 2 * (hi - u0);
        }
        for (int i = 0; i < 100 && hi - lo > 1e-6L * hi; ++i) {
            const real mid = (lo + hi) / 2;
            (slope(mid) > 0 ? lo : hi) = mid;
        }
        us = (lo + hi) / 2;
    }

    real emax = env(us);
    for (int i = 1; i <= 16; ++i) {
        const real u = u0 * i / 16;
        const real v = std::fabs(g(u));
        if (v > 0 && std::isfinite(v)) emax = std::max(emax, std::log(v));
    }
    const real target = emax + std::log(tol * 1e-2L);
    real lo = us, hi = us + 1;
    while (env(hi) > target) {
        lo = hi;
        hi = us + 2 * (hi - us);
    }
    for (int i = 0; i < 100 && hi - lo > 1e-3L; ++i) {
        const real mid = (lo + hi) / 2;
        (env(mid) > target ? lo : hi) = mid;
    }
    const real ustar = hi;

    std::vector<real> breaks = {0, ustar};
    // zeros of 1/Gamma(u + q + 1): u = -q - 1 - m
    for (real z = -q - 1; z > 0; z -= 1)
        if (z < ustar) breaks.push_back(z);
    if (us > 0 && us < ustar) breaks.push_back(us);
    if (u0 < ustar) breaks.push_back(u0);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [](real a, real b) { return std::fabs(a - b) < 1e-9L; }),
                 breaks.end());

    EvalResult out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const auto r = quad::tanh_sinh(g, breaks[i], breaks[i + 1], tol);
        out.value += r.value;
        out.abs_err += r.abs_err;
    }
    const real decay = std::max<real>(digamma(ustar + q + 1) - ln_t, 1);
    out.abs_err += std::exp(env(ustar)) / decay;
    out.terms = int(breaks.size()) - 1;
    std::ostringstream os;
    os << "route=u-integral;cut=" << double(ustar);
    out.diagnostics = os.str();
    return out;
}

real quad_tol(const EvalConfig& cfg) { return cfg.quad_tol; }

// Convolution int_0^t f(t - xi) g(xi) dxi; both factors receive their exact
// argument so endpoint singularities are resolved.
EvalResult convolve(const std::function<real(real)>& f, const std::function<real(real)>& g, real t, real tol) {
    const auto r = quad::tanh_sinh_split([&](real, real xi, real rest) { return f(rest) * g(xi); }, 0, t, tol);
    EvalResult out;
    out.value = r.value;
    out.abs_err = r.abs_err;
    return out;
}

}  // namespace

void VolterraArgs::validate() const {
    if (!(t > 0) || !std::isfinite(t)) throw DomainError("volterra: t must be > 0");
    if (!(beta > -1)) throw DomainError("volterra: beta must be > -1");
    if (!std::isfinite(alpha_shift)) throw DomainError("volterra: non-finite alpha shift");
}

void VPArgs::validate() const {
    if (!(params.alpha > 0)) throw DomainError("vp_epsilon: alpha must be > 0");
    if (!std::isfinite(params.gamma) || !std::isfinite(params.lambda) || !std::isfinite(p))
        throw DomainError("vp_epsilon: non-finite parameter");
    if (!(beta_weight > -1)) throw DomainError("vp_epsilon: beta must be > -1");
}

EvalResult volterra_mu(const VolterraArgs& args, const EvalConfig& cfg) {
    args.validate();
    const real ln_t = std::log(args.t);
    const real a = args.alpha_shift, b = args.beta;
    const real norm = rgamma(1 + b);
    auto g = [&](real u) {
        const real w = b == 0 ? 1 : std::pow(u, b);
        return norm * w * power_over_gamma(u + a + 1, ln_t);
    };
    EvalResult r = u_integral(g, args.t, a, b, quad_tol(cfg));
    return r;
}

EvalResult nu(real t, real q, const EvalConfig& cfg) {
    VolterraArgs a;
    a.t = t;
    a.alpha_shift = q;
    return volterra_mu(a, cfg);
}

EvalResult nu_spectral_part(real t, real q, const EvalConfig& cfg) {
    if (!(t > 0)) throw DomainError("nu_spectral: t must be > 0");
    if (q > 0) throw DomainError("nu_spectral: requires q <= 0");
    const real sq = std::sin(pi * q), cq = std::cos(pi * q);
    auto g = [&](real x) {
        const real r = std::exp(x);
        const real rt = r * t;
        if (rt > 12000) return real(0);
        return std::exp(-rt - q * x) * (x * sq + pi * cq) / pi;
    };
    const auto r = quad::log_cauchy(g, cfg.quad_tol, -std::log(t));
    EvalResult out;
    out.value = r.value;
    out.abs_err = r.abs_err;
    out.diagnostics = "route=spectral";
    return out;
}

EvalResult nu_spectral(real t, real q, const EvalConfig& cfg) {
    EvalResult r = nu_spectral_part(t, q, cfg);
    r.value = std::exp(t) - r.value;
    return r;
}

// ---------------------------------------------------------------------------
// Volterra-Prabhakar

namespace {

EvalResult epsilon_u_integral(const VPArgs& a, real t, const EvalConfig& cfg) {
    const real ln_t = std::log(t);
    const real z = -a.params.lambda * std::pow(t, a.params.alpha);
    const real b = a.beta_weight;
    PrabhakarParams pp = a.params;
    auto g = [&](real u) {
        pp.beta = u + a.p + 1;
        const real ml = mittag_leffler_3p(pp, z, cfg).value;
        const real w = b == 0 ? 1 : std::pow(u, b);
        return w * std::exp(a.p * ln_t + u * ln_t) * ml;
    };
    return u_integral(g, t, a.p, b, quad_tol(cfg));
}

EvalResult epsilon_nu_series(const VPArgs& a, real t, const EvalConfig& cfg) {
    const real lam = a.params.lambda, g = a.params.gamma, al = a.params.alpha;
    EvalResult out;
    real coeff = 1;
    int small = 0, n = 0;
    real last = 0, mag = 0;
    // lambda^n t^{alpha n}/Gamma(alpha n) peaks near n = (|lambda| t^alpha)^{1/alpha}/alpha
    const real peak = std::pow(std::fabs(lam) * std::pow(t, al), 1 / al) / al + 2;
    for (; n < cfg.series.max_terms; ++n) {
        if (n > 0) coeff *= -lam * (g + n - 1) / n;
        if (coeff == 0) break;
        const auto v = nu(t, al * n + a.p, cfg);
        const real term = coeff * v.value;
        out.value += term;
        out.abs_err += std::fabs(coeff) * v.abs_err;
        mag += std::fabs(term);
        last = term;
        const real tol = std::max(cfg.series.abs_tol, cfg.series.rel_tol * std::fabs(out.value));
        // the nu factors decay like t^{alpha n}/Gamma(alpha n), so the terms eventually shrink monotonically
        if (std::fabs(term) <= tol && n > peak) {
            if (++small >= 2) break;
        } else {
            small = 0;
        }
    }
    if (n >= cfg.series.max_terms) throw NonConvergence("vp_epsilon: nu series did not converge");
    out.abs_err += std::fabs(last) + 8 * std::numeric_limits<real>::epsilon() * mag;
    out.terms = n + 1;
    out.diagnostics = "route=nu-series";
    return out;
}

}  // namespace

void require_bromwich(real alpha, real gamma, real lambda, real p) {
    if (lambda != 1) throw RouteUnavailable("bromwich route requires lambda = 1");
    if (!(alpha > 0 && alpha <= 1)) throw RouteUnavailable("bromwich route requires 0 < alpha <= 1");
    if (!(gamma > 0)) throw RouteUnavailable("bromwich route requires gamma > 0");
    if (alpha == 1 && !(gamma < 1)) throw RouteUnavailable("bromwich route with alpha = 1 requires gamma < 1");
    if (!(p > -1 && p <= alpha * gamma))
        throw RouteUnavailable("bromwich route requires -1 < p <= alpha gamma (integrable cut density at r = 0)");
}

EvalResult vp_epsilon(const VPArgs& args, real t, VPRoute route, const EvalConfig& cfg) {
    args.validate();
    if (!(t > 0) || !std::isfinite(t)) throw DomainError("vp_epsilon: t must be > 0");
    VPArgs a = args;
    a.beta_weight = 0;
    switch (route) {
    case VPRoute::UIntegral: return epsilon_u_integral(a, t, cfg);
    case VPRoute::NuSeries: return epsilon_nu_series(a, t, cfg);
    case VPRoute::Bromwich: {
        require_bromwich(a.params.alpha, a.params.gamma, a.params.lambda, a.p);
        EvalResult s = spectral_laplace(a.params.alpha, a.params.gamma, a.p, t, cfg);
        EvalResult out;
        out.value = std::exp(t) * std::pow(real(2), -a.params.gamma) - s.value;
        out.abs_err = s.abs_err;
        out.diagnostics = "route=bromwich";
        return out;
    }
    }
    throw DomainError("vp_epsilon: unknown route");
}

EvalResult vp_epsilon_gen(const VPArgs& args, real t, const EvalConfig& cfg) {
    args.validate();
    if (!(t > 0) || !std::isfinite(t)) throw DomainError("vp_epsilon_gen: t must be > 0");
    return epsilon_u_integral(args, t, cfg);
}

// ---------------------------------------------------------------------------
// Spectral kernel

namespace {

// r K(r), evaluated from ln r so that huge and tiny r stay representable.
real spectral_kernel_times_r(real alpha, real gamma, real p, real lr) {
    // r^{-alpha} overflows for very small r; atan2 then tends to 0 anyway
    const real ra = -alpha * lr > 11000 ? std::numeric_limits<real>::infinity() : std::exp(-alpha * lr);
    const real th = std::atan2(std::sin(pi * alpha), std::cos(pi * alpha) + ra);
    const real phase = pi * (alpha * gamma - p) - gamma * th;
    // [r^{2 alpha} + 2 r^alpha cos(pi alpha) + 1]^{gamma/2}, factored to avoid overflow
    real pre;
    if (lr >= 0) {
        const real m2 = 1 + 2 * ra * std::cos(pi * alpha) + ra * ra;
        pre = std::exp(-p * lr) / std::pow(m2, gamma / 2);
    } else {
        const real rb = std::exp(alpha * lr);
        const real m2 = rb * rb + 2 * rb * std::cos(pi * alpha) + 1;
        pre = std::exp((alpha * gamma - p) * lr) / std::pow(m2, gamma / 2);
    }
    return pre / pi * (lr * std::sin(phase) - pi * std::cos(phase)) / (pi * pi + lr * lr);
}

}  // namespace

real spectral_kernel(real alpha, real gamma, real p, real r) {
    if (!(r > 0)) throw DomainError("spectral_kernel: r must be > 0");
    return spectral_kernel_times_r(alpha, gamma, p, std::log(r)) / r;
}

real spectral_kernel_complex(real alpha, real gamma, real p, real r) {
    if (!(r > 0)) throw DomainError("spectral_kernel: r must be > 0");
    const cplx log_s(std::log(r), pi);  // s = r e^{i pi}, upper lip of the cut
    const cplx s = -r;
    const cplx sa = std::exp(alpha * log_s);
    const cplx F = std::exp((alpha * gamma - p) * log_s) / (std::exp(gamma * std::log(sa + real(1))) * s * log_s);
    return -F.imag() / pi;
}

EvalResult spectral_laplace(real alpha, real gamma, real p, real t, const EvalConfig& cfg) {
    if (!(t >= 0)) throw DomainError("spectral_laplace: t must be >= 0");
    require_bromwich(alpha, gamma, 1, p);
    // With ln r = pi tan(theta): dr = pi r sec^2(theta) dtheta.
    auto h = [&](real th) -> real {
        const real x = pi * std::tan(th);
        // no lower cut: when p = alpha gamma the integrand tends to 1/pi as theta -> -pi/2
        if (!std::isfinite(x) || x > 5000) return 0;
        const real r = x < -11000 ? real(0) : std::exp(x);
        if (r * t > 12000) return 0;
        // pi sec^2(theta) = (pi^2 + x^2) / pi
        return -std::exp(-r * t) * spectral_kernel_times_r(alpha, gamma, p, x) * (pi * pi + x * x) / pi;
    };
    std::vector<real> breaks = {-pi / 2, -1.2L, -0.6L, 0, 0.6L, 1.2L, pi / 2};
    if (t > 0) breaks.push_back(std::atan(-std::log(t) / pi));
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [](real a, real b) { return std::fabs(a - b) < 1e-6L; }),
                 breaks.end());
    EvalResult out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const auto r = quad::tanh_sinh(h, breaks[i], breaks[i + 1], cfg.quad_tol);
        out.value += r.value;
        out.abs_err += r.abs_err;
    }
    out.diagnostics = "route=spectral";
    return out;
}

// ---------------------------------------------------------------------------
// Identity residuals

EvalResult ramanujan_residual(real t, const EvalConfig& cfg) {
    const auto v = nu(t, 0, cfg);
    const auto s = quad::log_cauchy(
        [&](real x) {
            const real rt = std::exp(x) * t;
            return rt > 12000 ? real(0) : std::exp(-rt);
        },
        cfg.quad_tol, -std::log(t));
    EvalResult out;
    out.value = v.value + s.value - std::exp(t);
    out.abs_err = v.abs_err + s.abs_err + 4 * std::numeric_limits<real>::epsilon() * std::exp(t);
    return out;
}

EvalResult prop1_residual(real a, real p, real t, const EvalConfig& cfg) {
    if (!(a > 0)) throw DomainError("prop1: a must be > 0");
    const real tol = std::sqrt(cfg.quad_tol) * 1e-3L;
    const auto lhs = convolve([&](real tau) { return nu(tau, p, cfg).value; },
                              [&](real xi) { return std::pow(xi, a - 1); }, t, tol);
    const auto rhs = nu(t, a + p, cfg);
    EvalResult out;
    out.value = lhs.value - std::tgamma(a) * rhs.value;
    out.abs_err = lhs.abs_err + std::tgamma(a) * rhs.abs_err;
    return out;
}

EvalResult prop2a_residual(const VPArgs& args, real t, const EvalConfig& cfg) {
    args.validate();
    const real tol = std::sqrt(cfg.quad_tol) * 1e-3L;
    PrabhakarParams pp = args.params;
    pp.beta = 0;
    const auto conv = convolve([&](real tau) { return nu(tau, args.p, cfg).value; },
                               [&](real xi) { return prabhakar_e(pp, xi, cfg).value; }, t, tol);
    const auto direct = nu(t, args.p, cfg);
    const auto series = epsilon_nu_series(args, t, cfg);
    EvalResult out;
    out.value = direct.value + conv.value - series.value;
    out.abs_err = direct.abs_err + conv.abs_err + series.abs_err;
    return out;
}

EvalResult prop5a_residual(real beta, real alpha, real t, const EvalConfig& cfg) {
    if (!(alpha > 0)) throw DomainError("prop5a: alpha must be > 0");
    const real tol = std::sqrt(cfg.quad_tol) * 1e-3L;
    auto mu = [&](real tau, real shift) {
        VolterraArgs v;
        v.t = tau;
        v.beta = beta;
        v.alpha_shift = shift;
        return volterra_mu(v, cfg);
    };
    const auto lhs = convolve([&](real tau) { return mu(tau, alpha).value; },
                              [&](real xi) { return std::pow(xi, alpha - 1); }, t, tol);
    const auto rhs = mu(t, 2 * alpha);
    EvalResult out;
    out.value = lhs.value - std::tgamma(alpha) * rhs.value;
    out.abs_err = lhs.abs_err + std::tgamma(alpha) * rhs.abs_err;
    return out;
}

EvalResult property_a_residual(const VPArgs& args, int n, real t, const EvalConfig& cfg) {
    if (n < 1 || n > 2) throw DomainError("property A: n must be 1 or 2");
    VPArgs hi = args, lo = args;
    hi.p = n;
    lo.p = 0;
    const real h = 2e-3L * std::max<real>(1, t);
    auto f = [&](real x) { return vp_epsilon(hi, x, VPRoute::UIntegral, cfg).value; };
    const real d = n == 1 ? (f(t + h) - f(t - h)) / (2 * h) : (f(t + h) - 2 * f(t) + f(t - h)) / (h * h);
    const auto target = vp_epsilon(lo, t, VPRoute::UIntegral, cfg);
    EvalResult out;
    out.value = (d - target.value) / std::max<real>(std::fabs(target.value), 1e-300L);
    out.abs_err = h * h;
    return out;
}

EvalResult property_b_residual(const VPArgs& first, const VPArgs& second, real t, const EvalConfig& cfg) {
    if (first.params.alpha != second.params.alpha || first.params.lambda != second.params.lambda)
        throw DomainError("property B: alpha and lambda must match");
    const real tol = std::sqrt(cfg.quad_tol) * 1e-3L;
    VPArgs sum = first;
    sum.params.gamma = first.params.gamma + second.params.gamma;
    sum.p = first.p + second.p;
    auto eps = [&](const VPArgs& a) {
        return [&cfg, a](real x) { return vp_epsilon(a, x, VPRoute::UIntegral, cfg).value; };
    };
    const auto lhs = convolve(eps(first), eps(second), t, tol);
    const auto rhs = convolve(eps(sum), [&](real x) { return nu(x, 0, cfg).value; }, t, tol);
    EvalResult out;
    out.value = lhs.value - rhs.value;
    out.abs_err = lhs.abs_err + rhs.abs_err;
    return out;
}

}  // namespace ultraslow
