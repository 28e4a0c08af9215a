#include "ultraslow/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ultraslow/lapinv.hpp"
#include "ultraslow/quadrature.hpp"
#include "ultraslow/specfun.hpp"
#include "ultraslow/volterra.hpp"

namespace ultraslow {

using constants::pi;

namespace {

void check_t(real t, const char* who) {
    if (!(t > 0) || !std::isfinite(t)) throw DomainError(std::string(who) + ": t must be > 0");
}

void check_prabhakar(real alpha, real gamma, real lambda, const char* who) {
    if (!(alpha > 0 && alpha < 1)) throw DomainError(std::string(who) + ": alpha must lie in (0, 1)");
    if (!(gamma >= 0 && gamma < 1)) throw DomainError(std::string(who) + ": gamma must lie in [0, 1)");
    if (!(lambda >= 0) || !std::isfinite(lambda)) throw DomainError(std::string(who) + ": lambda must be >= 0");
}

// Index past which lambda^n t^{alpha n}/Gamma(alpha n) decreases for good.
real series_peak(real alpha, real lambda, real t) {
    return std::pow(std::fabs(lambda) * std::pow(t, alpha), 1 / alpha) / alpha + 2;
}

EvalResult sub(const EvalResult& a, const EvalResult& b) {
    EvalResult r;
    r.value = a.value - b.value;
    r.abs_err = a.abs_err + b.abs_err;
    return r;
}

// nu(t, q - 1) - nu(t, q).  For q <= 0 both terms have a cut representation
// and the difference needs no e^t cancellation.
EvalResult nu_step(real t, real q, const EvalConfig& cfg) {
    if (q <= 0 && t > 1) return sub(nu_spectral_part(t, q, cfg), nu_spectral_part(t, q - 1, cfg));
    const auto a = nu(t, q - 1, cfg), b = nu(t, q, cfg);
    auto r = sub(a, b);
    r.abs_err += 8 * std::numeric_limits<real>::epsilon() * (std::fabs(a.value) + std::fabs(b.value));
    return r;
}

// sum_n (-lambda)^n (-gamma)_n / n! step(alpha n + shift)
EvalResult k2_nu_sum(real alpha, real gamma, real lambda, real t, real shift, const EvalConfig& cfg,
                     const std::function<EvalResult(real)>& step) {
    EvalResult out;
    real coeff = 1, last = 0, mag = 0;
    int small = 0, n = 0;
    const real peak = series_peak(alpha, lambda, t);
    for (; n < cfg.series.max_terms; ++n) {
        if (n > 0) coeff *= -lambda * (-gamma + n - 1) / n;
        if (coeff == 0) break;
        const auto v = step(alpha * n + shift);
        const real term = coeff * v.value;
        out.value += term;
        out.abs_err += std::fabs(coeff) * v.abs_err;
        mag += std::fabs(term);
        last = term;
        const real tol = std::max(cfg.series.abs_tol, cfg.series.rel_tol * std::fabs(out.value));
        if (std::fabs(term) <= tol && n > peak) {
            if (++small >= 2) break;
        } else {
            small = 0;
        }
    }
    if (n >= cfg.series.max_terms) throw NonConvergence("k2: nu series did not converge");
    out.abs_err += std::fabs(last) + 8 * std::numeric_limits<real>::epsilon() * mag;
    out.terms = n + 1;
    return out;
}

// int_0^t k(tau) g(t - tau) dtau for a kernel with the 1/(tau ln^2 tau)
// end at tau = 0 and primitive K.  On [0, t/2] g(t) is subtracted so that the
// remaining integrand is bounded; the subtracted piece is g(t) K(t/2).
EvalResult convolve_log_kernel(const std::function<real(real)>& k, const std::function<EvalResult(real)>& K,
                               const std::function<real(real)>& g, real t, real tol) {
    const real h = t / 2;
    const real gt = g(t);
    const auto near = quad::tanh_sinh_split(
        [&](real tau, real, real) { return tau == 0 ? real(0) : k(tau) * (g(t - tau) - gt); }, 0, h, tol);
    const auto far = quad::tanh_sinh_split([&](real tau, real, real rest) { return k(tau) * g(rest); }, h, t, tol);
    const auto prim = K(h);
    EvalResult out;
    out.value = near.value + gt * prim.value + far.value;
    out.abs_err = near.abs_err + std::fabs(gt) * prim.abs_err + far.abs_err;
    return out;
}

real conv_tol(const EvalConfig& cfg) { return std::sqrt(cfg.quad_tol) * 1e-3L; }

PrabhakarParams regular_part(real alpha, real gamma, real lambda) {
    // e^{gamma}_{alpha,0}(lambda; t) without its unit point mass at the origin
    PrabhakarParams p;
    p.alpha = alpha;
    p.beta = 0;
    p.gamma = gamma;
    p.lambda = lambda;
    return p;
}

EvalResult talbot_route(const MemoryKernel& k, LaplaceObject what, real t, const EvalConfig& cfg) {
    IltConfig ic = cfg.ilt;
    ic.method = IltMethod::ShiftedTalbot;
    auto r = ilt(make_kernel_laplace(k, what), t, ic);
    r.diagnostics = "route=laplace-talbot";
    return r;
}

// M2 as sum_r (gamma)_r (-lambda)^r / r! sum_k w_{r,k} (psi(k + 1 + alpha r) - ln t),
// w_{r,k} = t^{k + alpha r} / Gamma(k + 1 + alpha r).
EvalResult m2_exact_series(real alpha, real gamma, real lambda, real t, const EvalConfig& cfg) {
    const real ln_t = std::log(t);
    const real eps = std::numeric_limits<real>::epsilon();
    EvalResult out;
    real coeff = 1, mag = 0, last = 0;
    int small = 0, r = 0, inner_max = 0;
    const real peak = series_peak(alpha, lambda, t);
    for (; r < cfg.series.max_terms; ++r) {
        if (r > 0) coeff *= -lambda * (gamma + r - 1) / r;
        if (coeff == 0) break;
        const real x0 = alpha * r;
        real w = std::exp(x0 * ln_t) * rgamma(1 + x0);
        real ps = digamma(1 + x0);
        real inner = 0, inner_mag = 0;
        int k = 0, k_small = 0;
        for (; k < 4 * cfg.series.max_terms; ++k) {
            if (k > 0) {
                w *= t / (k + x0);
                ps += 1 / (k + x0);
            }
            const real term = w * (ps - ln_t);
            inner += term;
            inner_mag += std::fabs(term);
            if (std::fabs(term) <= eps * std::fabs(inner) && k > t) {
                if (++k_small >= 2) break;
            } else {
                k_small = 0;
            }
        }
        inner_max = std::max(inner_max, k);
        const real term = coeff * inner;
        out.value += term;
        mag += std::fabs(coeff) * inner_mag;
        last = term;
        const real tol = std::max(cfg.series.abs_tol, cfg.series.rel_tol * std::fabs(out.value));
        if (std::fabs(term) <= tol && r > peak) {
            if (++small >= 2) break;
        } else {
            small = 0;
        }
    }
    out.terms = r + 1;
    out.abs_err = std::fabs(last) + 8 * eps * mag;
    std::ostringstream os;
    os << "route=exact-series r_terms=" << out.terms << " j_terms=" << inner_max;
    out.diagnostics = os.str();
    out.converged = r < cfg.series.max_terms;
    return out;
}

}  // namespace

EvalResult k1_time(real t, const EvalConfig& cfg) {
    check_t(t, "k1_time");
    if (t <= 1) {
        auto r = nu_step(t, 0, cfg);
        r.diagnostics = "route=nu-difference";
        return r;
    }
    const auto q = quad::log_cauchy(
        [&](real x) {
            const real r = std::exp(x);
            return r * t > 12000 ? real(0) : std::exp(-r * t) * (1 + r);
        },
        cfg.quad_tol, -std::log(t));
    EvalResult out;
    out.value = q.value;
    out.abs_err = q.abs_err;
    out.diagnostics = "route=branch-cut";
    return out;
}

EvalResult k1_integral(real h, const EvalConfig& cfg) {
    check_t(h, "k1_integral");
    if (h <= 1) return nu_step(h, 1, cfg);
    // int_0^inf (1 - e^{-rh}) (1 + r) / (r^2 (pi^2 + ln^2 r)) dr
    const auto q = quad::log_cauchy(
        [&](real x) {
            if (x > 80) return real(1);
            const real r = std::exp(x);
            if (r * h < 1e-30L) return h * (1 + r);
            return -std::expm1(-r * h) * (1 + r) / r;
        },
        cfg.quad_tol, -std::log(h));
    EvalResult out;
    out.value = q.value;
    out.abs_err = q.abs_err;
    return out;
}

EvalResult k2_integral(real alpha, real gamma, real lambda, real h, const EvalConfig& cfg) {
    check_t(h, "k2_integral");
    check_prabhakar(alpha, gamma, lambda, "k2_integral");
    return k2_nu_sum(alpha, gamma, lambda, h, 1, cfg, [&](real q) {
        return q == 1 ? k1_integral(h, cfg) : nu_step(h, q, cfg);
    });
}

EvalResult k2_time(real alpha, real gamma, real lambda, real t, K2Route route, const EvalConfig& cfg) {
    check_t(t, "k2_time");
    check_prabhakar(alpha, gamma, lambda, "k2_time");
    if (lambda == 0 || gamma == 0) return k1_time(t, cfg);
    switch (route) {
    case K2Route::NuSeries: {
        auto r = k2_nu_sum(alpha, gamma, lambda, t, 0, cfg, [&](real q) {
            return q == 0 ? k1_time(t, cfg) : nu_step(t, q, cfg);
        });
        r.diagnostics = "route=nu-series";
        return r;
    }
    case K2Route::Convolution: {
        // k2 = k1 + k1 * e^{-gamma}_{alpha,0}: the transform factor (1 + lambda s^-alpha)^gamma tends to 1
        const auto pp = regular_part(alpha, -gamma, lambda);
        const auto k1 = k1_time(t, cfg);
        const auto c = convolve_log_kernel([&](real tau) { return k1_time(tau, cfg).value; },
                                           [&](real h) { return k1_integral(h, cfg); },
                                           [&](real xi) { return prabhakar_e(pp, xi, cfg).value; }, t, conv_tol(cfg));
        EvalResult out;
        out.value = k1.value + c.value;
        out.abs_err = k1.abs_err + c.abs_err;
        out.diagnostics = "route=convolution";
        return out;
    }
    case K2Route::EpsilonDiff: {
        VPArgs a;
        a.params.alpha = alpha;
        a.params.gamma = -gamma;
        a.params.lambda = lambda;
        a.p = -1;
        const auto lo = vp_epsilon(a, t, VPRoute::UIntegral, cfg);
        a.p = 0;
        const auto hi = vp_epsilon(a, t, VPRoute::UIntegral, cfg);
        auto out = sub(lo, hi);
        out.abs_err += 8 * std::numeric_limits<real>::epsilon() * (std::fabs(lo.value) + std::fabs(hi.value));
        out.diagnostics = "route=epsilon-difference";
        return out;
    }
    case K2Route::Laplace:
        return talbot_route(MemoryKernel::distributed_prabhakar(alpha, gamma, lambda), LaplaceObject::Kernel, t, cfg);
    }
    throw DomainError("k2_time: unknown route");
}

real m1_time(real t) {
    check_t(t, "m1_time");
    return scaled_e1(t);
}

EvalResult m2_time(real alpha, real gamma, real lambda, real t, M2Route route, const EvalConfig& cfg) {
    check_t(t, "m2_time");
    check_prabhakar(alpha, gamma, lambda, "m2_time");
    if (lambda == 0 || gamma == 0) {
        EvalResult r;
        r.value = m1_time(t);
        r.abs_err = 4 * std::numeric_limits<real>::epsilon() * std::fabs(r.value);
        r.diagnostics = "route=closed-form";
        return r;
    }
    switch (route) {
    case M2Route::ExactSeries: {
        auto r = m2_exact_series(alpha, gamma, lambda, t, cfg);
        if (r.converged && r.abs_err <= 1e-10L * std::max<real>(1, std::fabs(r.value))) return r;
        auto c = m2_time(alpha, gamma, lambda, t, M2Route::Convolution, cfg);
        c.diagnostics += " (exact series fell back: " + r.diagnostics + ")";
        return c;
    }
    case M2Route::Convolution: {
        // M2 = M1 + M1 * e^{gamma}_{alpha,0}
        const auto pp = regular_part(alpha, gamma, lambda);
        const auto q = quad::tanh_sinh_split(
            [&](real, real xi, real rest) {
                return rest == 0 || xi == 0 ? real(0) : scaled_e1(rest) * prabhakar_e(pp, xi, cfg).value;
            },
            0, t, conv_tol(cfg));
        EvalResult out;
        out.value = m1_time(t) + q.value;
        out.abs_err = q.abs_err;
        out.diagnostics = "route=convolution";
        return out;
    }
    case M2Route::Laplace:
        return talbot_route(MemoryKernel::distributed_prabhakar(alpha, gamma, lambda), LaplaceObject::Partner, t, cfg);
    }
    throw DomainError("m2_time: unknown route");
}

EvalResult kernel_time(const MemoryKernel& k, real t, const EvalConfig& cfg) {
    k.validate();
    check_t(t, "kernel_time");
    switch (k.kind) {
    case KernelKind::SingleCaputo: {
        EvalResult r;
        r.value = std::pow(t, -k.mu) * rgamma(1 - k.mu);
        return r;
    }
    case KernelKind::SinglePrabhakar: {
        PrabhakarParams p;
        p.alpha = k.alpha;
        p.beta = 1 - k.mu;
        p.gamma = -k.gamma;
        p.lambda = k.lambda;
        return prabhakar_e(p, t, cfg);
    }
    case KernelKind::DistributedOrder: return k1_time(t, cfg);
    case KernelKind::DistributedPrabhakar: return k2_time(k.alpha, k.gamma, k.lambda, t, K2Route::NuSeries, cfg);
    }
    throw DomainError("kernel_time: unknown kind");
}

EvalResult partner_time(const MemoryKernel& k, real t, const EvalConfig& cfg) {
    k.validate();
    check_t(t, "partner_time");
    switch (k.kind) {
    case KernelKind::SingleCaputo: {
        EvalResult r;
        r.value = std::pow(t, k.mu - 1) * rgamma(k.mu);
        return r;
    }
    case KernelKind::SinglePrabhakar: {
        PrabhakarParams p;
        p.alpha = k.alpha;
        p.beta = k.mu;
        p.gamma = k.gamma;
        p.lambda = k.lambda;
        return prabhakar_e(p, t, cfg);
    }
    case KernelKind::DistributedOrder: {
        EvalResult r;
        r.value = m1_time(t);
        return r;
    }
    case KernelKind::DistributedPrabhakar: return m2_time(k.alpha, k.gamma, k.lambda, t, M2Route::ExactSeries, cfg);
    }
    throw DomainError("partner_time: unknown kind");
}

real sonnine_residual(const MemoryKernel& k, real t, const EvalConfig& cfg) {
    k.validate();
    check_t(t, "sonnine_residual");
    const real tol = conv_tol(cfg);
    auto kf = [&](real tau) { return kernel_time(k, tau, cfg).value; };
    auto mf = [&](real xi) { return partner_time(k, xi, cfg).value; };
    real total = 0;
    switch (k.kind) {
    case KernelKind::SingleCaputo:
    case KernelKind::SinglePrabhakar:
        // both ends carry integrable power singularities only
        total = quad::tanh_sinh_split([&](real, real xi, real rest) { return kf(rest) * mf(xi); }, 0, t, tol).value;
        break;
    case KernelKind::DistributedOrder:
        total = convolve_log_kernel(kf, [&](real h) { return k1_integral(h, cfg); }, mf, t, tol).value;
        break;
    case KernelKind::DistributedPrabhakar:
        total = convolve_log_kernel(kf, [&](real h) { return k2_integral(k.alpha, k.gamma, k.lambda, h, cfg); }, mf, t,
                                    tol)
                    .value;
        break;
    }
    return std::fabs(total - 1);
}

AsymptoticForm tauberian_asymptote(AsymptoticId id, Regime regime, const MemoryKernel& k) {
    const real a = k.alpha, g = k.gamma, lam = k.lambda, B = k.B;
    AsymptoticForm f;
    f.regime = regime;
    const bool longt = regime == Regime::LongTime;
    switch (id) {
    case AsymptoticId::k1:
    case AsymptoticId::k2:
        if (!longt) throw Inapplicable("kernel at short times: the transform decays only like 1/ln s (rho = 0)");
        if (id == AsymptoticId::k1) {
            f.expression = [](real t) { return 1 / std::log(t); };
            f.description = "1/ln t";
        } else {
            const real c = std::pow(lam, g) * rgamma(1 + a * g);
            f.expression = [=](real t) { return c * std::pow(t, a * g) / std::log(t); };
            f.description = "lambda^gamma t^(alpha gamma) / (Gamma(1 + alpha gamma) ln t)";
        }
        return f;
    case AsymptoticId::M1:
    case AsymptoticId::M2:
        if (longt)
            throw Inapplicable(id == AsymptoticId::M1 ? "M1 at long times: ln(1/s) has rho = 0"
                                                      : "M2 at long times: s^(alpha gamma) ln(1/s) has rho < 0");
        f.expression = [](real t) { return std::log(1 / t); };
        f.description = "ln(1/t)";
        return f;
    case AsymptoticId::msd1:
    case AsymptoticId::msd2:
        if (!longt) {
            f.expression = [B](real t) { return 2 * B * t * std::log(1 / t); };
            f.description = "2B t ln(1/t)";
        } else if (id == AsymptoticId::msd1) {
            f.expression = [B](real t) { return 2 * B * std::log(t); };
            f.description = "2B ln t";
        } else {
            const real c = 2 * B * std::pow(lam, -g) * rgamma(1 - a * g);
            f.expression = [=](real t) { return c * std::pow(t, -a * g) * std::log(t); };
            f.description = "2B lambda^-gamma t^(-alpha gamma) ln t / Gamma(1 - alpha gamma)";
        }
        return f;
    }
    throw DomainError("tauberian_asymptote: unknown id");
}

}  // namespace ultraslow
