#include "ultraslow/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "ultraslow/kernels.hpp"
#include "ultraslow/lapinv.hpp"
#include "ultraslow/quadrature.hpp"
#include "ultraslow/specfun.hpp"

namespace ultraslow {

using constants::euler_gamma;
using constants::pi2_over_6;

namespace {

constexpr real eps = std::numeric_limits<real>::epsilon();

void check_t(real t, const char* who) {
    if (!(t > 0) || !std::isfinite(t)) throw DomainError(std::string(who) + ": t must be > 0");
}

void check_B(real B, const char* who) {
    if (!(B > 0) || !std::isfinite(B)) throw DomainError(std::string(who) + ": B must be > 0");
}

real oracle_tol(const EvalConfig& cfg) { return std::sqrt(cfg.quad_tol) * 1e-3L; }

// 3F3(1,1,1; 2,2,2; -t), shared by the two Ei convolutions.
EvalResult f333(real t, const EvalConfig& cfg) { return hyper_pfq({1, 1, 1}, {2, 2, 2}, -t, cfg); }

// Same as the public version but admits a = 0 (used by the r = 0 term of msd2).
EvalResult log_integral(real a, real t, const EvalConfig& cfg) {
    PrabhakarParams pp;
    pp.alpha = 1;
    pp.beta = 2 + a;
    pp.gamma = 1;
    pp.lambda = -1;
    const auto e = prabhakar_e(pp, t, cfg);
    const auto f = hyper_pfq({1, 1 + a}, {2 + a, 2 + a}, t, cfg);
    const real L = std::log(t);
    const real w = std::pow(t, 1 + a) * rgamma(2 + a) / (1 + a);
    EvalResult r;
    r.value = L * e.value - w * f.value;
    r.abs_err = std::fabs(L) * e.abs_err + w * f.abs_err + 4 * eps * (std::fabs(L * e.value) + w * f.value);
    r.terms = e.terms + f.terms;
    return r;
}

// sum_{j>=1} psi(j + a) t^{a+j} / Gamma(a + j + 1); also returns sum of |terms|.
std::pair<real, real> digamma_power_sum(real a, real t, const SeriesConfig& sc) {
    real w = std::pow(t, a + 1) * rgamma(a + 2);
    real ps = digamma(a + 1);
    real sum = 0, mag = 0;
    for (int j = 1; j < 20 * sc.max_terms; ++j) {
        const real term = ps * w;
        sum += term;
        mag += std::fabs(term);
        if (j > t && std::fabs(term) <= eps * std::fabs(sum)) return {sum, mag};
        w *= t / (a + j + 1);
        ps += 1 / (a + j);
    }
    throw NonConvergence("msd2: digamma power sum did not converge");
}

EvalResult msd2_series(real alpha, real gamma, real lambda, real t, real B, const EvalConfig& cfg) {
    EvalResult out;
    real coeff = 1, sum = 0, mag = 0;
    const real peak = std::pow(lambda * std::pow(t, alpha), 1 / alpha) / alpha + 2;
    int quiet = 0, r = 0;
    for (; r < cfg.series.max_terms; ++r) {
        if (r > 0) coeff *= -lambda * (gamma + r - 1) / r;
        const real a = alpha * r;
        const auto li = log_integral(a, t, cfg);
        const auto [ds, dmag] = digamma_power_sum(a, t, cfg.series);
        const real term = coeff * (ds - li.value);
        sum += term;
        mag = std::max(mag, std::fabs(coeff) * (dmag + std::fabs(li.value)));
        out.abs_err += std::fabs(coeff) * li.abs_err;
        quiet = (r > peak && std::fabs(term) <= eps * std::fabs(sum)) ? quiet + 1 : 0;
        if (quiet >= 2) break;
    }
    out.converged = quiet >= 2;
    out.terms = r + 1;
    out.value = 2 * B * sum;
    out.abs_err = 2 * B * (out.abs_err + 16 * eps * mag * std::sqrt(real(r + 1)));
    std::ostringstream os;
    os << "route=series r_terms=" << out.terms;
    out.diagnostics = os.str();
    return out;
}

EvalResult msd2_quadrature(real alpha, real gamma, real lambda, real t, real B, const EvalConfig& cfg) {
    // Past u ~ 15 the exact series of M2 is out of reach and its own fallback
    // is a convolution per node; the Talbot route is much cheaper there.
    const auto q = quad::tanh_sinh_split(
        [&](real, real u, real) {
            if (!(u > 0)) return real(0);
            return m2_time(alpha, gamma, lambda, u, u <= 15 ? M2Route::ExactSeries : M2Route::Laplace, cfg).value;
        },
        0, t, oracle_tol(cfg));
    EvalResult r;
    r.value = 2 * B * q.value;
    r.abs_err = 2 * B * q.abs_err;
    r.diagnostics = "route=quadrature";
    return r;
}

real factorial(int n) {
    real f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

real sonnine_partner(const MemoryKernel& k, real u, const EvalConfig& cfg) {
    if (k.kind == KernelKind::DistributedOrder) return m1_time(u);
    return partner_time(k, u, cfg).value;
}

// int_0^tau M^{*m}, by nesting m quadratures.
real partner_power_primitive(const MemoryKernel& k, int m, real tau, real tol, const EvalConfig& cfg) {
    if (tau <= 0) return 0;
    if (m == 1)
        return quad::tanh_sinh_split([&](real, real u, real) { return u > 0 ? sonnine_partner(k, u, cfg) : 0; }, 0,
                                     tau, tol)
            .value;
    return quad::tanh_sinh_split(
               [&](real, real xi, real rest) {
                   if (!(xi > 0)) return real(0);
                   return sonnine_partner(k, xi, cfg) * partner_power_primitive(k, m - 1, rest, tol * 10, cfg);
               },
               0, tau, tol)
        .value;
}

}  // namespace

void MomentRequest::validate() const {
    kernel.validate();
    if (order_2n < 2 || order_2n % 2 != 0) throw DomainError("MomentRequest: order must be even and >= 2");
    check_t(t, "MomentRequest");
}

real msd1(real t, real B) {
    check_t(t, "msd1");
    check_B(B, "msd1");
    // C + ln t + e^t E1(t); below t = 1 rewritten through E1 = Ein - C - ln t
    // so that the logarithms do not cancel.
    const real L = std::log(t);
    if (t <= 1) return 2 * B * (-std::expm1(t) * (euler_gamma + L) + std::exp(t) * ein(t));
    return 2 * B * (euler_gamma + L + scaled_e1(t));
}

EvalResult msd2(real alpha, real gamma, real lambda, real t, real B, Msd2Route route, const EvalConfig& cfg) {
    check_t(t, "msd2");
    check_B(B, "msd2");
    MemoryKernel::distributed_prabhakar(alpha, gamma, lambda, B).validate();
    if (lambda == 0 || gamma == 0) {
        EvalResult r;
        r.value = msd1(t, B);
        r.abs_err = 8 * eps * r.value;
        r.diagnostics = "route=closed-form";
        return r;
    }
    if (route == Msd2Route::QuadratureOracle) return msd2_quadrature(alpha, gamma, lambda, t, B, cfg);
    std::string why;
    try {
        auto s = msd2_series(alpha, gamma, lambda, t, B, cfg);
        if (s.converged && s.abs_err <= 1e-8L * std::fabs(s.value)) return s;
        std::ostringstream os;
        os << "estimate " << double(s.abs_err / std::fabs(s.value)) << " relative";
        why = os.str();
    } catch (const NonConvergence& e) {
        why = e.what();
    }
    auto q = msd2_quadrature(alpha, gamma, lambda, t, B, cfg);
    q.diagnostics += " (series fell back: " + why + ")";
    return q;
}

EvalResult prabhakar_log_integral(real a, real t, const EvalConfig& cfg) {
    if (!(a > 0) || !std::isfinite(a)) throw DomainError("prabhakar_log_integral: a must be > 0");
    check_t(t, "prabhakar_log_integral");
    auto r = log_integral(a, t, cfg);
    r.diagnostics = "route=closed-form";
    return r;
}

EvalResult conv_ei_log(real t, ConvRegime regime, const EvalConfig& cfg) {
    check_t(t, "conv_ei_log");
    const real C = euler_gamma, L = std::log(t), et = std::exp(t);
    const real ei = -exp_integral_e1(t);
    EvalResult r;
    if (regime == ConvRegime::General) {
        const auto f = f333(t, cfg);
        const real parts[] = {-C * C * et,
                              -pi2_over_6 * std::expm1(t),
                              -(2 * C + L) * et * L,
                              (C + 2 * L) * et * ei,
                              -C * L,
                              -L * L,
                              2 * t * et * f.value};
        real mag = 0;
        for (real p : parts) {
            r.value += p;
            mag += std::fabs(p);
        }
        r.abs_err = 8 * eps * mag + 2 * t * et * f.abs_err;
        r.terms = f.terms;
        r.diagnostics = "route=closed-form regime=general";
        return r;
    }
    if (!(t < 1)) throw DomainError("conv_ei_log: SmallT regime needs t in (0, 1)");
    // sum_{n>=1} (n+1)^-2 sum_{r=1}^n t^r/r!  =  sum_{r>=1} t^r/r! (pi^2/6 - H_r^(2))
    real w = 1, h2 = 0, harm = 0;
    for (int k = 1; k < 200; ++k) {
        w *= t / k;
        h2 += real(1) / (real(k) * k);
        const real term = w * (pi2_over_6 - h2);
        harm += term;
        if (term <= eps * harm) break;
    }
    const auto ein_int = quad::gauss_kronrod(
        [](real u) { return (2 * ein(u) + std::exp(-u) * ein(-u)) / u; }, 0, t, cfg.quad_tol);
    const real parts[] = {-et * (C + L) * (C + L), (C + 2 * L) * et * ei, -C * L, -L * L, -harm, et * ein_int.value};
    real mag = 0;
    for (real p : parts) {
        r.value += p;
        mag += std::fabs(p);
    }
    r.abs_err = 8 * eps * mag + et * ein_int.abs_err;
    r.diagnostics = "route=closed-form regime=small-t";
    return r;
}

EvalResult ei_ei_convolution(real t, const EvalConfig& cfg) {
    check_t(t, "ei_ei_convolution");
    const real C = euler_gamma, L = std::log(t);
    const real ei = -exp_integral_e1(t);
    EvalResult cf;
    std::string why;
    try {
        const auto f = f333(t, cfg);
        const real parts[] = {2 * (C + L) * std::exp(-t), -2 * (1 - t * C - t * L) * ei,
                              -t * (pi2_over_6 + (C + L) * (C + L)), 2 * t * t * f.value};
        real mag = 0;
        for (real p : parts) {
            cf.value += p;
            mag += std::fabs(p);
        }
        cf.abs_err = 8 * eps * mag + 2 * t * t * f.abs_err;
    } catch (const NonConvergence& e) {
        cf.converged = false;
        why = e.what();
    }
    // E1 is log-singular at 0, so both ends need the distance passed exactly.
    const auto q = quad::tanh_sinh_split(
        [](real, real a, real b) { return a > 0 && b > 0 ? exp_integral_e1(a) * exp_integral_e1(b) : 0; }, 0, t,
        cfg.quad_tol);
    if (cf.converged && std::fabs(cf.value - q.value) <= 1e-6L * std::fabs(q.value)) {
        cf.diagnostics = "route=closed-form checked=quadrature";
        return cf;
    }
    EvalResult r;
    r.value = q.value;
    r.abs_err = q.abs_err;
    std::ostringstream os;
    os << "route=quadrature-substituted";
    if (cf.converged) os << " (closed form off by " << double(std::fabs(cf.value - q.value) / std::fabs(q.value)) << ")";
    else os << " (" << why << ")";
    r.diagnostics = os.str();
    return r;
}

EvalResult fourth_moment_1(real t, real B, const EvalConfig& cfg) {
    check_t(t, "fourth_moment_1");
    check_B(B, "fourth_moment_1");
    const real m2 = msd1(t, B);
    const real et = std::exp(t);
    EvalResult r;
    std::string why;
    try {
        const auto ee = ei_ei_convolution(t, cfg);
        const auto cl = conv_ei_log(t, ConvRegime::General, cfg);
        r.value = 12 * B * euler_gamma * m2 + 24 * B * B * (et * ee.value - cl.value);
        r.abs_err = 24 * B * B * (et * ee.abs_err + cl.abs_err) + 8 * eps * std::fabs(12 * B * euler_gamma * m2);
        r.diagnostics = "route=closed-form ei*ei:" + ee.diagnostics;
        if (r.abs_err <= 1e-8L * std::fabs(r.value)) return r;
        std::ostringstream os;
        os << "estimate " << double(r.abs_err / std::fabs(r.value)) << " relative";
        why = os.str();
    } catch (const NonConvergence& e) {
        why = e.what();
    }
    // 12 B int_0^t M1(xi) <x^2(t - xi)>_1 dxi
    const auto q = quad::tanh_sinh_split(
        [&](real, real xi, real rest) { return xi > 0 && rest > 0 ? m1_time(xi) * msd1(rest, B) : 0; }, 0, t,
        oracle_tol(cfg));
    r.value = 12 * B * q.value;
    r.abs_err = 12 * B * q.abs_err;
    r.diagnostics = "route=quadrature (closed form fell back: " + why + ")";
    return r;
}

EvalResult moment_even(const MomentRequest& req, const EvalConfig& cfg) {
    req.validate();
    const auto& k = req.kernel;
    const int n = req.order_2n / 2;
    const real t = req.t;
    switch (req.route) {
    case MomentRoute::ClosedForm:
        if (n == 1 && k.kind == KernelKind::DistributedOrder) {
            EvalResult r;
            r.value = msd1(t, k.B);
            r.abs_err = 8 * eps * r.value;
            r.diagnostics = "route=closed-form";
            return r;
        }
        if (n == 1 && k.kind == KernelKind::DistributedPrabhakar)
            return msd2(k.alpha, k.gamma, k.lambda, t, k.B, Msd2Route::Series, cfg);
        if (n == 2 && k.kind == KernelKind::DistributedOrder) return fourth_moment_1(t, k.B, cfg);
        throw RouteUnavailable("moment_even: no closed form for order " + std::to_string(req.order_2n) + " with " +
                               k.name());
    case MomentRoute::IltOracle: {
        const LaplaceFn M = make_kernel_laplace(k, LaplaceObject::Partner);
        LaplaceFn F = M;
        F.eval = [M, n](cplx s) { return std::pow(M.eval(s), n) / s; };
        IltConfig ic = cfg.ilt;
        ic.method = IltMethod::ShiftedTalbot;
        auto r = ilt(F, t, ic);
        const real scale = factorial(2 * n) * std::pow(k.B, n);
        r.value *= scale;
        r.abs_err *= scale;
        r.diagnostics = "route=ilt-talbot";
        return r;
    }
    case MomentRoute::QuadratureOracle: {
        EvalResult r;
        const real tol = oracle_tol(cfg);
        r.value = factorial(2 * n) * std::pow(k.B, n) * partner_power_primitive(k, n, t, tol, cfg);
        r.abs_err = tol * std::fabs(r.value) * n;
        r.diagnostics = "route=quadrature";
        return r;
    }
    }
    throw RouteUnavailable("moment_even: unknown route");
}

KurtosisResult kurtosis(const MemoryKernel& kernel, real t, MomentRoute route, const EvalConfig& cfg) {
    auto moment = [&](int order, std::string& note) {
        try {
            return moment_even({kernel, order, t, route}, cfg);
        } catch (const RouteUnavailable&) {
            note += " order" + std::to_string(order) + "=ilt";
            return moment_even({kernel, order, t, MomentRoute::IltOracle}, cfg);
        }
    };
    std::string note;
    const auto m2 = moment(2, note);
    const auto m4 = moment(4, note);
    KurtosisResult out;
    auto& k = out.kurtosis;
    k.value = m4.value / (m2.value * m2.value);
    k.abs_err = std::fabs(k.value) * (m4.abs_err / std::fabs(m4.value) + 2 * m2.abs_err / std::fabs(m2.value));
    k.converged = m2.converged && m4.converged;
    k.diagnostics = "kurtosis" + note;
    return out;
}

}  // namespace ultraslow
