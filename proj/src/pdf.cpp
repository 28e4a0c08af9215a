#include "ultraslow/pdf.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "ultraslow/kernels.hpp"
#include "ultraslow/lapinv.hpp"
#include "ultraslow/moments.hpp"
#include "ultraslow/quadrature.hpp"
#include "ultraslow/specfun.hpp"
#include "ultraslow/volterra.hpp"

namespace ultraslow {

namespace {

void check_t(real t, const char* who) {
    if (!(t > 0) || !std::isfinite(t)) throw DomainError(std::string(who) + ": t must be > 0");
}

real half_order(int r) { return real(r + 1) / 2; }

// eps^{-b}_{1,b-1,-b+shift}(t) / Gamma(b) on the growing branch.
EvalResult k1_factor(real b, real shift, real t, const EvalConfig& cfg) {
    VPArgs a;
    a.params.alpha = 1;
    a.params.gamma = -b;
    a.params.lambda = -1;
    a.p = -b + shift;
    a.beta_weight = b - 1;
    auto e = vp_epsilon_gen(a, t, cfg);
    const real g = rgamma(b);
    e.value *= g;
    e.abs_err *= g;
    return e;
}

bool has_series(const MemoryKernel& k) {
    return k.kind == KernelKind::DistributedOrder || k.kind == KernelKind::DistributedPrabhakar;
}

}  // namespace

void PdfQuery::validate() const {
    kernel.validate();
    check_t(t, "PdfQuery");
    if (!std::isfinite(x)) throw DomainError("PdfQuery: x must be finite");
    if (series_max_order < 0) throw DomainError("PdfQuery: series_max_order must be >= 0");
    if (!(series_tol > 0)) throw DomainError("PdfQuery: series_tol must be > 0");
}

cplx pdf_laplace(real x, cplx s, const MemoryKernel& kernel) {
    const LaplaceFn psi = make_kernel_laplace(kernel, LaplaceObject::Psi);
    const cplx a = std::sqrt(psi.eval(s) / kernel.B);
    return a * std::exp(-std::fabs(x) * a) / (real(2) * s);
}

real pdf_laplace(real x, real s, const MemoryKernel& kernel) {
    kernel.validate();
    const real floor = std::max<real>(make_kernel_laplace(kernel).abscissa, 0);
    if (!(s > floor) || !std::isfinite(s)) throw DomainError("pdf_laplace: s must exceed max(abscissa, 0)");
    if (!std::isfinite(x)) throw DomainError("pdf_laplace: x must be finite");
    return std::real(pdf_laplace(x, cplx(s), kernel));
}

EvalResult pdf_series_term(int r, real x, real t, real B, const EvalConfig& cfg) {
    if (r < 0) throw DomainError("pdf_series_term: r must be >= 0");
    check_t(t, "pdf_series_term");
    if (!(B > 0)) throw DomainError("pdf_series_term: B must be > 0");
    const real b = half_order(r);
    auto e = k1_factor(b, 0, t, cfg);
    const real sb = std::sqrt(B);
    real c = 1 / (2 * sb);
    for (int k = 1; k <= r; ++k) c *= -std::fabs(x) / sb / k;
    e.value *= c;
    e.abs_err *= std::fabs(c);
    return e;
}

EvalResult pdf_series_factor_prabhakar(int r, real alpha, real gamma, real lambda, real t, const EvalConfig& cfg) {
    if (r < 0) throw DomainError("pdf_series_factor_prabhakar: r must be >= 0");
    check_t(t, "pdf_series_factor_prabhakar");
    MemoryKernel::distributed_prabhakar(alpha, gamma, lambda).validate();
    const real b = half_order(r);
    // (1 + lambda s^-alpha)^{gamma b} = sum_n (-gamma b)_n (-lambda)^n / n! s^{-alpha n}
    EvalResult out;
    real c = 1;
    int quiet = 0, n = 0;
    const real peak = std::pow(lambda * std::pow(t, alpha), 1 / alpha) / alpha + 2;
    for (; n < cfg.series.max_terms; ++n) {
        if (n > 0) c *= -lambda * (-gamma * b + n - 1) / n;
        if (c == 0) {
            quiet = 2;
            break;
        }
        const auto e = k1_factor(b, alpha * n, t, cfg);
        const real term = c * e.value;
        out.value += term;
        out.abs_err += std::fabs(c) * e.abs_err;
        quiet = (n > peak && std::fabs(term) <= 1e-13L * std::fabs(out.value)) ? quiet + 1 : 0;
        if (quiet >= 2) break;
    }
    if (quiet < 2) throw NonConvergence("pdf_series_factor_prabhakar: lambda expansion did not settle");
    out.terms = n + 1;
    return out;
}

EvalResult pdf_series_factor_convolution(int r, real alpha, real gamma, real lambda, real t, const EvalConfig& cfg) {
    check_t(t, "pdf_series_factor_convolution");
    MemoryKernel::distributed_prabhakar(alpha, gamma, lambda).validate();
    if (r != 0 && r != 1)
        throw RouteUnavailable("pdf_series_factor_convolution: the k1 factor is not integrable at the origin for r >= 2");
    const real b = half_order(r);
    PrabhakarParams pp;
    pp.alpha = alpha;
    pp.beta = 0;
    pp.gamma = -gamma * b;
    pp.lambda = lambda;
    auto g = [&](real xi) { return prabhakar_e(pp, xi, cfg).value; };
    auto f = [&](real tau) { return k1_factor(b, 0, tau, cfg).value; };
    const real tol = std::sqrt(cfg.quad_tol) * 1e-2L;
    auto out = k1_factor(b, 0, t, cfg);  // the point mass of e^{-gamma b}_{alpha,0}
    if (r == 0) {
        const auto q = quad::tanh_sinh_split(
            [&](real, real xi, real tau) { return xi > 0 && tau > 0 ? f(tau) * g(xi) : 0; }, 0, t, tol);
        out.value += q.value;
        out.abs_err += q.abs_err;
        return out;
    }
    // r = 1: the factor is k1 ~ 1/(tau ln^2 tau); subtract g(t) near tau = 0
    // against the exact primitive of k1.
    const real h = t / 2, gt = g(t);
    const auto near = quad::tanh_sinh_split(
        [&](real, real tau, real) { return tau > 0 ? f(tau) * (g(t - tau) - gt) : 0; }, 0, h, tol);
    const auto far = quad::tanh_sinh_split(
        [&](real, real, real xi) { return xi > 0 ? f(t - xi) * g(xi) : 0; }, h, t, tol);
    out.value += near.value + far.value + gt * k1_integral(h, cfg).value;
    out.abs_err += near.abs_err + far.abs_err;
    return out;
}

EvalResult pdf_eval(const PdfQuery& q, const EvalConfig& cfg) {
    q.validate();
    const auto& k = q.kernel;
    if (q.route == PdfRoute::IltOfClosedLaplace) {
        LaplaceFn F = make_kernel_laplace(k);
        const real x = q.x;
        const LaplaceFn psi = make_kernel_laplace(k, LaplaceObject::Psi);
        const real B = k.B;
        F.eval = [x, psi, B](cplx s) {
            const cplx a = std::sqrt(psi.eval(s) / B);
            return a * std::exp(-std::fabs(x) * a) / (real(2) * s);
        };
        F.name = "p^(x, s)";
        IltConfig ic = cfg.ilt;
        ic.method = IltMethod::ShiftedTalbot;
        auto r = ilt(F, q.t, ic);
        r.diagnostics = "route=ilt-talbot";
        return r;
    }
    if (!has_series(k)) throw RouteUnavailable("pdf_eval: no series for " + k.name());
    const real sb = std::sqrt(k.B), ax = std::fabs(q.x);
    EvalResult out;
    real c = 1 / (2 * sb);
    int quiet = 0, r = 0, used = 0;
    for (; r <= q.series_max_order; ++r) {
        if (r > 0) {
            if (ax == 0) {
                quiet = 2;
                break;
            }
            c *= -ax / sb / r;
        }
        const auto f = k.kind == KernelKind::DistributedOrder
                           ? k1_factor(half_order(r), 0, q.t, cfg)
                           : pdf_series_factor_prabhakar(r, k.alpha, k.gamma, k.lambda, q.t, cfg);
        const real term = c * f.value;
        ++used;
        out.value += term;
        out.abs_err += std::fabs(c) * f.abs_err;
        quiet = (r > 0 && std::fabs(term) <= q.series_tol * std::fabs(out.value)) ? quiet + 1 : 0;
        if (quiet >= 2) break;
    }
    if (quiet < 2) {
        std::ostringstream os;
        os << "pdf_eval: series in |x| not settled by order " << q.series_max_order << " at x = " << double(q.x);
        throw RouteUnavailable(os.str());
    }
    out.terms = used;
    out.abs_err += q.series_tol * std::fabs(out.value);
    std::ostringstream os;
    os << "route=series orders=" << out.terms;
    out.diagnostics = os.str();
    return out;
}

PdfMoments pdf_moments(const MemoryKernel& kernel, real t, real width, const EvalConfig& cfg) {
    kernel.validate();
    check_t(t, "pdf_moments");
    if (!(width > 0)) throw DomainError("pdf_moments: width must be > 0");
    real msd;
    try {
        msd = moment_even({kernel, 2, t, MomentRoute::ClosedForm}, cfg).value;
    } catch (const RouteUnavailable&) {
        msd = moment_even({kernel, 2, t, MomentRoute::IltOracle}, cfg).value;
    }
    PdfMoments m;
    m.half_width = width * std::sqrt(msd);
    const real L = m.half_width;
    std::vector<real> breaks{0};
    for (real f = 1.0L / 1024; f < 1; f *= 4) breaks.push_back(L * f);
    breaks.push_back(L);
    const real tol = std::sqrt(cfg.quad_tol) * 1e-2L;
    auto p = [&](real x) { return pdf_eval({x, t, kernel}, cfg).value; };
    // p is even: integrate one side and double
    auto moment = [&](int power) {
        return 2 * quad::gauss_kronrod_panels([&](real x) { return std::pow(x, power) * p(x); }, breaks, tol).value;
    };
    m.mass = moment(0);
    m.second = moment(2);
    m.fourth = moment(4);
    return m;
}

}  // namespace ultraslow
