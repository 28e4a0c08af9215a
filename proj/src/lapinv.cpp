#include "ultraslow/lapinv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace ultraslow {

namespace {

using constants::ln2;
using constants::pi;

// Stehfest weights, built once per order.
const std::vector<real>& stehfest_weights(int n) {
    static std::mutex mu;
    static std::map<int, std::vector<real>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    auto fact = [](int k) {
        real f = 1;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };
    const int h = n / 2;
    std::vector<real> v(n + 1, 0);
    for (int k = 1; k <= n; ++k) {
        real s = 0;
        for (int j = (k + 1) / 2; j <= std::min(k, h); ++j) {
            s += std::pow(real(j), h) * fact(2 * j) /
                 (fact(h - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k));
        }
        v[k] = ((k + h) % 2 == 0 ? 1 : -1) * s;
    }
    return cache.emplace(n, std::move(v)).first->second;
}

real gs_sum(const std::function<real(real)>& F, real t, int n, real shift) {
    const auto& v = stehfest_weights(n);
    const real a = ln2 / t;
    real sum = 0;
    for (int k = 1; k <= n; ++k) {
        const real val = F(shift + k * a);
        if (!std::isfinite(val)) {
            std::ostringstream os;
            os << "gaver_stehfest: non-finite sample at s=" << double(shift + k * a);
            throw SingularSample(os.str());
        }
        sum += v[k] * val;
    }
    return std::exp(shift * t) * a * sum;
}

real talbot_sum(const std::function<cplx(cplx)>& F, real t, int m, real shift) {
    const real r = 2 * real(m) / (5 * t);
    cplx acc = real(0.5) * F(cplx(shift + r)) * std::exp(r * t);
    for (int k = 1; k < m; ++k) {
        const real th = k * pi / m;
        const real cot = std::cos(th) / std::sin(th);
        const cplx s(r * th * cot, r * th);
        const real sigma = th + (th * cot - 1) * cot;
        const cplx term = std::exp(t * s) * F(s + shift) * cplx(1, sigma);
        acc += cplx(term.real(), 0);
    }
    const real val = std::exp(shift * t) * r / m * acc.real();
    if (!std::isfinite(val)) throw SingularSample("talbot_inversion: non-finite contour sample");
    return val;
}

}  // namespace

cplx psi1(cplx s) {
    const cplx w = s - real(1);
    if (std::abs(w) < 1e-3L) {
        // w / ln(1 + w)
        return real(1) + w * (real(1) / 2 + w * (real(-1) / 12 + w * (real(1) / 24 + w * (real(-19) / 720 + w * (real(3) / 160)))));
    }
    return w / std::log(s);
}

real LaplaceFn::operator()(real s) const {
    if (!(s > abscissa)) {
        std::ostringstream os;
        os << name << ": sample s=" << double(s) << " at or left of the abscissa " << double(abscissa);
        throw SingularSample(os.str());
    }
    const real v = eval(cplx(s, 0)).real();
    if (!std::isfinite(v)) throw SingularSample(name + ": non-finite sample");
    return v;
}

EvalResult gaver_stehfest(const std::function<real(real)>& F, real t, int n, real shift) {
    if (!(t > 0)) throw DomainError("gaver_stehfest: t must be > 0");
    if (n < 4 || n % 2) throw DomainError("gaver_stehfest: n must be even and >= 4");
    EvalResult out;
    out.value = gs_sum(F, t, n, shift);
    out.abs_err = std::fabs(out.value - gs_sum(F, t, n - 2, shift));
    out.terms = n;
    out.diagnostics = "route=gaver-stehfest";
    return out;
}

EvalResult talbot_inversion(const std::function<cplx(cplx)>& F, real t, int nodes, real shift, int coarse_nodes) {
    if (!(t > 0)) throw DomainError("talbot_inversion: t must be > 0");
    if (nodes < 4) throw DomainError("talbot_inversion: nodes must be >= 4");
    if (coarse_nodes <= 0) coarse_nodes = nodes / 2;
    EvalResult out;
    out.value = talbot_sum(F, t, nodes, shift);
    out.abs_err = std::fabs(out.value - talbot_sum(F, t, coarse_nodes, shift));
    out.terms = nodes;
    out.diagnostics = "route=talbot";
    return out;
}

EvalResult ilt(const LaplaceFn& f, real t, const IltConfig& cfg) {
    cfg.validate();
    if (!(t > 0) || !std::isfinite(t)) throw DomainError("ilt: t must be > 0");
    EvalResult r;
    if (cfg.method == IltMethod::GaverStehfest) {
        // Samples k ln2/t would fall on the singular part of the axis; move them right.
        real shift = std::isnan(cfg.shift) ? (f.abscissa > 0 ? f.abscissa + real(0.1) : 0) : cfg.shift;
        if (shift + ln2 / t <= f.abscissa) throw SingularSample(f.name + ": Gaver-Stehfest samples cross the abscissa");
        r = gaver_stehfest([&](real s) { return f(s); }, t, cfg.gs_terms, shift);
    } else {
        // e^{shift t} multiplies the contour sum; keep it O(1) at large t
        const real shift = std::isnan(cfg.shift) ? f.abscissa + std::min<real>(1, 1 / t) : cfg.shift;
        if (!(shift > f.abscissa)) throw DomainError("ilt: Talbot shift must exceed the abscissa");
        r = talbot_inversion(f.eval, t, cfg.talbot_nodes, shift);
    }
    if (r.abs_err > cfg.tol * std::max<real>(1, std::fabs(r.value))) {
        std::ostringstream os;
        os << "ilt(" << f.name << ", t=" << double(t) << "): error estimate " << double(r.abs_err)
           << " above tolerance";
        throw NonConvergence(os.str());
    }
    return r;
}

LaplaceFn make_kernel_laplace(const MemoryKernel& k, LaplaceObject what) {
    k.validate();
    LaplaceFn f;
    f.abscissa = 0;
    f.singularities.branch_cut_negative_axis = true;

    // Psi^(s) = s k^(s) determines all three objects.
    std::function<cplx(cplx)> psi;
    std::string base;
    switch (k.kind) {
    case KernelKind::SingleCaputo: {
        const real mu = k.mu;
        psi = [mu](cplx s) { return std::pow(s, cplx(mu)); };
        base = "K1";
        break;
    }
    case KernelKind::SinglePrabhakar: {
        const real mu = k.mu, a = k.alpha, g = k.gamma, lam = k.lambda;
        psi = [=](cplx s) { return std::pow(s, cplx(mu)) * std::pow(real(1) + lam * std::pow(s, cplx(-a)), cplx(g)); };
        base = "K2";
        break;
    }
    case KernelKind::DistributedOrder:
        psi = psi1;
        f.singularities.removable_at_one = true;
        base = "k1";
        break;
    case KernelKind::DistributedPrabhakar: {
        const real a = k.alpha, g = k.gamma, lam = k.lambda;
        psi = [=](cplx s) { return psi1(s) * std::pow(real(1) + lam * std::pow(s, cplx(-a)), cplx(g)); };
        f.singularities.removable_at_one = true;
        base = "k2";
        break;
    }
    }

    switch (what) {
    case LaplaceObject::Kernel:
        f.eval = [psi](cplx s) { return psi(s) / s; };
        f.name = base + "^";
        break;
    case LaplaceObject::Partner:
        f.eval = [psi](cplx s) { return real(1) / psi(s); };
        f.name = "M(" + base + ")^";
        break;
    case LaplaceObject::Psi:
        f.eval = psi;
        f.name = "Psi(" + base + ")^";
        break;
    }
    return f;
}

}  // namespace ultraslow
