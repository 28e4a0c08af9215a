#include "ultraslow/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ultraslow/lapinv.hpp"

namespace ultraslow {

namespace {

using constants::euler_gamma;
using constants::pi;

bool is_nonpositive_integer(real x) { return x <= 0 && x == std::floor(x); }

// sin(pi x) with exact zeros at the integers.
real sinpi(real x) {
    real r = std::fmod(x, real(2));
    if (r < 0) r += 2;
    if (r == 0 || r == 1) return 0;
    if (r > 1) return -std::sin(pi * (r - 1));
    return std::sin(pi * r);
}

template <class Acc>
constexpr real acc_eps() {
    return real(std::numeric_limits<Acc>::epsilon());
}

real tolerance_for(const SeriesConfig& sc, real sum) {
    return std::max(sc.abs_tol, sc.rel_tol * std::fabs(sum));
}

}  // namespace

// ---------------------------------------------------------------------------

real rgamma(real x) {
    if (is_nonpositive_integer(x)) return 0;
    if (x > 0) {
        if (x < 1700) return 1 / std::tgamma(x);
        return std::exp(-std::lgamma(x));
    }
    // Reflection: 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi.
    const real s = sinpi(x);
    if (1 - x < 1700) return s * std::tgamma(1 - x) / pi;
    return s * std::exp(std::lgamma(1 - x)) / pi;
}

real pochhammer(real a, int n) {
    if (n < 0) throw DomainError("pochhammer: n must be >= 0");
    real p = 1;
    for (int k = 0; k < n; ++k) p *= a + k;
    return p;
}

real digamma(real x) {
    if (!std::isfinite(x)) throw DomainError("digamma: non-finite argument");
    if (is_nonpositive_integer(x)) throw DomainError("digamma: pole at non-positive integer");
    if (x < 0.5L) {
        // psi(x) = psi(1 - x) - pi cot(pi x)
        const real s = sinpi(x);
        const real c = std::cos(pi * (x - 2 * std::floor(x / 2)));
        return digamma(1 - x) - pi * c / s;
    }
    real acc = 0;
    while (x < 12) {
        acc -= 1 / x;
        x += 1;
    }
    const real inv = 1 / x;
    const real inv2 = inv * inv;
    // Bernoulli tail: -sum B_2k / (2k x^2k)
    static constexpr real c[] = {1.0L / 12, -1.0L / 120, 1.0L / 252, -1.0L / 240,
                                 1.0L / 132, -691.0L / 32760, 1.0L / 12};
    real tail = 0, p = inv2;
    for (real ck : c) {
        tail += ck * p;
        p *= inv2;
    }
    return acc + std::log(x) - inv / 2 - tail;
}

real harmonic(int n, int order) {
    if (n < 0) throw DomainError("harmonic: n must be >= 0");
    if (order != 1 && order != 2) throw DomainError("harmonic: order must be 1 or 2");
    real h = 0;
    for (int k = n; k >= 1; --k) h += order == 1 ? real(1) / k : real(1) / (real(k) * k);
    return h;
}

// ---------------------------------------------------------------------------
// Exponential integrals

namespace {

// sum_{k>=1} x^k / (k k!)
real ein_series_positive(real x) {
    real term = 1, sum = 0;
    for (int k = 1; k < 2000; ++k) {
        term *= x / k;
        const real add = term / k;
        sum += add;
        if (std::fabs(add) <= std::numeric_limits<real>::epsilon() * std::fabs(sum)) break;
    }
    return sum;
}

// e^t E1(t) for t >= 1 by the modified Lentz continued fraction.
real e1_scaled_cf(real t) {
    constexpr real tiny = 1e-4000L;
    real b = t + 1;
    real c = 1 / tiny;
    real d = 1 / b;
    real h = d;
    for (int i = 1; i < 10000; ++i) {
        const real an = -real(i) * i;
        b += 2;
        d = 1 / (an * d + b);
        c = b + an / c;
        const real del = c * d;
        h *= del;
        if (std::fabs(del - 1) <= std::numeric_limits<real>::epsilon()) return h;
    }
    throw NonConvergence("exp_integral_e1: continued fraction did not converge");
}

}  // namespace

real exp_integral_e1(real t) {
    if (!(t > 0)) throw DomainError("exp_integral_e1: argument must be > 0");
    if (t <= 1) {
        // E1 = -C - ln t + sum_{k>=1} (-1)^{k+1} t^k / (k k!)
        return -euler_gamma - std::log(t) + ein(t);
    }
    return e1_scaled_cf(t) * std::exp(-t);
}

real scaled_e1(real t) {
    if (!(t > 0)) throw DomainError("scaled_e1: argument must be > 0");
    if (t <= 1) return std::exp(t) * exp_integral_e1(t);
    return e1_scaled_cf(t);
}

real exp_integral_ei(real x) {
    if (x == 0 || !std::isfinite(x)) throw DomainError("exp_integral_ei: argument must be finite and nonzero");
    if (x < 0) return -exp_integral_e1(-x);
    if (x <= 40) return euler_gamma + std::log(x) + ein_series_positive(x);
    // Asymptotic e^x/x sum k!/x^k, truncated at the smallest term.
    real term = 1, sum = 1;
    for (int k = 1; k < 200; ++k) {
        const real next = term * k / x;
        if (next >= term) break;
        term = next;
        sum += term;
        if (term < std::numeric_limits<real>::epsilon() * sum) break;
    }
    return std::exp(x) / x * sum;
}

real ein(real t) {
    if (!std::isfinite(t)) throw DomainError("ein: non-finite argument");
    if (t == 0) return 0;
    if (t > 2) return euler_gamma + std::log(t) + exp_integral_e1(t);
    if (t < 0) return -ein_series_positive(-t);
    // Alternating series sum_{k>=1} (-1)^{k+1} t^k / (k k!), harmless for t <= 2.
    real term = 1, sum = 0;
    for (int k = 1; k < 200; ++k) {
        term *= -t / k;
        const real add = -term / k;
        sum += add;
        if (std::fabs(add) <= std::numeric_limits<real>::epsilon() * std::fabs(sum)) break;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Generalized hypergeometric series

namespace {

template <class Acc>
EvalResult pfq_sum(const std::vector<real>& a, const std::vector<real>& b, real z, const SeriesConfig& sc) {
    EvalResult out;
    Acc sum = 1, abs_sum = 1;
    Acc term = 1;
    int small_run = 0;
    bool terminated = false;
    int k = 0;
    for (; k < sc.max_terms; ++k) {
        Acc ratio = Acc(z) / Acc(k + 1);
        for (real ai : a) ratio *= Acc(ai + k);
        for (real bi : b) ratio /= Acc(bi + k);
        term *= ratio;
        if (term == 0) {
            terminated = true;
            ++k;
            break;
        }
        sum += term;
        abs_sum += std::fabs(term);
        // Terms shrink monotonically once k exceeds |z| and the parameters.
        const bool past_peak = std::fabs(real(ratio)) < 1;
        if (past_peak && std::fabs(real(term)) <= tolerance_for(sc, real(sum))) {
            if (++small_run >= 2) {
                ++k;
                break;
            }
        } else {
            small_run = 0;
        }
    }
    out.value = real(sum);
    out.terms = k + 1;
    const real rounding = 4 * acc_eps<Acc>() * real(abs_sum);
    real truncation = 0;
    if (!terminated) {
        // Next term, bounded by a geometric tail with the current ratio.
        Acc ratio = Acc(z) / Acc(k + 1);
        for (real ai : a) ratio *= Acc(ai + k);
        for (real bi : b) ratio /= Acc(bi + k);
        const real q = std::fabs(real(ratio));
        const real next = std::fabs(real(term * ratio));
        truncation = q < 1 ? next / (1 - q) : std::numeric_limits<real>::infinity();
    }
    out.abs_err = truncation + rounding;
    out.converged = truncation <= tolerance_for(sc, out.value);
    return out;
}

}  // namespace

EvalResult hyper_pfq(const std::vector<real>& upper, const std::vector<real>& lower, real z,
                     const EvalConfig& cfg) {
    cfg.series.validate();
    if (!std::isfinite(z)) throw DomainError("hyper_pfq: non-finite argument");
    for (real b : lower)
        if (is_nonpositive_integer(b)) throw DomainError("hyper_pfq: lower parameter at a pole");
    const bool terminating =
        std::any_of(upper.begin(), upper.end(), [](real a) { return is_nonpositive_integer(a); });
    const auto p = upper.size(), q = lower.size();
    if (!terminating) {
        if (p > q + 1) throw DomainError("hyper_pfq: divergent series (p > q + 1)");
        if (p == q + 1 && std::fabs(z) >= 1) throw DomainError("hyper_pfq: |z| >= 1 outside the disc of convergence");
    }
    EvalResult r = cfg.precision == Precision::Double ? pfq_sum<double>(upper, lower, z, cfg.series)
                                                      : pfq_sum<long double>(upper, lower, z, cfg.series);
    if (!r.converged) {
        std::ostringstream os;
        os << "hyper_pfq: series not converged after " << r.terms << " terms (estimate " << double(r.abs_err) << ")";
        throw NonConvergence(os.str());
    }
    r.diagnostics = "route=series";
    return r;
}

// ---------------------------------------------------------------------------
// Three-parameter Mittag-Leffler

namespace {

template <class Acc>
EvalResult ml_series(real alpha, real beta, real gamma, real z, const SeriesConfig& sc) {
    EvalResult out;
    Acc sum = 0, abs_sum = 0;
    Acc coeff = 1;  // (gamma)_r z^r / r!
    const real az = std::fabs(z);
    // Beyond r_peak the term ratio |z| (gamma + r) / ((r + 1) (alpha r)^alpha) is below one.
    const real r_peak = az > 0 ? std::pow(az, 1 / alpha) / alpha + std::fabs(gamma) + 2 : 0;
    int small_run = 0;
    int r = 0;
    bool terminated = false;
    Acc last = 0;
    for (; r < sc.max_terms; ++r) {
        if (r > 0) {
            coeff *= Acc(gamma + r - 1) * Acc(z) / Acc(r);
            if (coeff == 0) {
                terminated = true;
                break;
            }
        }
        const Acc term = coeff * Acc(rgamma(beta + alpha * r));
        sum += term;
        abs_sum += std::fabs(term);
        last = term;
        if (is_nonpositive_integer(beta + alpha * r)) continue;
        // stop on the geometric tail bound, not on the last term alone
        const real q = az * (std::fabs(gamma) + r + 1) / (r + 2) / std::pow(std::max<real>(alpha * (r + 1), 1), alpha);
        const real tail = q < 1 ? std::fabs(real(term)) * q / (1 - q) : std::numeric_limits<real>::infinity();
        if (r >= r_peak && std::max(std::fabs(real(term)), tail) <= tolerance_for(sc, real(sum))) {
            if (++small_run >= 2) {
                ++r;
                break;
            }
        } else {
            small_run = 0;
        }
    }
    out.value = real(sum);
    out.terms = r;
    real truncation = 0;
    if (!terminated) {
        const real q = az * (std::fabs(gamma) + r) / (r + 1) / std::pow(std::max<real>(alpha * r, 1), alpha);
        truncation = (r >= r_peak && q < 1) ? std::fabs(real(last)) * q / (1 - q)
                                            : std::numeric_limits<real>::infinity();
    }
    out.abs_err = truncation + 4 * acc_eps<Acc>() * real(abs_sum);
    out.converged = truncation <= tolerance_for(sc, out.value);
    return out;
}

// Algebraic expansion of E^gamma_{alpha,beta}(-x) for large x > 0, 0 < alpha <= 1.
EvalResult ml_asymptotic(real alpha, real beta, real gamma, real x, const SeriesConfig& sc) {
    EvalResult out;
    real coeff = std::pow(x, -gamma);  // (gamma)_k (-1)^k x^{-gamma-k} / k!
    real sum = 0, prev = std::numeric_limits<real>::infinity();
    real omitted = std::numeric_limits<real>::infinity();
    int k = 0;
    for (; k < sc.max_terms; ++k) {
        if (k > 0) coeff *= -(gamma + k - 1) / (k * x);
        const real term = coeff * rgamma(beta - alpha * (gamma + k));
        const real mag = std::fabs(term);
        if (coeff == 0) {
            omitted = 0;
            break;
        }
        if (mag > prev && mag != 0) {
            omitted = mag;
            break;
        }
        sum += term;
        if (mag != 0) prev = mag;
        if (mag <= 0.01L * tolerance_for(sc, sum) && k > 2) {
            omitted = mag;
            ++k;
            break;
        }
    }
    // For alpha = 1 an exponentially small part e^{-x} x^{gamma-beta} / Gamma(gamma) is dropped.
    if (alpha == 1) omitted += std::exp(-x) * std::pow(x, std::max<real>(gamma - beta, 0) + 1);
    out.value = sum;
    out.terms = k;
    out.abs_err = omitted + 8 * std::numeric_limits<real>::epsilon() * std::fabs(sum);
    out.converged = out.abs_err <= tolerance_for(sc, sum);
    return out;
}

// E^gamma_{alpha,beta}(-x) = tau^{1-beta} L^{-1}[s^{alpha gamma - beta} / (s^alpha + 1)^gamma](tau), tau = x^{1/alpha}.
EvalResult ml_talbot(real alpha, real beta, real gamma, real x, const EvalConfig& cfg) {
    const real tau = std::pow(x, 1 / alpha);
    auto F = [=](cplx s) { return std::pow(s, cplx(alpha * gamma - beta)) / std::pow(std::pow(s, cplx(alpha)) + real(1), cplx(gamma)); };
    const int nodes = std::max(cfg.ilt.talbot_nodes, 32);
    EvalResult r = talbot_inversion(F, tau, nodes, 0, nodes * 3 / 4);
    const real scale = std::pow(tau, 1 - beta);
    r.value *= scale;
    r.abs_err *= scale;
    return r;
}

}  // namespace

EvalResult mittag_leffler_3p(const PrabhakarParams& params, real z, const EvalConfig& cfg) {
    params.validate();
    cfg.series.validate();
    if (!std::isfinite(z)) throw DomainError("mittag_leffler_3p: non-finite argument");
    const real a = params.alpha, b = params.beta, g = params.gamma;
    const bool polynomial = is_nonpositive_integer(g);
    const auto series = [&] {
        return cfg.precision == Precision::Double ? ml_series<double>(a, b, g, z, cfg.series)
                                                  : ml_series<long double>(a, b, g, z, cfg.series);
    };

    const real x = -z;
    const bool series_cheap = polynomial || z >= 0 || std::pow(x, 1 / a) <= 18;
    if (series_cheap) {
        EvalResult r = series();
        r.diagnostics = "route=series";
        if (!r.converged) {
            std::ostringstream os;
            os << "mittag_leffler_3p: series not converged after " << r.terms << " terms";
            throw NonConvergence(os.str());
        }
        return r;
    }
    if (a > 1) {
        EvalResult r = series();
        r.diagnostics = "route=series(alpha>1)";
        if (!r.converged) throw NonConvergence("mittag_leffler_3p: alpha > 1 with large negative argument");
        return r;
    }
    if (x >= cfg.ml_asymptotic_crossover) {
        EvalResult r = ml_asymptotic(a, b, g, x, cfg.series);
        if (r.converged || r.abs_err <= 1e-13L * std::max<real>(1, std::fabs(r.value))) {
            r.diagnostics = "route=asymptotic";
            return r;
        }
    }
    EvalResult r = ml_talbot(a, b, g, x, cfg);
    r.diagnostics = "route=talbot";
    return r;
}

EvalResult prabhakar_e(const PrabhakarParams& params, real t, const EvalConfig& cfg) {
    params.validate();
    if (!(t > 0) || !std::isfinite(t)) throw DomainError("prabhakar_e: t must be > 0");
    EvalResult r = mittag_leffler_3p(params, -params.lambda * std::pow(t, params.alpha), cfg);
    const real f = std::pow(t, params.beta - 1);
    r.value *= f;
    r.abs_err *= f;
    return r;
}

}  // namespace ultraslow
