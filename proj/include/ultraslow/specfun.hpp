#pragma once

#include <vector>

#include "ultraslow/types.hpp"

namespace ultraslow {

// ---------------------------------------------------------------------------
// Gamma family

/// 1/Gamma(x); entire, exactly zero at 0, -1, -2, ...
real rgamma(real x);

/// Rising factorial (a)_n = Gamma(a + n) / Gamma(a).
real pochhammer(real a, int n);

/// psi(x) = d/dx ln Gamma(x).  DomainError at non-positive integers.
real digamma(real x);

/// Generalized harmonic number H_n^{(s)} = sum_{k=1}^n k^{-s}, s in {1, 2}.
real harmonic(int n, int order = 1);

// ---------------------------------------------------------------------------
// Exponential integrals

/// Ei(x) for x != 0 (principal value for x > 0).  Ei(-t) = -E1(t).
real exp_integral_ei(real x);

/// E1(t) = int_t^inf e^{-u}/u du, t > 0.
real exp_integral_e1(real t);

/// e^t E1(t), evaluated without overflow for large t.
real scaled_e1(real t);

/// Ein(t) = int_0^t (1 - e^{-u})/u du, entire.
real ein(real t);

// ---------------------------------------------------------------------------
// Series-defined functions

/// Generalized hypergeometric pFq(upper; lower; z) by direct summation.
EvalResult hyper_pfq(const std::vector<real>& upper, const std::vector<real>& lower, real z,
                     const EvalConfig& cfg = {});

/// Three-parameter Mittag-Leffler function
///   E^gamma_{alpha,beta}(z) = sum_r (gamma)_r z^r / (r! Gamma(beta + alpha r)).
/// params.lambda is ignored.  Terms whose Gamma argument sits on a pole
/// contribute exactly zero.
EvalResult mittag_leffler_3p(const PrabhakarParams& params, real z, const EvalConfig& cfg = {});

/// Prabhakar function e^gamma_{alpha,beta}(lambda; t) = t^{beta-1} E^gamma_{alpha,beta}(-lambda t^alpha).
EvalResult prabhakar_e(const PrabhakarParams& params, real t, const EvalConfig& cfg = {});

}  // namespace ultraslow
