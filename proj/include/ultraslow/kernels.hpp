#pragma once

#include <functional>
#include <string>

#include "ultraslow/types.hpp"

namespace ultraslow {

enum class K2Route { Convolution, NuSeries, EpsilonDiff, Laplace };
enum class M2Route { Convolution, ExactSeries, Laplace };

/// k1(t) = nu(t, -1) - nu(t).  Above t = 1 the branch-cut form
/// int e^{-rt} (1 + r)/(r (pi^2 + ln^2 r)) dr is used; it has no e^t cancellation.
EvalResult k1_time(real t, const EvalConfig& cfg = {});

/// int_0^h k1 = nu(h) - nu(h, 1).
EvalResult k1_integral(real h, const EvalConfig& cfg = {});

/// Distributed-order Prabhakar kernel; transform (s-1)/(s ln s) (1 + lambda s^-alpha)^gamma.
EvalResult k2_time(real alpha, real gamma, real lambda, real t, K2Route route = K2Route::NuSeries,
                   const EvalConfig& cfg = {});

/// int_0^h k2, from the nu-series shifted by one order.
EvalResult k2_integral(real alpha, real gamma, real lambda, real h, const EvalConfig& cfg = {});

/// M1(t) = e^t E1(t).
real m1_time(real t);

/// Sonnine partner of k2.  ExactSeries falls back to Convolution (noted in
/// diagnostics) when it does not converge.
EvalResult m2_time(real alpha, real gamma, real lambda, real t, M2Route route = M2Route::ExactSeries,
                   const EvalConfig& cfg = {});

/// k(t) for any kernel kind.  Caputo: t^-mu/Gamma(1-mu); single Prabhakar:
/// e^{-gamma}_{alpha,1-mu}(lambda; t).
EvalResult kernel_time(const MemoryKernel& k, real t, const EvalConfig& cfg = {});

/// Sonnine partner M(t): Laplace transform 1/(s^2 k^(s)).
EvalResult partner_time(const MemoryKernel& k, real t, const EvalConfig& cfg = {});

/// |int_0^t k(t - xi) M(xi) dxi - 1|.  The 1/(tau ln^2 tau) end of the
/// distributed kernels is handled by subtracting M(t) against the exact
/// primitive of k.
real sonnine_residual(const MemoryKernel& k, real t, const EvalConfig& cfg = {});

enum class AsymptoticId { k1, k2, M1, M2, msd1, msd2 };
enum class Regime { ShortTime, LongTime };

struct AsymptoticForm {
    Regime regime = Regime::LongTime;
    std::function<real(real)> expression;
    std::string description;
};

/// Leading-order behaviour from the Tauberian theorem.  Throws Inapplicable
/// where the transform's exponent rho is not positive (k at short times, M at long times).
/// Parameters alpha, gamma, lambda, B are read from `k`.
AsymptoticForm tauberian_asymptote(AsymptoticId id, Regime regime,
                                   const MemoryKernel& k = MemoryKernel::distributed_prabhakar(0.5L, 0.5L, 1));

}  // namespace ultraslow
