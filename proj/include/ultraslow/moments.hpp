#pragma once

#include "ultraslow/types.hpp"

namespace ultraslow {

enum class MomentRoute { ClosedForm, IltOracle, QuadratureOracle };

/// <x^{2n}(t)> for the diffusion driven by `kernel`.  Odd moments vanish and
/// are not represented.
struct MomentRequest {
    MemoryKernel kernel = MemoryKernel::distributed();
    int order_2n = 2;
    real t = 1;
    MomentRoute route = MomentRoute::ClosedForm;

    void validate() const;
};

/// (2n)! B^n int_0^t L^{-1}[M^n](u) du.
/// ClosedForm exists for order 2 (both distributed kernels) and order 4 (k1);
/// anything else throws RouteUnavailable.  IltOracle inverts s^{-1} M^n(s) on
/// a Talbot contour.  QuadratureOracle nests n convolutions of M; its cost
/// grows geometrically with n.
EvalResult moment_even(const MomentRequest& req, const EvalConfig& cfg = {});

/// <x^2(t)>_1 = 2B [C + ln t + e^t E1(t)].
real msd1(real t, real B = 1);

enum class Msd2Route { Series, QuadratureOracle };

/// <x^2(t)>_2 = 2B int_0^t M2.
/// Series: 2B sum_r (gamma)_r (-lambda)^r / r! [ -int_0^t ln(u) e_{1,1+alpha r}(u) du
///                                              + sum_{j>=1} psi(j + alpha r) t^{alpha r + j} / Gamma(alpha r + j + 1) ].
/// The terms grow like e^t and cancel; once the rounding estimate passes
/// 1e-8 relative the value comes from QuadratureOracle instead (said in diagnostics).
EvalResult msd2(real alpha, real gamma, real lambda, real t, real B = 1, Msd2Route route = Msd2Route::Series,
                const EvalConfig& cfg = {});

/// int_0^t ln(u) e_{1,1+a}(u) du, with e_{1,b}(u) = u^{b-1} E_{1,b}(u):
///   ln t e_{1,2+a}(t) - t^{1+a} / ((1+a) Gamma(2+a)) 2F2(1, 1+a; 2+a, 2+a; t).
EvalResult prabhakar_log_integral(real a, real t, const EvalConfig& cfg = {});

enum class ConvRegime { General, SmallT };

/// int_0^t e^xi Ei(-xi) ln(t - xi) dxi.
/// General carries 2 t e^t 3F3(1,1,1; 2,2,2; -t).  SmallT (t in (0, 1) only)
/// uses harmonic sums and int_0^t [2 Ein(u) + e^{-u} Ein(-u)] du/u.
EvalResult conv_ei_log(real t, ConvRegime regime = ConvRegime::General, const EvalConfig& cfg = {});

/// int_0^t Ei(-xi) Ei(xi - t) dxi.  The closed form loses everything to
/// cancellation at large t, so it is checked against endpoint-graded
/// quadrature and replaced by it (diagnostics "quadrature-substituted")
/// when they differ by more than 1e-6 relative.
EvalResult ei_ei_convolution(real t, const EvalConfig& cfg = {});

/// <x^4(t)>_1 = 12 B C <x^2>_1 + 24 B^2 e^t (Ei * Ei)(t) - 24 B^2 conv_ei_log(t).
EvalResult fourth_moment_1(real t, real B = 1, const EvalConfig& cfg = {});

struct KurtosisResult {
    EvalResult kurtosis;
    /// Odd moments vanish for the symmetric PDF.
    real skewness = 0;
};

/// <x^4> / <x^2>^2.  Where `route` has no closed form at order 4 the
/// fourth moment falls back to IltOracle.
KurtosisResult kurtosis(const MemoryKernel& kernel, real t, MomentRoute route = MomentRoute::ClosedForm,
                        const EvalConfig& cfg = {});

}  // namespace ultraslow
