#pragma once

#include "ultraslow/types.hpp"

namespace ultraslow {

/// Arguments of mu(t, beta, alpha) = (1/Gamma(1+beta)) int_0^inf t^{u+alpha} u^beta / Gamma(u+alpha+1) du.
struct VolterraArgs {
    real t = 1;
    real beta = 0;
    real alpha_shift = 0;

    void validate() const;
};

/// Volterra-Prabhakar arguments: params supplies alpha, gamma and lambda
/// (params.beta is unused); p is the order shift; beta_weight > -1 is the
/// exponent of the u^beta weight in the generalized form.
struct VPArgs {
    PrabhakarParams params{};
    real p = 0;
    real beta_weight = 0;

    void validate() const;
};

enum class VPRoute { UIntegral, NuSeries, Bromwich };

EvalResult volterra_mu(const VolterraArgs& args, const EvalConfig& cfg = {});

/// nu(t, q) = mu(t, 0, q); any real q.
EvalResult nu(real t, real q = 0, const EvalConfig& cfg = {});

/// nu(t, q) = e^t - (1/pi) int_0^inf e^{-rt} r^{-q-1} (ln r sin(pi q) + pi cos(pi q)) / (pi^2 + ln^2 r) dr,
/// valid for q <= 0.  Avoids the e^t growth of the u-integral when only
/// differences are wanted: see nu_spectral_part.
EvalResult nu_spectral(real t, real q, const EvalConfig& cfg = {});

/// The integral term alone: nu(t, q) = e^t - nu_spectral_part(t, q).
EvalResult nu_spectral_part(real t, real q, const EvalConfig& cfg = {});

/// epsilon^gamma_{alpha,p}(lambda; t).
EvalResult vp_epsilon(const VPArgs& args, real t, VPRoute route = VPRoute::UIntegral, const EvalConfig& cfg = {});

/// epsilon^gamma_{alpha,beta,p}(lambda; t) = int_0^inf u^beta e^gamma_{alpha,u+p+1}(lambda; t) du.
EvalResult vp_epsilon_gen(const VPArgs& args, real t, const EvalConfig& cfg = {});

/// Spectral density K^gamma_{alpha,p}(r) of the lambda = 1 branch cut; K~ = -K.
real spectral_kernel(real alpha, real gamma, real p, real r);

/// Same density from -(1/pi) Im F(r e^{i pi}), F(s) = s^{alpha gamma - p} / ((s^alpha + 1)^gamma s ln s).
real spectral_kernel_complex(real alpha, real gamma, real p, real r);

/// int_0^inf e^{-r t} K~^gamma_{alpha,p}(r) dr for t >= 0 (t = 0 gives the total mass).
EvalResult spectral_laplace(real alpha, real gamma, real p, real t, const EvalConfig& cfg = {});

/// Throws RouteUnavailable unless (alpha, gamma, p) admit the branch-cut representation.
void require_bromwich(real alpha, real gamma, real lambda, real p);

// ---------------------------------------------------------------------------
// Identity residuals (value = left side - right side)

/// nu(t) + int_0^inf e^{-rt}/(r (pi^2 + ln^2 r)) dr - e^t.
EvalResult ramanujan_residual(real t, const EvalConfig& cfg = {});

/// int_0^t xi^{a-1} nu(t - xi, p) dxi - Gamma(a) nu(t, a + p).
EvalResult prop1_residual(real a, real p, real t, const EvalConfig& cfg = {});

/// (nu(., p) * e^gamma_{alpha,0}(lambda; .))(t) - sum_n (-lambda)^n (gamma)_n nu(t, alpha n + p) / n!.
/// The transform of e^gamma_{alpha,0} tends to 1 at infinity, so the
/// convolution includes the unit point mass at the origin: nu(t, p) + int nu(t - xi, p) e(xi) dxi.
EvalResult prop2a_residual(const VPArgs& args, real t, const EvalConfig& cfg = {});

/// int_0^t xi^{alpha-1} mu(t - xi, beta, alpha) dxi - Gamma(alpha) mu(t, beta, 2 alpha).
EvalResult prop5a_residual(real beta, real alpha, real t, const EvalConfig& cfg = {});

/// Central difference of order n of epsilon^gamma_{alpha,n} minus epsilon^gamma_{alpha,0}, relative.
EvalResult property_a_residual(const VPArgs& args, int n, real t, const EvalConfig& cfg = {});

/// (eps^g_p * eps^g'_p')(t) - (eps^{g+g'}_{p+p'} * nu)(t).
EvalResult property_b_residual(const VPArgs& first, const VPArgs& second, real t, const EvalConfig& cfg = {});

}  // namespace ultraslow
