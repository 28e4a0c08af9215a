#pragma once

#include <functional>
#include <vector>

#include "ultraslow/types.hpp"

// Thin façade over Boost.Math's double-exponential and Gauss-Kronrod
// integrators.  Every routine returns the estimate together with the
// integrator's own error estimate and converts Boost exceptions into
// QuadratureFailure.

namespace ultraslow::quad {

struct QuadResult {
    real value = 0;
    real abs_err = 0;
    real l1 = 0;
};

using Integrand = std::function<real(real)>;
/// Integrand that also receives the exact distances to both endpoints,
/// f(x, x - a, b - x), so that endpoint singularities can be evaluated
/// without cancellation.
using SplitIntegrand = std::function<real(real, real, real)>;

/// tanh-sinh on [a, b]; tolerates integrable endpoint singularities.
QuadResult tanh_sinh(const Integrand& f, real a, real b, real tol);

/// tanh-sinh on [a, b] with endpoint distances passed to the integrand.
QuadResult tanh_sinh_split(const SplitIntegrand& f, real a, real b, real tol);

/// Adaptive 31-point Gauss-Kronrod on [a, b] for smooth integrands.
QuadResult gauss_kronrod(const Integrand& f, real a, real b, real tol, int max_depth = 18);

/// Adaptive Gauss-Kronrod over consecutive panels [p0,p1], [p1,p2], ...
QuadResult gauss_kronrod_panels(const Integrand& f, const std::vector<real>& breaks, real tol);

/// exp-sinh on [a, +inf).
QuadResult exp_sinh(const Integrand& f, real a, real tol);

/// sinh-sinh on (-inf, +inf).
QuadResult sinh_sinh(const Integrand& f, real tol);

/// Integral over r in (0, inf) of g(ln r) / (r (pi^2 + ln^2 r)) dr.
/// Mapped through ln r = pi tan(theta) the logarithmic Cauchy weight becomes
/// the constant 1/pi on (-pi/2, pi/2); `g` receives x = ln r.  `focus_x`
/// adds a panel break where g changes fastest (e.g. x = -ln t for e^{-rt}).
QuadResult log_cauchy(const Integrand& g, real tol, real focus_x = std::numeric_limits<real>::quiet_NaN());

}  // namespace ultraslow::quad
