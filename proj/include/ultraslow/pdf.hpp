#pragma once

#include "ultraslow/types.hpp"

namespace ultraslow {

enum class PdfRoute { IltOfClosedLaplace, Series };

struct PdfQuery {
    real x = 0;
    real t = 1;
    MemoryKernel kernel = MemoryKernel::distributed();
    PdfRoute route = PdfRoute::IltOfClosedLaplace;
    /// Series route: highest power of |x| tried before giving up.
    int series_max_order = 24;
    /// Series route: stop once two consecutive terms fall below this times the sum.
    real series_tol = 1e-9L;

    void validate() const;
};

/// p^(x, s) = sqrt(s k^(s)/B) exp(-|x| sqrt(s k^(s)/B)) / (2 s), real s above
/// max(abscissa, 0).
real pdf_laplace(real x, real s, const MemoryKernel& kernel);

/// Same on the complex plane (principal square root), for contour inversion.
cplx pdf_laplace(real x, cplx s, const MemoryKernel& kernel);

/// p(x, t).  IltOfClosedLaplace inverts pdf_laplace on a Talbot contour and
/// works for every kernel.  Series sums (-|x|/sqrt B)^r / r! L^{-1}[s^{b-1} k^b],
/// b = (r+1)/2, for the two distributed kernels only; RouteUnavailable when it
/// has not settled by series_max_order.
EvalResult pdf_eval(const PdfQuery& q, const EvalConfig& cfg = {});

/// r-th term of the k1 series:
///   (1/(2 sqrt B)) (-|x|/sqrt B)^r / (r! Gamma(b)) eps^{-b}_{1,b-1,-b}(t),  b = (r+1)/2,
/// the epsilon taken on the growing branch (lambda = -1).
EvalResult pdf_series_term(int r, real x, real t, real B = 1, const EvalConfig& cfg = {});

/// L^{-1}[s^{b-1} k2^(s)^b](t) for b = (r+1)/2: the k1 factor eps^{-b}_{1,b-1,-b}/Gamma(b)
/// with (1 + lambda s^-alpha)^{gamma b} expanded in powers of s^-alpha.
EvalResult pdf_series_factor_prabhakar(int r, real alpha, real gamma, real lambda, real t, const EvalConfig& cfg = {});

/// Same factor as the convolution of the k1 factor with e^{-gamma b}_{alpha,0}(lambda; .)
/// over (0, t), point mass included.  Only r = 0 and r = 1 converge: the k1
/// factor behaves like t^{-b} at the origin.
EvalResult pdf_series_factor_convolution(int r, real alpha, real gamma, real lambda, real t,
                                         const EvalConfig& cfg = {});

struct PdfMoments {
    real half_width = 0;
    real mass = 0;
    real second = 0;
    real fourth = 0;
};

/// Integrals of p, x^2 p, x^4 p over |x| <= width * sqrt(<x^2>), panels graded toward x = 0.
PdfMoments pdf_moments(const MemoryKernel& kernel, real t, real width = 8, const EvalConfig& cfg = {});

}  // namespace ultraslow
