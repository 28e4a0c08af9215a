#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ultraslow/types.hpp"

namespace ultraslow {

struct Singularities {
    bool branch_cut_negative_axis = true;
    /// (s - 1)/ln s style point at s = 1, patched by its Taylor series.
    bool removable_at_one = false;
    std::vector<cplx> poles;
};

/// A Laplace-domain object.  `eval` accepts complex s so that contour
/// methods can use the same definition as the real-axis samplers.
struct LaplaceFn {
    std::function<cplx(cplx)> eval;
    /// Real part of the rightmost non-removable singularity.
    real abscissa = 0;
    Singularities singularities;
    std::string name;

    /// Real-axis sample; SingularSample if s <= abscissa or the value is not finite.
    real operator()(real s) const;
    cplx operator()(cplx s) const { return eval(s); }
};

/// (s - 1)/ln s with the removable point s = 1 filled in.
cplx psi1(cplx s);

/// Numerical inverse Laplace transform of f at t.
EvalResult ilt(const LaplaceFn& f, real t, const IltConfig& cfg = {});

/// Gaver-Stehfest with n (even) terms, sampling F(shift + k ln2/t) and
/// multiplying by e^{shift t}.  abs_err is |f_n - f_{n-2}|.
EvalResult gaver_stehfest(const std::function<real(real)>& F, real t, int n, real shift = 0);

/// Fixed Talbot contour s = shift + r theta (cot theta + i), r = 2M/(5t).
/// abs_err compares against the same rule with `coarse_nodes` (default M/2).
EvalResult talbot_inversion(const std::function<cplx(cplx)>& F, real t, int nodes, real shift = 0,
                            int coarse_nodes = 0);

enum class LaplaceObject { Kernel, Partner, Psi };

/// k^(s), its Sonnine partner M^(s) = 1/(s k^(s)), or Psi^(s) = s k^(s).
LaplaceFn make_kernel_laplace(const MemoryKernel& kernel, LaplaceObject what = LaplaceObject::Kernel);

}  // namespace ultraslow
