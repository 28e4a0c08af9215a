#pragma once

#include <iosfwd>
#include <vector>

#include "ultraslow/types.hpp"

namespace ultraslow {

struct GridSpec {
    real x_half_width = 10;
    int nx = 401;  // odd, so that x = 0 is a node
    real t_final = 1;
    int nt = 2000;

    real dx() const { return 2 * x_half_width / (nx - 1); }
    real dt() const { return t_final / nt; }
    void validate() const;
};

enum class InitialCondition { DeltaApprox };

struct FdOptions {
    /// Keep every k-th time slice of the field (the first and last are always kept).
    int store_every = 1;
    /// Relative mass drift that aborts the run.
    real max_mass_drift = 0.01L;
};

struct FdSolution {
    GridSpec grid;
    std::vector<real> x;
    /// Times of the stored slices.
    std::vector<real> t;
    /// field[j][i] = p(x_i, t[j]).
    std::vector<std::vector<double>> field;
    /// Per time step (nt + 1 entries): sum_i p dx and sum_i x^2 p dx.
    std::vector<real> mass;
    std::vector<real> msd;
    real min_value = 0;
};

/// Explicit solver for p(x, t) = p0(x) + B int_0^t M(t - xi) p_xx(x, xi) dxi.
/// p_xx is held constant on each step, so the memory weights are
/// A_m = int_{(m-1)dt}^{m dt} M: the first (log-singular) panel by
/// tanh-sinh, the rest by the trapezoid rule on node values of M.
/// Centered second differences, p = 0 at +-x_half_width.  p0 is a normalized
/// triangle of base 3 dx.  Throws InstabilityDetected on mass drift above
/// options.max_mass_drift or a non-finite value.
FdSolution solve_fp_integral(const MemoryKernel& kernel, const GridSpec& grid,
                             InitialCondition init = InitialCondition::DeltaApprox, const FdOptions& options = {},
                             const EvalConfig& cfg = {});

/// Grid with x_half_width = 16 sqrt(<x^2(t_final)>) and nt chosen so that
/// dt M(dt) <= dx^2 / (4 B).  The scheme is observed to blow up near
/// dt M(dt) = 0.4 dx^2 / B; the wider box buys a coarser dx and so fewer steps.
GridSpec default_grid(const MemoryKernel& kernel, real t_final, int nx = 401, const EvalConfig& cfg = {});

/// One CSV row per stored slice: t, then p at every node.  The header row lists x.
void write_field_csv(const FdSolution& s, std::ostream& out);

}  // namespace ultraslow
