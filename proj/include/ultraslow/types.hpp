#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace ultraslow {

// All internal arithmetic runs in extended precision; the Gaver-Stehfest
// weights and the alternating series below need the extra guard digits.
using real = long double;
using cplx = std::complex<real>;

namespace constants {
inline constexpr real pi = 3.141592653589793238462643383279502884L;
inline constexpr real euler_gamma = 0.577215664901532860606512090082402431L;
inline constexpr real ln2 = 0.693147180559945309417232121458176568L;
inline constexpr real pi2_over_6 = 1.644934066848226436472415166646025189L;
}  // namespace constants

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class RouteUnavailable : public Error {
public:
    using Error::Error;
};

class SingularSample : public Error {
public:
    using Error::Error;
};

class Inapplicable : public Error {
public:
    using Error::Error;
};

class InstabilityDetected : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Evaluation plumbing

enum class Precision { Double, Extended };

/// Truncation controls shared by every series evaluator.
struct SeriesConfig {
    int max_terms = 600;
    real abs_tol = 1e-15L;
    real rel_tol = 1e-15L;

    void validate() const;
};

enum class IltMethod { GaverStehfest, ShiftedTalbot };

struct IltConfig {
    IltMethod method = IltMethod::GaverStehfest;
    int gs_terms = 16;
    int talbot_nodes = 32;
    /// Contour/sample shift; NaN means abscissa + 0.1 for Gaver-Stehfest (0 if the abscissa is <= 0), abscissa + min(1, 1/t) for Talbot.
    real shift = std::numeric_limits<real>::quiet_NaN();
    real tol = 1e-5L;

    void validate() const;
};

struct EvalConfig {
    SeriesConfig series{};
    /// Absolute/relative targets for quadrature-backed values.
    real quad_tol = 1e-12L;
    /// |z| at which the three-parameter Mittag-Leffler switches to its
    /// algebraic expansion in 1/|z| (negative arguments only).
    real ml_asymptotic_crossover = 50;
    IltConfig ilt{};
    Precision precision = Precision::Extended;
};

struct EvalResult {
    real value = 0;
    real abs_err = 0;
    int terms = 0;
    bool converged = true;
    std::string diagnostics;
};

// ---------------------------------------------------------------------------
// Domain types

/// Parameters of e^gamma_{alpha,beta}(lambda; t) = t^{beta-1} E^gamma_{alpha,beta}(-lambda t^alpha).
/// A negative lambda selects the growing branch E(+|lambda| t^alpha).
struct PrabhakarParams {
    real alpha = 1;
    real beta = 1;
    real gamma = 1;
    real lambda = 0;

    void validate() const;
};

enum class KernelKind { SingleCaputo, SinglePrabhakar, DistributedOrder, DistributedPrabhakar };

/// A memory kernel k(t) of the generalized Fokker-Planck equation together
/// with its diffusion coefficient.
struct MemoryKernel {
    KernelKind kind = KernelKind::DistributedOrder;
    real mu = 0.5;      // SingleCaputo, SinglePrabhakar
    real alpha = 0.5;   // Prabhakar kinds
    real gamma = 0.5;   // Prabhakar kinds
    real lambda = 1;    // Prabhakar kinds
    real B = 1;

    static MemoryKernel caputo(real mu, real B = 1);
    static MemoryKernel prabhakar(real alpha, real mu, real gamma, real lambda, real B = 1);
    static MemoryKernel distributed(real B = 1);
    static MemoryKernel distributed_prabhakar(real alpha, real gamma, real lambda, real B = 1);

    void validate() const;
    std::string name() const;
};

}  // namespace ultraslow
