#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ultraslow/types.hpp"

namespace ultraslow {

using RealFn = std::function<real(real)>;

enum class CmVerdict { ConsistentWithCM, ViolationFound };

struct CmViolation {
    real point = 0;
    int order = 0;
    /// The quantity that should be >= 0, e.g. (-1)^n f^(n)(point).
    real value = 0;
    /// Noise plus truncation allowance it was compared against (on top of tol).
    real floor = 0;
};

struct CmReport {
    std::string id;
    /// "cm", "log-convex" or "bernstein".
    std::string test;
    real a = 0, b = 0;
    std::vector<real> grid;
    int max_order_checked = 0;
    real tol = 0;
    /// Largest allowance used anywhere, relative to the derivative it guarded.
    real noise_floor = 0;
    std::vector<CmViolation> violations;
    CmVerdict verdict = CmVerdict::ConsistentWithCM;
    std::string note;

    bool passed() const { return verdict == CmVerdict::ConsistentWithCM; }
    /// Violations at order <= n only.
    bool passed_to(int n) const;
};

struct CmOptions {
    std::string id = "f";
    int points = 24;
    /// Relative accuracy of one evaluation of f; sets the noise floor of the differences.
    real eval_rel_err = 1e-15L;
};

/// (-1)^n f^(n) >= -tol for n = 0..max_order at Chebyshev points of (a, b).
/// Derivatives are central differences with h = max(1e-2 s, 1e-3), Richardson
/// extrapolated from h and h/2.  Evaluation errors from f propagate.
CmReport check_cm(const RealFn& f, real a, real b, int max_order = 4, real tol = 1e-10L, const CmOptions& opt = {});

/// ln f(m) <= (ln f(m - d) + ln f(m + d))/2 + tol on the nested dyadic triples
/// of [a, b], 2^levels panels at the finest.  DomainError where f <= 0.
CmReport check_log_convex(const RealFn& f, real a, real b, real tol = 1e-10L, int levels = 6,
                          const CmOptions& opt = {});

/// f >= -tol on the grid and f' passes check_cm up to order max_order - 1.
CmReport check_bernstein(const RealFn& f, real a, real b, int max_order = 4, real tol = 1e-10L,
                         const CmOptions& opt = {});

std::string to_json(const CmReport& r, int indent = 2);
const char* to_string(CmVerdict v);

}  // namespace ultraslow
