#include "ultraslow/cmcheck.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "json.hpp"

namespace ultraslow {

namespace {

constexpr int kMaxOrder = 6;

void check_interval(real a, real b, const char* who) {
    if (!(a > 0) || !(b > a) || !std::isfinite(b)) throw DomainError(std::string(who) + ": need 0 < a < b < inf");
}

std::vector<real> chebyshev_points(real a, real b, int n) {
    std::vector<real> x(n);
    for (int j = 0; j < n; ++j)
        x[j] = (a + b) / 2 - (b - a) / 2 * std::cos(std::numbers::pi_v<real> * (2 * j + 1) / (2 * n));
    return x;
}

class Cached {
public:
    explicit Cached(const RealFn& f) : f_(f) {}
    real operator()(real x) {
        auto it = memo_.find(x);
        if (it != memo_.end()) return it->second;
        const real v = f_(x);
        memo_.emplace(x, v);
        return v;
    }

private:
    const RealFn& f_;
    std::map<real, real> memo_;
};

struct Derivative {
    real value = 0;
    real floor = 0;  // noise + truncation
    real lo = 0, hi = 0;  // stencil extent
};

// n-th central difference over h, nodes s + (k - n/2) h
real central(Cached& f, real s, int n, real h, real& fmax) {
    real sum = 0, c = 1;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) c *= -real(n - k + 1) / k;
        const real v = f(s + (k - real(n) / 2) * h);
        fmax = std::max(fmax, std::fabs(v));
        sum += ((n % 2) ? -c : c) * v;  // (-1)^{n-k} binom(n, k)
    }
    return sum / std::pow(h, n);
}

Derivative derivative(Cached& f, real s, int n, real eps) {
    const real h = std::max<real>(1e-2L * s, 1e-3L);
    Derivative d;
    d.lo = s - n * h / 2;
    d.hi = s + n * h / 2;
    if (n == 0) {
        d.value = f(s);
        d.floor = eps * std::fabs(d.value);
        return d;
    }
    real fmax = 0;
    const real d1 = central(f, s, n, h, fmax), d2 = central(f, s, n, h / 2, fmax);
    d.value = (4 * d2 - d1) / 3;
    // 2^n |f| eps / h^n per difference, the h/2 one weighted 4/3 and 2^n times larger
    const real noise = std::ldexp(eps * fmax, n) / std::pow(h, n) * (4 * std::ldexp(real(1), n) + 1) / 3;
    d.floor = noise + std::fabs(d2 - d1) / 3;
    return d;
}

// shared driver: sign_offset 0 checks (-1)^n f^(n), 1 checks (-1)^{n-1} f^(n) for n >= 1
CmReport alternation(const RealFn& fn, real a, real b, int max_order, real tol, const CmOptions& opt, int sign_offset,
                     const char* who) {
    check_interval(a, b, who);
    if (max_order < 0 || max_order > kMaxOrder) throw DomainError(std::string(who) + ": max_order must be in [0, 6]");
    if (opt.points < 2) throw DomainError(std::string(who) + ": need at least 2 points");
    if (!(tol >= 0)) throw DomainError(std::string(who) + ": tol must be >= 0");
    Cached f(fn);
    CmReport r;
    r.id = opt.id;
    r.a = a;
    r.b = b;
    r.tol = tol;
    r.max_order_checked = max_order;
    r.grid = chebyshev_points(a, b, opt.points);
    int outside = 0;
    for (real s : r.grid) {
        for (int n = 0; n <= max_order; ++n) {
            const auto d = derivative(f, s, n, opt.eval_rel_err);
            if (d.lo < a || d.hi > b) ++outside;
            const int sign_power = n == 0 ? 0 : n - sign_offset;
            const real v = (sign_power % 2) ? -d.value : d.value;
            if (d.value != 0) r.noise_floor = std::max(r.noise_floor, d.floor / std::fabs(d.value));
            if (v < -(tol + d.floor)) r.violations.push_back({s, n, v, d.floor});
        }
    }
    r.verdict = r.violations.empty() ? CmVerdict::ConsistentWithCM : CmVerdict::ViolationFound;
    r.note = "finite-difference sampling: a pass is evidence, not proof";
    if (outside > 0)
        r.note += "; " + std::to_string(outside) + " stencils reach outside [a, b], so behaviour at the ends is not"
                  " resolved";
    return r;
}

}  // namespace

bool CmReport::passed_to(int n) const {
    return std::none_of(violations.begin(), violations.end(), [n](const CmViolation& v) { return v.order <= n; });
}

CmReport check_cm(const RealFn& f, real a, real b, int max_order, real tol, const CmOptions& opt) {
    auto r = alternation(f, a, b, max_order, tol, opt, 0, "check_cm");
    r.test = "cm";
    return r;
}

CmReport check_bernstein(const RealFn& f, real a, real b, int max_order, real tol, const CmOptions& opt) {
    if (max_order < 1) throw DomainError("check_bernstein: max_order must be >= 1");
    auto r = alternation(f, a, b, max_order, tol, opt, 1, "check_bernstein");
    r.test = "bernstein";
    r.note += "; positivity and CM of f' are necessary for the complete Bernstein class, not sufficient";
    return r;
}

CmReport check_log_convex(const RealFn& fn, real a, real b, real tol, int levels, const CmOptions& opt) {
    check_interval(a, b, "check_log_convex");
    if (levels < 1 || levels > 16) throw DomainError("check_log_convex: levels must be in [1, 16]");
    Cached f(fn);
    auto lnf = [&](real x) {
        const real v = f(x);
        if (!(v > 0)) throw DomainError("check_log_convex: f <= 0 at t = " + std::to_string(double(x)));
        return std::log(v);
    };
    CmReport r;
    r.id = opt.id;
    r.test = "log-convex";
    r.a = a;
    r.b = b;
    r.tol = tol;
    r.max_order_checked = 2;
    const int n = 1 << levels;
    for (int i = 0; i <= n; ++i) r.grid.push_back(a + (b - a) * i / n);
    for (int l = 1; l <= levels; ++l) {
        const int stride = n >> l;
        for (int i = stride; i + stride <= n; i += stride) {
            const real m = r.grid[i], lo = r.grid[i - stride], hi = r.grid[i + stride];
            const real noise = 2 * opt.eval_rel_err;
            const real gap = (lnf(lo) + lnf(hi)) / 2 - lnf(m);
            r.noise_floor = std::max(r.noise_floor, noise);
            if (gap < -(tol + noise)) r.violations.push_back({m, 2, gap, noise});
        }
    }
    r.verdict = r.violations.empty() ? CmVerdict::ConsistentWithCM : CmVerdict::ViolationFound;
    r.note = "midpoint test on dyadic triples: a pass is evidence, not proof";
    return r;
}

const char* to_string(CmVerdict v) {
    return v == CmVerdict::ConsistentWithCM ? "ConsistentWithCM" : "ViolationFound";
}

std::string to_json(const CmReport& r, int indent) {
    nlohmann::json j;
    j["id"] = r.id;
    j["test"] = r.test;
    j["interval"] = {double(r.a), double(r.b)};
    std::vector<double> g(r.grid.begin(), r.grid.end());
    j["grid"] = g;
    j["max_order_checked"] = r.max_order_checked;
    j["tol"] = double(r.tol);
    j["noise_floor"] = double(r.noise_floor);
    j["violations"] = nlohmann::json::array();
    for (const auto& v : r.violations)
        j["violations"].push_back(
            {{"point", double(v.point)}, {"order", v.order}, {"value", double(v.value)}, {"floor", double(v.floor)}});
    j["verdict"] = to_string(r.verdict);
    j["note"] = r.note;
    return j.dump(indent);
}

}  // namespace ultraslow
