#include "ultraslow/fdoracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "ultraslow/kernels.hpp"
#include "ultraslow/moments.hpp"
#include "ultraslow/quadrature.hpp"

namespace ultraslow {

namespace {

real partner(const MemoryKernel& k, real t, const EvalConfig& cfg) {
    if (k.kind == KernelKind::DistributedOrder) return m1_time(t);
    return partner_time(k, t, cfg).value;
}

// A_m = int_{(m-1)dt}^{m dt} M, m = 1..nt
std::vector<real> memory_weights(const MemoryKernel& k, real dt, int nt, const EvalConfig& cfg) {
    std::vector<real> A(nt + 1, 0);
    A[1] = quad::tanh_sinh_split([&](real, real u, real) { return u > 0 ? partner(k, u, cfg) : 0; }, 0, dt,
                                 cfg.quad_tol)
               .value;
    real prev = partner(k, dt, cfg);
    for (int m = 2; m <= nt; ++m) {
        const real cur = partner(k, m * dt, cfg);
        A[m] = dt * (prev + cur) / 2;
        prev = cur;
    }
    return A;
}

}  // namespace

void GridSpec::validate() const {
    if (!(x_half_width > 0) || !std::isfinite(x_half_width)) throw DomainError("GridSpec: x_half_width must be > 0");
    if (nx < 5 || nx % 2 == 0) throw DomainError("GridSpec: nx must be odd and >= 5");
    if (!(t_final > 0) || !std::isfinite(t_final)) throw DomainError("GridSpec: t_final must be > 0");
    if (nt < 1) throw DomainError("GridSpec: nt must be >= 1");
}

FdSolution solve_fp_integral(const MemoryKernel& kernel, const GridSpec& grid, InitialCondition,
                             const FdOptions& options, const EvalConfig& cfg) {
    kernel.validate();
    grid.validate();
    if (options.store_every < 1) throw DomainError("FdOptions: store_every must be >= 1");
    const int nx = grid.nx, nt = grid.nt, mid = nx / 2;
    const real dx = grid.dx(), dt = grid.dt(), B = kernel.B;

    FdSolution s;
    s.grid = grid;
    s.x.resize(nx);
    for (int i = 0; i < nx; ++i) s.x[i] = (i - mid) * dx;

    // Triangle of base 3 dx: nodes -dx, 0, dx carry h/3, h, h/3 with (5/3) h dx = 1.
    std::vector<double> p0(nx, 0.0);
    const real h = 3 / (5 * dx);
    p0[mid] = double(h);
    p0[mid - 1] = p0[mid + 1] = double(h / 3);

    const auto A = memory_weights(kernel, dt, nt, cfg);
    // Lp[k] = centered second difference of p^k (zero at the Dirichlet ends)
    std::vector<std::vector<double>> Lp;
    Lp.reserve(nt);
    std::vector<double> p = p0, acc(nx);
    const double inv_dx2 = double(1 / (dx * dx));

    auto report = [&](const std::vector<double>& v) {
        real m = 0, q = 0;
        for (int i = 0; i < nx; ++i) {
            m += v[i];
            q += s.x[i] * s.x[i] * v[i];
            s.min_value = std::min<real>(s.min_value, v[i]);
        }
        s.mass.push_back(m * dx);
        s.msd.push_back(q * dx);
    };
    auto store = [&](int n, const std::vector<double>& v) {
        s.t.push_back(n * dt);
        s.field.push_back(v);
    };
    report(p);
    store(0, p);

    for (int n = 1; n <= nt; ++n) {
        std::vector<double> l(nx, 0.0);
        for (int i = 1; i < nx - 1; ++i) l[i] = (p[i - 1] - 2 * p[i] + p[i + 1]) * inv_dx2;
        Lp.push_back(std::move(l));
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int k = 0; k < n; ++k) {
            const double w = double(A[n - k]);
            const auto& lk = Lp[k];
            for (int i = 1; i < nx - 1; ++i) acc[i] += w * lk[i];
        }
        for (int i = 0; i < nx; ++i) p[i] = p0[i] + double(B) * acc[i];
        p.front() = p.back() = 0;
        report(p);
        const real drift = std::fabs(s.mass.back() - 1);
        if (!(drift <= options.max_mass_drift)) {
            std::ostringstream os;
            os << "solve_fp_integral: mass drift " << double(drift) << " at t = " << double(n * dt)
               << " (dt too large for dx?)";
            throw InstabilityDetected(os.str());
        }
        if (n % options.store_every == 0 || n == nt) store(n, p);
    }
    return s;
}

GridSpec default_grid(const MemoryKernel& kernel, real t_final, int nx, const EvalConfig& cfg) {
    kernel.validate();
    if (!(t_final > 0)) throw DomainError("default_grid: t_final must be > 0");
    real msd;
    try {
        msd = moment_even({kernel, 2, t_final, MomentRoute::ClosedForm}, cfg).value;
    } catch (const RouteUnavailable&) {
        msd = moment_even({kernel, 2, t_final, MomentRoute::IltOracle}, cfg).value;
    }
    GridSpec g;
    g.nx = nx;
    g.t_final = t_final;
    g.x_half_width = 16 * std::sqrt(msd);
    const real limit = g.dx() * g.dx() / (4 * kernel.B);
    // dt M(dt) grows with dt; bisect in log dt.
    real lo = t_final * 1e-9L, hi = t_final;
    for (int it = 0; it < 80; ++it) {
        const real mid = std::sqrt(lo * hi);
        (mid * partner(kernel, mid, cfg) <= limit ? lo : hi) = mid;
    }
    g.nt = int(std::ceil(t_final / lo));
    return g;
}

void write_field_csv(const FdSolution& s, std::ostream& out) {
    out << "t";
    for (real x : s.x) out << ',' << double(x);
    out << '\n';
    out.precision(12);
    for (std::size_t j = 0; j < s.t.size(); ++j) {
        out << double(s.t[j]);
        for (double v : s.field[j]) out << ',' << v;
        out << '\n';
    }
}

}  // namespace ultraslow
