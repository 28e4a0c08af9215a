// One PASS/FAIL line per acceptance criterion.  Two sub-checks cannot hold
// as stated (the spectral density of the (0.4, 3) family changes sign); they
// are still evaluated and their criteria print FAIL, but only failures outside
// that pair set the exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/expint.hpp>

#include "ultraslow/cmcheck.hpp"
#include "ultraslow/fdoracle.hpp"
#include "ultraslow/kernels.hpp"
#include "ultraslow/lapinv.hpp"
#include "ultraslow/moments.hpp"
#include "ultraslow/pdf.hpp"
#include "ultraslow/quadrature.hpp"
#include "ultraslow/specfun.hpp"
#include "ultraslow/volterra.hpp"

using namespace ultraslow;

namespace {

const MemoryKernel K1 = MemoryKernel::distributed();
const MemoryKernel K2 = MemoryKernel::distributed_prabhakar(0.5L, 0.5L, 1);
constexpr real C = std::numbers::egamma_v<real>;
constexpr real pi = std::numbers::pi_v<real>;

// density sign change at (0.4, 3); see the notes on positivity of K~
const std::set<std::string> known_unattainable{"positivity (0.4,3)", "e^t/8-eps(0.4,3)"};

struct Outcome {
    bool pass = true;
    std::vector<std::string> failed;
    std::ostringstream detail;

    void need(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            failed.push_back(what);
            detail << " [failed: " << what << "]";
        }
    }
    bool expected() const {
        return !failed.empty() && std::all_of(failed.begin(), failed.end(),
                                              [](const std::string& f) { return known_unattainable.count(f) > 0; });
    }
};

std::string sci(real v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2e", double(v));
    return b;
}

real rel(real a, real b) { return std::fabs(a - b) / std::fabs(b); }

std::vector<real> log_grid(real a, real b, int n) {
    std::vector<real> g(n);
    for (int i = 0; i < n; ++i) g[i] = a * std::pow(b / a, real(i) / (n - 1));
    return g;
}

VPArgs vp(real alpha, real gamma, real lambda, real p) {
    VPArgs a;
    a.params.alpha = alpha;
    a.params.gamma = gamma;
    a.params.lambda = lambda;
    a.p = p;
    return a;
}

// ---------------------------------------------------------------------------

void c1(Outcome& o) {
    for (const auto* k : {&K1, &K2}) {
        real worst = 0;
        for (real t : log_grid(1e-2L, 10, 20)) worst = std::max(worst, sonnine_residual(*k, t));
        o.detail << ' ' << k->name() << " max |k*M - 1| = " << sci(worst) << ';';
        o.need(worst < 1e-5L, k->name());
    }
}

void c2(Outcome& o) {
    // r = e^u; the integrand in u is 1/(pi^2 + u^2), integrated over the line and as twice the half line
    const real full = quad::sinh_sinh([](real u) { return 1 / (pi * pi + u * u); }, 1e-15L).value;
    const real half = 2 * quad::exp_sinh([](real u) { return 1 / (pi * pi + u * u); }, 0, 1e-15L).value;
    o.detail << " |I - 1| = " << sci(std::fabs(full - 1)) << " (line), " << sci(std::fabs(half - 1)) << " (half line)";
    o.need(std::fabs(full - 1) < 1e-8L && std::fabs(half - 1) < 1e-8L, "integral");
}

void c3(Outcome& o) {
    for (auto [a, g] : {std::pair{0.4L, 2.0L}, {0.4L, 3.0L}, {0.3L, 3.0L}}) {
        const real p = a * g, scale = std::pow(real(2), g);
        const real mass = scale * spectral_laplace(a, g, p, 0).value;
        // independent: the complex-arithmetic density; the 1/(r ln^2 r) tails go through the log-Cauchy map
        const real mass2 = scale * quad::log_cauchy(
                                       [&](real x) {
                                           // the weight is flat in the mapped variable; clamp before r under/overflows
                                           x = std::clamp<real>(x, -11000, 11000);
                                           const real r = std::exp(x);
                                           return -spectral_kernel_complex(a, g, p, r) * r * (pi * pi + x * x);
                                       },
                                       1e-13L)
                                       .value;
        int negative = 0;
        real first_negative = 0;
        for (real r : log_grid(1e-3L, 1e3L, 200)) {
            if (-spectral_kernel(a, g, p, r) < 0) {
                if (negative++ == 0) first_negative = r;
            }
        }
        o.detail << " (" << double(a) << "," << double(g) << "): |mass - 1| = " << sci(std::fabs(mass - 1)) << " / "
                 << sci(std::fabs(mass2 - 1)) << ", negative samples " << negative << "/200";
        if (negative) o.detail << " from r = " << sci(first_negative);
        o.detail << ';';
        std::ostringstream tag;
        tag << '(' << double(a) << ',' << double(g) << ')';
        o.need(std::fabs(mass - 1) < 1e-6L && std::fabs(mass2 - 1) < 1e-6L, "normalization " + tag.str());
        o.need(negative == 0, "positivity " + tag.str());
    }
}

void c4(Outcome& o) {
    IltConfig ic;
    ic.method = IltMethod::ShiftedTalbot;
    real worst = 0;
    for (real t : {0.5L, 1.0L, 2.0L}) {
        const real ref = nu(t, -1).value - nu(t).value;
        worst = std::max(worst, rel(ilt(make_kernel_laplace(K1), t, ic).value, ref));
    }
    o.detail << " k1: max rel " << sci(worst) << ';';
    o.need(worst < 1e-5L, "k1 round trip");
    worst = 0;
    for (const auto& a : {vp(0.5L, 0.5L, 1, 0), vp(0.4L, 0.8L, 1, 0), vp(0.7L, 1.2L, 0.6L, 0.3L)}) {
        const real al = a.params.alpha, ga = a.params.gamma, la = a.params.lambda, p = a.p;
        auto F = [=](cplx s) {
            return std::pow(s, cplx(al * ga - p - 1)) / (std::pow(std::pow(s, cplx(al)) + la, cplx(ga)) * std::log(s));
        };
        const real t = 1;
        worst = std::max(worst, std::fabs(talbot_inversion(F, t, 32, 2).value - vp_epsilon(a, t).value));
    }
    o.detail << " epsilon: max |diff| " << sci(worst);
    o.need(worst < 1e-4L, "epsilon round trip");
}

void c5(Outcome& o) {
    real worst = 0;
    for (real t : {0.1L, 0.5L, 1.0L, 2.0L, 5.0L})
        worst = std::max(worst, rel(msd1(t), moment_even({K1, 2, t, MomentRoute::QuadratureOracle}).value));
    o.detail << " vs 2B int M1: " << sci(worst) << ';';
    o.need(worst < 1e-8L, "msd1 vs quadrature");
    const real e = std::numbers::e_v<real>;
    const real a = 2 * (C - e * exp_integral_ei(-1)), b = 2 * (C - e * boost::math::expint(real(-1)));
    o.detail << " msd1(1) vs two Ei: " << sci(std::fabs(msd1(1) - a)) << ", " << sci(std::fabs(msd1(1) - b)) << ';';
    o.need(std::fabs(msd1(1) - a) < 1e-9L && std::fabs(msd1(1) - b) < 1e-9L, "msd1(1)");
    const real small = msd1(1e-4L) / (2 * 1e-4L * std::log(1e4L)), large = msd1(1e6L) / (2 * std::log(1e6L));
    o.detail << " ratios " << double(small) << " (t=1e-4), " << double(large) << " (t=1e6)";
    o.need(std::fabs(small - 1) <= 0.05L && std::fabs(large - 1) <= 0.05L, "Tauberian ratios");
}

void c6(Outcome& o) {
    real worst = 0;
    for (int i = 0; i < 8; ++i) {
        const real t = 0.1L + 1.9L * i / 7;
        worst = std::max(worst, rel(msd2(0.5L, 0.5L, 1, t).value,
                                    msd2(0.5L, 0.5L, 1, t, 1, Msd2Route::QuadratureOracle).value));
    }
    const real ratio = msd2(0.5L, 0.5L, 1, 1e-4L).value / (2 * 1e-4L * std::log(1e4L));
    o.detail << " series vs quadrature max rel " << sci(worst) << " on [0.1, 2]; ratio at t=1e-4 " << double(ratio);
    o.need(worst < 1e-4L, "series vs quadrature");
    o.need(std::fabs(ratio - 1) <= 0.05L, "short-time ratio");
}

void c7(Outcome& o) {
    real worst = 0;
    for (real a : {0.5L, 1.0L, 1.5L})
        for (real t : {0.5L, 1.0L, 3.0L}) {
            PrabhakarParams pp{1, 1 + a, 1, -1};
            const real q =
                quad::tanh_sinh([&](real u) { return u > 0 ? std::log(u) * prabhakar_e(pp, u).value : 0; }, 0, t, 1e-14L)
                    .value;
            worst = std::max(worst, std::fabs(prabhakar_log_integral(a, t).value - q));
        }
    o.detail << " max residual " << sci(worst);
    o.need(worst < 1e-8L, "residual");
}

void c8(Outcome& o) {
    real worst = 0;
    for (real t : {0.5L, 1.0L, 2.0L, 3.0L}) {
        const real q = quad::tanh_sinh(
                           [&](real xi) {
                               return xi > 0 && xi < t ? std::exp(xi) * exp_integral_ei(-xi) * std::log(t - xi) : 0;
                           },
                           0, t, 1e-14L)
                           .value;
        worst = std::max(worst, std::fabs(conv_ei_log(t).value - q));
    }
    o.detail << " general vs quadrature " << sci(worst) << ';';
    o.need(worst < 1e-6L, "general vs quadrature");
    worst = 0;
    for (real t : {0.25L, 0.5L, 0.9L})
        worst = std::max(worst, std::fabs(conv_ei_log(t).value - conv_ei_log(t, ConvRegime::SmallT).value));
    o.detail << " general vs small-t " << sci(worst);
    o.need(worst < 1e-6L, "general vs small-t");
}

void c9(Outcome& o) {
    real worst = 0;
    bool finite = true, symmetric = true;
    for (real t : {0.5L, 1.0L, 2.0L}) {
        // 12 B int_0^t M(xi) <x^2(t - xi)> dxi; the log singularity of M at 0 and of msd at t are split off
        const real q = 12 * quad::tanh_sinh_split(
                                [](real, real xi, real rest) { return xi > 0 && rest > 0 ? m1_time(xi) * msd1(rest) : 0; },
                                0, t, 1e-14L)
                                .value;
        worst = std::max(worst, rel(fourth_moment_1(t).value, q));
        const auto k = kurtosis(K1, t);
        finite = finite && std::isfinite(k.kurtosis.value);
        symmetric = symmetric && k.skewness == 0;
    }
    o.detail << " closed vs quadrature max rel " << sci(worst) << "; kurtosis(1) = " << double(kurtosis(K1, 1).kurtosis.value);
    o.need(worst < 1e-5L, "fourth moment");
    o.need(finite, "kurtosis finite");
    o.need(symmetric, "skewness zero");
}

void c10(Outcome& o) {
    real mass = 0, second = 0, low = 0;
    for (const auto* k : {&K1, &K2})
        for (real t : {0.5L, 1.0L, 2.0L}) {
            const auto m = pdf_moments(*k, t);
            mass = std::max(mass, std::fabs(m.mass - 1));
            second = std::max(second, rel(m.second, moment_even({*k, 2, t}).value));
            for (int i = 0; i <= 40; ++i) low = std::min(low, pdf_eval({m.half_width * i / 40, t, *k}).value);
        }
    const real series = std::fabs(pdf_eval({0.5L, 1, K1, PdfRoute::Series}).value - pdf_eval({0.5L, 1, K1}).value);
    o.detail << " |mass - 1| " << sci(mass) << ", msd rel " << sci(second) << ", series vs ilt " << sci(series)
             << ", min p " << sci(low);
    o.need(mass < 1e-4L, "normalization");
    o.need(second < 1e-3L, "second moment");
    o.need(series < 1e-3L, "series vs ilt");
    o.need(low > -1e-6L, "non-negativity");
}

void c11(Outcome& o) {
    GridSpec g;
    g.x_half_width = 25;
    g.nx = 401;
    g.t_final = 1;
    g.nt = 2000;
    FdOptions opt;
    opt.store_every = g.nt;
    const auto a = solve_fp_integral(K1, g, InitialCondition::DeltaApprox, opt);
    const auto b = solve_fp_integral(K2, g, InitialCondition::DeltaApprox, opt);
    real drift = 0;
    for (const auto* s : {&a, &b})
        for (real m : s->mass) drift = std::max(drift, std::fabs(m - 1));
    const real e1 = rel(a.msd.back(), msd1(1));
    const real e2 = rel(b.msd.back(), msd2(0.5L, 0.5L, 1, 1, 1, Msd2Route::QuadratureOracle).value);
    o.detail << " k1 msd rel " << sci(e1) << ", k2 msd rel " << sci(e2) << ", mass drift " << sci(drift);
    o.need(e1 < 0.02L, "k1 msd");
    o.need(e2 < 0.03L, "k2 msd");
    o.need(drift < 1e-3L, "mass");
}

void c12(Outcome& o) {
    const auto eps = vp(0.4L, 3, 1, 1.2L);
    struct Case {
        std::string name;
        RealFn f;
        real a, b, err;
        bool expect_cm;
    };
    const std::vector<Case> cases{
        {"k1", [](real t) { return k1_time(t).value; }, 0.1L, 5, 1e-15L, true},
        {"k2", [](real t) { return k2_time(0.5L, 0.5L, 1, t).value; }, 0.1L, 5, 1e-15L, true},
        {"M1", [](real t) { return m1_time(t); }, 0.1L, 5, 1e-15L, true},
        {"e^t-nu", [](real t) { return std::exp(t) - nu(t).value; }, 0.05L, 3, 1e-13L, true},
        {"e^t/8-eps(0.4,3)", [&](real t) { return std::exp(t) / 8 - vp_epsilon(eps, t, VPRoute::NuSeries).value; }, 0.1L,
         3, 1e-13L, true},
        {"control 1/(1+t^2)", [](real t) { return 1 / (1 + t * t); }, 0.1L, 5, 1e-15L, false},
    };
    for (const auto& c : cases) {
        CmOptions opt;
        opt.id = c.name;
        opt.eval_rel_err = c.err;
        const auto r = check_cm(c.f, c.a, c.b, 4, 1e-10L, opt);
        o.detail << ' ' << c.name << ": " << to_string(r.verdict);
        if (!r.passed()) o.detail << " (first at t=" << double(r.violations.front().point) << ", order "
                                   << r.violations.front().order << ")";
        o.detail << ';';
        o.need(r.passed() == c.expect_cm, c.name);
    }
}

void c13(Outcome& o) {
    struct Item {
        std::string name;
        std::function<real()> f;
        real limit;
    };
    const std::vector<Item> items{
        {"Prop1", [] { return prop1_residual(0.5L, 0, 1).value; }, 1e-6L},
        {"Prop2a", [] { return prop2a_residual(vp(0.5L, 0.5L, 1, 0), 1).value; }, 1e-6L},
        {"Prop2b", [] {
             const auto a = vp(0.7L, 1.2L, 0.6L, 0.3L);
             return vp_epsilon(a, 1, VPRoute::NuSeries).value - vp_epsilon(a, 1, VPRoute::UIntegral).value;
         }, 1e-8L},
        {"Prop5a", [] { return prop5a_residual(0.5L, 0.5L, 1).value; }, 1e-6L},
        {"A n=1", [] { return property_a_residual(vp(0.6L, 0.8L, 1, 0), 1, 1).value; }, 1e-3L},
        {"A n=2", [] { return property_a_residual(vp(0.6L, 0.8L, 1, 0), 2, 1).value; }, 1e-3L},
        {"B", [] { return property_b_residual(vp(0.5L, 0.6L, 1, 0.3L), vp(0.5L, 0.9L, 1, 0.5L), 1).value; }, 1e-5L},
    };
    for (const auto& it : items) {
        const real v = std::fabs(it.f());
        o.detail << ' ' << it.name << ' ' << sci(v) << ';';
        o.need(v < it.limit, it.name);
    }
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"Sonnine identity", c1},
        {"Ramanujan integral", c2},
        {"spectral normalization and positivity", c3},
        {"Laplace round trips", c4},
        {"MSD closed form, distributed kernel", c5},
        {"MSD, distributed Prabhakar kernel", c6},
        {"log-integral identity", c7},
        {"Ei-ln convolution", c8},
        {"fourth moment and kurtosis", c9},
        {"PDF", c10},
        {"finite-difference oracle", c11},
        {"CM suite", c12},
        {"identity suite", c13},
    };
    int unexpected = 0, passed = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = int(i + 1);
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.need(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d: %s  %s:%s (%.1fs)\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.str().c_str(), secs);
        std::fflush(stdout);
        if (o.pass)
            ++passed;
        else if (!o.expected())
            ++unexpected;
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("summary: %d/%zu PASS; the (0.4, 3) positivity and CM sub-checks are expected to fail (sign change "
                "of its spectral density); %d unexpected failure(s); %.1fs\n",
                passed, criteria.size(), unexpected, total);
    return unexpected == 0 ? 0 : 1;
}
