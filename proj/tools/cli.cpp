#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "ultraslow/cmcheck.hpp"
#include "ultraslow/fdoracle.hpp"
#include "ultraslow/kernels.hpp"
#include "ultraslow/lapinv.hpp"
#include "ultraslow/moments.hpp"
#include "ultraslow/pdf.hpp"
#include "ultraslow/quadrature.hpp"
#include "ultraslow/specfun.hpp"
#include "ultraslow/volterra.hpp"

namespace ultraslow::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// -------------------------------------------------------------------------
// output

void put(std::ostream& out, real v) {
    if (std::isnan(v))
        out << "nan";
    else
        out << std::setprecision(17) << v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Mapping {
    real lo, hi;
    bool log;
    real operator()(real v, real px0, real px1) const {
        const real a = log ? std::log10(lo) : lo, b = log ? std::log10(hi) : hi, x = log ? std::log10(v) : v;
        return b == a ? (px0 + px1) / 2 : px0 + (x - a) / (b - a) * (px1 - px0);
    }
};

Mapping range_of(const Table& t, std::size_t first, std::size_t last, bool log) {
    real lo = std::numeric_limits<real>::infinity(), hi = -lo;
    for (const auto& row : t.rows)
        for (std::size_t c = first; c < last && c < row.size(); ++c) {
            const real v = row[c];
            if (!std::isfinite(v) || (log && !(v > 0))) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!(lo <= hi)) lo = hi = 1;
    return {lo, hi, log};
}

// -------------------------------------------------------------------------
// flags

struct KernelFlags {
    std::string kind = "k1";
    double alpha = 0.5, gamma = 0.5, lambda = 1, mu = 0.5, B = 1;

    void add(CLI::App* app) {
        app->add_option("--kernel", kind, "k1 | k2 | caputo | prabhakar")
            ->check(CLI::IsMember({"k1", "k2", "caputo", "prabhakar"}))
            ->capture_default_str();
        app->add_option("--alpha", alpha, "Prabhakar alpha")->capture_default_str();
        app->add_option("--gamma", gamma, "Prabhakar gamma")->capture_default_str();
        app->add_option("--lambda", lambda, "Prabhakar lambda")->capture_default_str();
        app->add_option("--mu", mu, "order of the single-order kernels")->capture_default_str();
        app->add_option("--B", B, "diffusion coefficient")->capture_default_str();
    }
    MemoryKernel build() const {
        MemoryKernel k;
        if (kind == "k1") k = MemoryKernel::distributed(B);
        if (kind == "k2") k = MemoryKernel::distributed_prabhakar(alpha, gamma, lambda, B);
        if (kind == "caputo") k = MemoryKernel::caputo(mu, B);
        if (kind == "prabhakar") k = MemoryKernel::prabhakar(alpha, mu, gamma, lambda, B);
        k.validate();
        return k;
    }
};

struct GridFlags {
    std::string name;
    std::vector<double> values;
    double lo = kNaN, hi = kNaN;
    int n = 50;
    bool log = false;

    void add(CLI::App* app, const std::string& var, const std::string& what) {
        name = var;
        app->add_option("--" + var, values, what + " (one or more values)");
        app->add_option("--" + var + "-min", lo, "grid start");
        app->add_option("--" + var + "-max", hi, "grid end");
        app->add_option("--n", n, "grid points")->check(CLI::Range(1, 1000000))->capture_default_str();
        app->add_flag("--log", log, "log-spaced grid");
    }
    std::vector<real> build(std::vector<real> fallback) const {
        if (!values.empty()) return {values.begin(), values.end()};
        if (std::isnan(lo) && std::isnan(hi)) return fallback;
        if (std::isnan(lo) || std::isnan(hi) || !(hi >= lo))
            throw DomainError("--" + name + "-min and --" + name + "-max must both be given, min <= max");
        if (log && !(lo > 0)) throw DomainError("--log needs --" + name + "-min > 0");
        std::vector<real> g(n);
        for (int i = 0; i < n; ++i) {
            const real f = n == 1 ? 0 : real(i) / (n - 1);
            g[i] = log ? std::exp(std::log(real(lo)) + f * (std::log(real(hi)) - std::log(real(lo))))
                       : lo + f * (real(hi) - lo);
        }
        return g;
    }
};

struct Common {
    std::string format = "csv";
    std::string output;
    std::string config;
    std::string precision;
    double quad_tol = kNaN;
    int threads = 0;
    bool log_x = false, log_y = false;
};

// rows in input order; any exception from a row is rethrown (the first by index)
std::vector<std::vector<real>> parallel_rows(std::size_t n, int threads,
                                             const std::function<std::vector<real>(std::size_t)>& f) {
    std::vector<std::vector<real>> rows(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                rows[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int nt = int(std::min<std::size_t>(n, std::max(1, threads)));
    std::vector<std::thread> pool;
    for (int k = 1; k < nt; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

real msd_of(const MemoryKernel& k, real t, const EvalConfig& cfg) {
    try {
        return moment_even({k, 2, t, MomentRoute::ClosedForm}, cfg).value;
    } catch (const RouteUnavailable&) {
        return moment_even({k, 2, t, MomentRoute::IltOracle}, cfg).value;
    }
}

MomentRoute moment_route(const std::string& s) {
    if (s == "ilt") return MomentRoute::IltOracle;
    if (s == "quadrature") return MomentRoute::QuadratureOracle;
    return MomentRoute::ClosedForm;
}

// -------------------------------------------------------------------------
// verify

struct Check {
    std::string name;
    real value = 0;
    real threshold = 0;
    bool pass = false;
    std::string detail;
};

struct Suite {
    std::vector<Check> checks;
    std::vector<CmReport> reports;

    void below(const std::string& name, const std::function<real()>& f, real threshold) {
        Check c{name, 0, threshold, false, ""};
        try {
            c.value = f();
            c.pass = std::fabs(c.value) < threshold;
        } catch (const std::exception& e) {
            c.value = std::numeric_limits<real>::quiet_NaN();
            c.detail = e.what();
        }
        checks.push_back(c);
    }
    void cm(const std::string& name, const std::function<CmReport()>& f, bool expect_pass) {
        Check c{name, 0, 0, false, ""};
        try {
            auto r = f();
            c.value = real(r.violations.size());
            c.pass = r.passed() == expect_pass;
            c.detail = std::string(to_string(r.verdict)) + (expect_pass ? "" : " (control)");
            reports.push_back(std::move(r));
        } catch (const std::exception& e) {
            c.value = std::numeric_limits<real>::quiet_NaN();
            c.detail = e.what();
        }
        checks.push_back(c);
    }
    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }
};

Suite run_verify(const EvalConfig& cfg) {
    Suite s;
    const MemoryKernel k1 = MemoryKernel::distributed(), k2 = MemoryKernel::distributed_prabhakar(0.5L, 0.5L, 1);
    auto sonnine_max = [&](const MemoryKernel& k) {
        real m = 0;
        for (int i = 0; i < 10; ++i) m = std::max(m, sonnine_residual(k, std::pow(real(10), -2 + 3 * real(i) / 9), cfg));
        return m;
    };
    s.below("sonnine k1 (max over [1e-2, 10])", [&] { return sonnine_max(k1); }, 1e-5L);
    s.below("sonnine k2 (max over [1e-2, 10])", [&] { return sonnine_max(k2); }, 1e-5L);
    s.below("ramanujan integral - 1", [&] {
        const real pi = std::numbers::pi_v<real>;
        return quad::sinh_sinh([pi](real u) { return 1 / (pi * pi + u * u); }, 1e-14L).value - 1;
    }, 1e-8L);
    s.below("ramanujan identity t=1", [&] { return ramanujan_residual(1, cfg).value; }, 1e-6L);
    for (auto [a, g] : {std::pair{0.4L, 2.0L}, {0.4L, 3.0L}, {0.3L, 3.0L}}) {
        std::ostringstream n;
        n << "spectral mass 2^g int K~ - 1 (" << double(a) << "," << double(g) << ")";
        s.below(n.str(), [&, a, g] { return std::pow(real(2), g) * spectral_laplace(a, g, a * g, 0, cfg).value - 1; },
                1e-6L);
    }
    s.below("log-integral closed form vs quadrature (max of 9)", [&] {
        real m = 0;
        for (real a : {0.5L, 1.0L, 1.5L})
            for (real t : {0.5L, 1.0L, 3.0L}) {
                PrabhakarParams pp{1, 1 + a, 1, -1};
                const real q = quad::tanh_sinh([&](real u) { return u > 0 ? std::log(u) * prabhakar_e(pp, u, cfg).value : 0; },
                                               0, t, 1e-13L)
                                   .value;
                m = std::max(m, std::fabs(prabhakar_log_integral(a, t, cfg).value - q));
            }
        return m;
    }, 1e-8L);
    auto vp = [](real a, real g, real l, real p) {
        VPArgs v;
        v.params.alpha = a;
        v.params.gamma = g;
        v.params.lambda = l;
        v.p = p;
        return v;
    };
    s.below("power convolution of nu", [&] { return prop1_residual(0.5L, 0, 1, cfg).value; }, 1e-6L);
    s.below("nu convolved with e^gamma", [&] { return prop2a_residual(vp(0.5L, 0.5L, 1, 0), 1, cfg).value; }, 1e-6L);
    s.below("power convolution of mu", [&] { return prop5a_residual(0.5L, 0.5L, 1, cfg).value; }, 1e-6L);
    s.below("derivative lowers the shift n=1", [&] { return property_a_residual(vp(0.6L, 0.8L, 1, 0), 1, 1, cfg).value; },
            1e-3L);
    s.below("derivative lowers the shift n=2", [&] { return property_a_residual(vp(0.6L, 0.8L, 1, 0), 2, 1, cfg).value; },
            1e-3L);
    s.below("semigroup", [&] { return property_b_residual(vp(0.5L, 0.6L, 1, 0.3L), vp(0.5L, 0.9L, 1, 0.5L), 1, cfg).value; },
            1e-5L);
    s.below("ilt k1^ vs nu(t,-1) - nu(t), t=1 (rel)", [&] {
        const real a = ilt(make_kernel_laplace(k1), 1, cfg.ilt).value, b = nu(1, -1, cfg).value - nu(1, 0, cfg).value;
        return (a - b) / b;
    }, 1e-5L);
    s.below("msd1 vs 2B int M1, t=1 (rel)", [&] {
        const real q = moment_even({k1, 2, 1, MomentRoute::QuadratureOracle}, cfg).value;
        return (msd1(1) - q) / q;
    }, 1e-8L);
    s.below("msd2 series vs quadrature, t=1 (rel)", [&] {
        const real a = msd2(0.5L, 0.5L, 1, 1, 1, Msd2Route::Series, cfg).value;
        const real b = msd2(0.5L, 0.5L, 1, 1, 1, Msd2Route::QuadratureOracle, cfg).value;
        return (a - b) / b;
    }, 1e-4L);
    s.below("Ei-ln convolution general vs small-t, t=0.5", [&] {
        return conv_ei_log(0.5L, ConvRegime::General, cfg).value - conv_ei_log(0.5L, ConvRegime::SmallT, cfg).value;
    }, 1e-6L);
    s.below("fourth moment closed vs ilt, t=1 (rel)", [&] {
        const real a = fourth_moment_1(1, 1, cfg).value, b = moment_even({k1, 4, 1, MomentRoute::IltOracle}, cfg).value;
        return (a - b) / b;
    }, 1e-5L);
    s.below("pdf series vs ilt, k1 (0.5, 1)", [&] {
        return pdf_eval({0.5L, 1, k1, PdfRoute::Series}, cfg).value - pdf_eval({0.5L, 1, k1}, cfg).value;
    }, 1e-3L);

    s.cm("cm k1 [0.1, 5]", [&] { return check_cm([&](real t) { return k1_time(t, cfg).value; }, 0.1L, 5, 4, 1e-10L, {"k1"}); },
         true);
    s.cm("cm k2 [0.1, 5]", [&] {
        return check_cm([&](real t) { return k2_time(0.5L, 0.5L, 1, t, K2Route::NuSeries, cfg).value; }, 0.1L, 5, 4,
                        1e-10L, {"k2"});
    }, true);
    s.cm("cm M1 [0.1, 5]", [&] { return check_cm([](real t) { return m1_time(t); }, 0.1L, 5, 4, 1e-10L, {"M1"}); }, true);
    s.cm("cm e^t - nu [0.05, 3]", [&] {
        return check_cm([&](real t) { return std::exp(t) - nu(t, 0, cfg).value; }, 0.05L, 3, 4, 1e-10L,
                        {"e^t - nu", 24, 1e-13L});
    }, true);
    s.cm("cm e^t/4 - eps^2_{0.4,0.8} [0.1, 3]", [&] {
        const auto a = vp(0.4L, 2, 1, 0.8L);
        return check_cm([&](real t) { return std::exp(t) / 4 - vp_epsilon(a, t, VPRoute::NuSeries, cfg).value; }, 0.1L,
                        3, 4, 1e-10L, {"e^t/4 - eps(0.4, 2)", 24, 1e-13L});
    }, true);
    s.cm("control 1/(1+t^2) is flagged", [] {
        return check_cm([](real t) { return 1 / (1 + t * t); }, 0.1L, 5, 4, 1e-10L, {"1/(1+t^2)"});
    }, false);
    return s;
}

void write_verify(const Suite& s, const std::string& format, std::ostream& out) {
    if (format == "json") {
        nlohmann::json j;
        j["passed"] = s.passed();
        j["checks"] = nlohmann::json::array();
        for (const auto& c : s.checks)
            j["checks"].push_back({{"check", c.name},
                                   {"value", std::isfinite(c.value) ? nlohmann::json(double(c.value)) : nlohmann::json()},
                                   {"threshold", double(c.threshold)},
                                   {"status", c.pass ? "PASS" : "FAIL"},
                                   {"detail", c.detail}});
        j["cm_reports"] = nlohmann::json::array();
        for (const auto& r : s.reports) j["cm_reports"].push_back(nlohmann::json::parse(to_json(r)));
        out << j.dump(2) << '\n';
        return;
    }
    out << "check,value,threshold,status,detail\n";
    for (const auto& c : s.checks) {
        out << '"' << c.name << "\",";
        put(out, c.value);
        out << ',';
        put(out, c.threshold);
        std::string d = c.detail;
        std::replace(d.begin(), d.end(), '"', '\'');
        out << ',' << (c.pass ? "PASS" : "FAIL") << ",\"" << d << "\"\n";
    }
}

}  // namespace

// -------------------------------------------------------------------------

void write_csv(const Table& t, std::ostream& out) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            put(out, row[c]);
        }
        out << '\n';
    }
}

void write_json(const Table& t, std::ostream& out) {
    nlohmann::json j;
    j["columns"] = t.columns;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : t.rows) {
        auto r = nlohmann::json::array();
        for (real v : row) r.push_back(std::isfinite(v) ? nlohmann::json(double(v)) : nlohmann::json());
        j["rows"].push_back(r);
    }
    out << j.dump(2) << '\n';
}

void write_svg(const Table& t, std::ostream& out, bool log_x, bool log_y, const std::string& title) {
    const real W = 640, H = 420, L = 70, R = 20, T = 40, Bm = 50;
    const auto mx = range_of(t, 0, 1, log_x);
    const auto my = range_of(t, 1, t.columns.size(), log_y);
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << double(W) << "\" height=\""
        << double(H) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << double(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << title << "</text>\n";
    out << "<line x1=\"" << double(L) << "\" y1=\"" << double(H - Bm) << "\" x2=\"" << double(W - R) << "\" y2=\""
        << double(H - Bm) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << double(L) << "\" y1=\"" << double(T) << "\" x2=\"" << double(L) << "\" y2=\""
        << double(H - Bm) << "\" stroke=\"black\"/>\n";
    auto label = [&](real x, real y, real v, const char* anchor) {
        out << "<text x=\"" << double(x) << "\" y=\"" << double(y) << "\" text-anchor=\"" << anchor
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << std::setprecision(4) << double(v) << "</text>\n";
    };
    label(L, H - Bm + 16, mx.lo, "start");
    label(W - R, H - Bm + 16, mx.hi, "end");
    label(L - 4, H - Bm, my.lo, "end");
    label(L - 4, T + 8, my.hi, "end");
    if (!t.columns.empty())
        out << "<text x=\"" << double((L + W - R) / 2) << "\" y=\"" << double(H - 12)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << t.columns[0]
            << (log_x ? " (log)" : "") << "</text>\n";
    for (std::size_t c = 1; c < t.columns.size(); ++c) {
        out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colors[(c - 1) % 6] << "\" points=\"";
        for (const auto& row : t.rows) {
            const real x = row[0], y = row[c];
            if (!std::isfinite(x) || !std::isfinite(y) || (log_x && !(x > 0)) || (log_y && !(y > 0))) continue;
            out << std::setprecision(6) << double(mx(x, L, W - R)) << ',' << double(my(y, H - Bm, T)) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << double(W - R - 4) << "\" y=\"" << double(T + 14 * c) << "\" text-anchor=\"end\" fill=\""
            << colors[(c - 1) % 6] << "\" font-family=\"sans-serif\" font-size=\"11\">" << t.columns[c] << "</text>\n";
    }
    out << "</svg>\n";
}

EvalConfig apply_config_text(const std::string& text, EvalConfig cfg) {
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    auto number = [&](const std::string& v) {
        std::size_t used = 0;
        real x;
        try {
            x = std::stold(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v.size()) throw DomainError("config line " + std::to_string(lineno) + ": bad number '" + v + "'");
        return x;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
        if (!section.empty()) key = section + "." + key;
        if (key == "quad_tol")
            cfg.quad_tol = number(val);
        else if (key == "ml_asymptotic_crossover")
            cfg.ml_asymptotic_crossover = number(val);
        else if (key == "precision") {
            if (val != "double" && val != "extended") throw DomainError("config: precision must be double or extended");
            cfg.precision = val == "double" ? Precision::Double : Precision::Extended;
        } else if (key == "series.max_terms")
            cfg.series.max_terms = int(number(val));
        else if (key == "series.abs_tol")
            cfg.series.abs_tol = number(val);
        else if (key == "series.rel_tol")
            cfg.series.rel_tol = number(val);
        else if (key == "ilt.method") {
            if (val != "gaver-stehfest" && val != "talbot") throw DomainError("config: ilt.method must be gaver-stehfest or talbot");
            cfg.ilt.method = val == "talbot" ? IltMethod::ShiftedTalbot : IltMethod::GaverStehfest;
        } else if (key == "ilt.gs_terms")
            cfg.ilt.gs_terms = int(number(val));
        else if (key == "ilt.talbot_nodes")
            cfg.ilt.talbot_nodes = int(number(val));
        else if (key == "ilt.shift")
            cfg.ilt.shift = number(val);
        else if (key == "ilt.tol")
            cfg.ilt.tol = number(val);
        else
            throw DomainError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (!(cfg.quad_tol > 0)) throw DomainError("config: quad_tol must be > 0");
    cfg.series.validate();
    cfg.ilt.validate();
    return cfg;
}

EvalConfig load_config_file(const std::string& path, EvalConfig base) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return apply_config_text(ss.str(), base);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distributed-order diffusion: kernels, moments, densities and checks", "ultraslow-cli"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    Common co;
    app.add_option("--format", co.format, "csv | svg | json")->check(CLI::IsMember({"csv", "svg", "json"}))->capture_default_str();
    app.add_option("-o,--output", co.output, "output file (default stdout)");
    app.add_option("--config", co.config, "key = value file overriding evaluation defaults");
    app.add_option("--precision", co.precision, "double | extended accumulators")->check(CLI::IsMember({"double", "extended"}));
    app.add_option("--quad-tol", co.quad_tol, "quadrature tolerance");
    app.add_option("--threads", co.threads, "worker threads for grids (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_flag("--logx", co.log_x, "log x axis in svg output");
    app.add_flag("--logy", co.log_y, "log y axis in svg output");

    // eval
    auto* ev = app.add_subcommand("eval", "special functions on a grid; columns x,value,abs_err");
    std::string func;
    double e_alpha = 0.5, e_beta = 1, e_gamma = 1, e_lambda = 1, e_p = 0;
    std::string e_route = "u-integral";
    GridFlags e_grid;
    ev->add_option("--func", func, "ml3 | prabhakar | nu | mu | epsilon | ei | e1 | ein | digamma")
        ->required()
        ->check(CLI::IsMember({"ml3", "prabhakar", "nu", "mu", "epsilon", "ei", "e1", "ein", "digamma"}));
    ev->add_option("--alpha", e_alpha)->capture_default_str();
    ev->add_option("--beta", e_beta, "Mittag-Leffler beta; mu: the u^beta weight")->capture_default_str();
    ev->add_option("--gamma", e_gamma)->capture_default_str();
    ev->add_option("--lambda", e_lambda)->capture_default_str();
    ev->add_option("--p", e_p, "order shift (nu, mu, epsilon)")->capture_default_str();
    ev->add_option("--route", e_route, "epsilon: u-integral | nu-series | bromwich")
        ->check(CLI::IsMember({"u-integral", "nu-series", "bromwich"}))
        ->capture_default_str();
    e_grid.add(ev, "x", "argument (z for ml3, t otherwise)");

    // kernel
    auto* ke = app.add_subcommand("kernel", "kernel and Sonnine partner in time; columns t,kernel,partner[,sonnine_residual]");
    KernelFlags k_flags;
    GridFlags k_grid;
    bool k_sonnine = false;
    k_flags.add(ke);
    k_grid.add(ke, "t", "time");
    ke->add_flag("--sonnine", k_sonnine, "add |k * M - 1|");

    // msd
    auto* ms = app.add_subcommand("msd", "mean squared displacement; columns t,value,abs_err");
    KernelFlags m_flags;
    GridFlags m_grid;
    std::string m_route = "closed";
    m_flags.add(ms);
    m_grid.add(ms, "t", "time");
    ms->add_option("--route", m_route, "closed | ilt | quadrature")
        ->check(CLI::IsMember({"closed", "ilt", "quadrature"}))
        ->capture_default_str();

    // moments
    auto* mo = app.add_subcommand("moments", "even moments; columns t,value,abs_err or t,m2,m4,kurtosis");
    KernelFlags o_flags;
    GridFlags o_grid;
    int o_order = 4;
    std::string o_route = "closed";
    bool o_kurtosis = false;
    o_flags.add(mo);
    o_grid.add(mo, "t", "time");
    mo->add_option("--order", o_order, "2n")->check(CLI::Range(2, 12))->capture_default_str();
    mo->add_option("--route", o_route, "closed | ilt | quadrature")
        ->check(CLI::IsMember({"closed", "ilt", "quadrature"}))
        ->capture_default_str();
    mo->add_flag("--kurtosis", o_kurtosis, "emit second and fourth moments and the kurtosis");

    // pdf
    auto* pd = app.add_subcommand("pdf", "probability density in x at fixed t; columns x,p,abs_err");
    KernelFlags p_flags;
    GridFlags p_grid;
    double p_t = 1;
    std::string p_route = "ilt";
    p_flags.add(pd);
    p_grid.add(pd, "x", "position (default: 101 points on +-4 sqrt(msd))");
    pd->add_option("--t", p_t, "time")->capture_default_str();
    pd->add_option("--route", p_route, "ilt | series")->check(CLI::IsMember({"ilt", "series"}))->capture_default_str();

    // spectral
    auto* sp = app.add_subcommand("spectral", "2^gamma K~^gamma_{alpha,p}(r) on a log grid; columns r,value");
    double s_alpha = 0.4, s_gamma = 3, r_min = 1e-3, r_max = 1e3;
    std::string s_p = "auto";
    int s_n = 200;
    bool s_integrate = false;
    sp->add_option("--alpha", s_alpha)->capture_default_str();
    sp->add_option("--gamma", s_gamma)->capture_default_str();
    sp->add_option("--p", s_p, "order shift or auto (= alpha gamma)")->capture_default_str();
    sp->add_option("--r-min", r_min)->check(CLI::PositiveNumber)->capture_default_str();
    sp->add_option("--r-max", r_max)->check(CLI::PositiveNumber)->capture_default_str();
    sp->add_option("--n", s_n)->check(CLI::Range(2, 1000000))->capture_default_str();
    sp->add_flag("--integrate", s_integrate, "emit int_0^inf 2^gamma K~ dr instead of the curve");

    // asymptote
    auto* as = app.add_subcommand("asymptote", "Tauberian leading terms; columns t,exact,asymptote,ratio");
    KernelFlags a_flags;
    a_flags.kind = "k2";
    GridFlags a_grid;
    std::string a_id = "msd1", a_regime = "long";
    as->add_option("--id", a_id, "k1 | k2 | M1 | M2 | msd1 | msd2")
        ->check(CLI::IsMember({"k1", "k2", "M1", "M2", "msd1", "msd2"}))
        ->capture_default_str();
    as->add_option("--regime", a_regime, "short | long")->check(CLI::IsMember({"short", "long"}))->capture_default_str();
    as->add_option("--alpha", a_flags.alpha)->capture_default_str();
    as->add_option("--gamma", a_flags.gamma)->capture_default_str();
    as->add_option("--lambda", a_flags.lambda)->capture_default_str();
    as->add_option("--B", a_flags.B)->capture_default_str();
    a_grid.add(as, "t", "time");

    // verify
    auto* ve = app.add_subcommand("verify", "identity, route and CM suite; exit 1 on any failure");

    // fdsolve
    auto* fd = app.add_subcommand("fdsolve", "finite-difference solution; csv field, json summary, svg final profile");
    KernelFlags f_flags;
    double f_t = 1, f_L = 0;
    int f_nx = 401, f_nt = 0, f_every = 10;
    f_flags.add(fd);
    fd->add_option("--t", f_t, "final time")->check(CLI::PositiveNumber)->capture_default_str();
    fd->add_option("--L", f_L, "half width of the box (0 = automatic)")->check(CLI::NonNegativeNumber);
    fd->add_option("--nx", f_nx, "nodes (odd)")->capture_default_str();
    fd->add_option("--nt", f_nt, "time steps (0 = automatic)")->check(CLI::NonNegativeNumber);
    fd->add_option("--store-every", f_every, "keep every k-th slice")->check(CLI::PositiveNumber)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    EvalConfig cfg;
    std::unique_ptr<std::ofstream> file;
    std::ostream* os = &out;
    try {
        if (!co.config.empty()) cfg = load_config_file(co.config, cfg);
        if (const char* env = std::getenv("PRABHAKAR_PRECISION")) {
            const std::string v = env;
            if (v == "double")
                cfg.precision = Precision::Double;
            else if (v == "extended")
                cfg.precision = Precision::Extended;
            else
                throw DomainError("PRABHAKAR_PRECISION must be double or extended");
        }
        if (!co.precision.empty()) cfg.precision = co.precision == "double" ? Precision::Double : Precision::Extended;
        if (!std::isnan(co.quad_tol)) {
            if (!(co.quad_tol > 0)) throw DomainError("--quad-tol must be > 0");
            cfg.quad_tol = co.quad_tol;
        }
        if (!co.output.empty()) {
            file = std::make_unique<std::ofstream>(co.output);
            if (!*file) throw DomainError("cannot open " + co.output);
            os = file.get();
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    const int threads = co.threads > 0 ? co.threads : int(std::max(1u, std::thread::hardware_concurrency()));

    Table table;
    bool default_logx = false;
    std::string title;
    try {
        // flag-level validation first: DomainError here is a usage error
        std::function<void()> compute;
        if (*ev) {
            const auto xs = e_grid.build({1});
            table.columns = {"x", "value", "abs_err"};
            title = "eval " + func;
            compute = [&, xs] {
                table.rows = parallel_rows(xs.size(), threads, [&](std::size_t i) -> std::vector<real> {
                    const real x = xs[i];
                    EvalResult r;
                    PrabhakarParams pp{e_alpha, e_beta, e_gamma, e_lambda};
                    VPArgs va;
                    va.params = pp;
                    va.p = e_p;
                    if (func == "ml3") r = mittag_leffler_3p(pp, x, cfg);
                    if (func == "prabhakar") r = prabhakar_e(pp, x, cfg);
                    if (func == "nu") r = nu(x, e_p, cfg);
                    if (func == "mu") r = volterra_mu({x, e_beta, e_p}, cfg);
                    if (func == "epsilon")
                        r = vp_epsilon(va, x,
                                       e_route == "nu-series"  ? VPRoute::NuSeries
                                       : e_route == "bromwich" ? VPRoute::Bromwich
                                                               : VPRoute::UIntegral,
                                       cfg);
                    if (func == "ei") r.value = exp_integral_ei(x);
                    if (func == "e1") r.value = exp_integral_e1(x);
                    if (func == "ein") r.value = ein(x);
                    if (func == "digamma") r.value = digamma(x);
                    return {x, r.value, r.abs_err};
                });
            };
        } else if (*ke) {
            const auto k = k_flags.build();
            const auto ts = k_grid.build({0.01L, 0.1L, 1, 10});
            table.columns = {"t", "kernel", "partner"};
            if (k_sonnine) table.columns.push_back("sonnine_residual");
            title = "kernel " + k.name();
            default_logx = true;
            compute = [&, k, ts] {
                table.rows = parallel_rows(ts.size(), threads, [&](std::size_t i) -> std::vector<real> {
                    std::vector<real> row{ts[i], kernel_time(k, ts[i], cfg).value, partner_time(k, ts[i], cfg).value};
                    if (k_sonnine) row.push_back(sonnine_residual(k, ts[i], cfg));
                    return row;
                });
            };
        } else if (*ms) {
            const auto k = m_flags.build();
            const auto ts = m_grid.build({1});
            table.columns = {"t", "value", "abs_err"};
            title = "msd " + k.name();
            compute = [&, k, ts] {
                table.rows = parallel_rows(ts.size(), threads, [&](std::size_t i) -> std::vector<real> {
                    const auto r = moment_even({k, 2, ts[i], moment_route(m_route)}, cfg);
                    return {ts[i], r.value, r.abs_err};
                });
            };
        } else if (*mo) {
            const auto k = o_flags.build();
            const auto ts = o_grid.build({1});
            if (o_order % 2) throw DomainError("--order must be even");
            title = "moments " + k.name();
            table.columns = o_kurtosis ? std::vector<std::string>{"t", "m2", "m4", "kurtosis"}
                                       : std::vector<std::string>{"t", "value", "abs_err"};
            compute = [&, k, ts] {
                table.rows = parallel_rows(ts.size(), threads, [&](std::size_t i) -> std::vector<real> {
                    const real t = ts[i];
                    if (!o_kurtosis) {
                        const auto r = moment_even({k, o_order, t, moment_route(o_route)}, cfg);
                        return {t, r.value, r.abs_err};
                    }
                    const auto kr = kurtosis(k, t, moment_route(o_route), cfg);
                    const real m2 = msd_of(k, t, cfg);
                    return {t, m2, kr.kurtosis.value * m2 * m2, kr.kurtosis.value};
                });
            };
        } else if (*pd) {
            const auto k = p_flags.build();
            if (!(p_t > 0)) throw DomainError("--t must be > 0");
            std::vector<real> xs;
            if (p_grid.values.empty() && std::isnan(p_grid.lo) && std::isnan(p_grid.hi)) {
                const real w = 4 * std::sqrt(msd_of(k, p_t, cfg));
                for (int i = 0; i < 101; ++i) xs.push_back(-w + 2 * w * i / 100);
            } else {
                xs = p_grid.build({});
            }
            table.columns = {"x", "p", "abs_err"};
            title = "pdf " + k.name();
            compute = [&, k, xs] {
                table.rows = parallel_rows(xs.size(), threads, [&](std::size_t i) -> std::vector<real> {
                    PdfQuery q{xs[i], p_t, k, p_route == "series" ? PdfRoute::Series : PdfRoute::IltOfClosedLaplace};
                    const auto r = pdf_eval(q, cfg);
                    return {xs[i], r.value, r.abs_err};
                });
            };
        } else if (*sp) {
            real p = real(s_alpha) * real(s_gamma);
            if (s_p != "auto") {
                std::size_t used = 0;
                try {
                    p = std::stold(s_p, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used == 0 || used != s_p.size()) throw DomainError("--p must be a number or auto");
            }
            require_bromwich(s_alpha, s_gamma, 1, p);
            if (!(r_max > r_min)) throw DomainError("--r-max must exceed --r-min");
            const real scale = std::pow(real(2), real(s_gamma));
            title = "2^gamma K~";
            default_logx = true;
            if (s_integrate) {
                table.columns = {"alpha", "gamma", "p", "integral", "abs_err"};
                compute = [&, p, scale] {
                    const auto r = spectral_laplace(s_alpha, s_gamma, p, 0, cfg);
                    table.rows.push_back({real(s_alpha), real(s_gamma), p, scale * r.value, scale * r.abs_err});
                };
            } else {
                table.columns = {"r", "value"};
                compute = [&, p, scale] {
                    table.rows = parallel_rows(std::size_t(s_n), threads, [&](std::size_t i) -> std::vector<real> {
                        const real r = std::exp(std::log(real(r_min)) +
                                                real(i) / (s_n - 1) * (std::log(real(r_max)) - std::log(real(r_min))));
                        return {r, -scale * spectral_kernel(s_alpha, s_gamma, p, r)};
                    });
                };
            }
        } else if (*as) {
            const std::map<std::string, AsymptoticId> ids{{"k1", AsymptoticId::k1}, {"k2", AsymptoticId::k2},
                                                          {"M1", AsymptoticId::M1}, {"M2", AsymptoticId::M2},
                                                          {"msd1", AsymptoticId::msd1}, {"msd2", AsymptoticId::msd2}};
            const bool first = a_id.back() == '1';
            MemoryKernel k = first ? MemoryKernel::distributed(a_flags.B)
                                   : MemoryKernel::distributed_prabhakar(a_flags.alpha, a_flags.gamma, a_flags.lambda,
                                                                         a_flags.B);
            k.validate();
            const Regime regime = a_regime == "short" ? Regime::ShortTime : Regime::LongTime;
            const auto form = tauberian_asymptote(ids.at(a_id), regime, k);
            const auto ts = a_grid.build(regime == Regime::ShortTime ? std::vector<real>{1e-6L, 1e-5L, 1e-4L, 1e-3L}
                                                                     : std::vector<real>{1e2L, 1e3L, 1e4L, 1e5L});
            table.columns = {"t", "exact", "asymptote", "ratio"};
            title = "asymptote " + a_id + " (" + form.description + ")";
            default_logx = true;
            compute = [&, k, form, ts] {
                table.rows = parallel_rows(ts.size(), threads, [&](std::size_t i) -> std::vector<real> {
                    const real t = ts[i];
                    real exact;
                    if (a_id == "k1" || a_id == "k2")
                        exact = kernel_time(k, t, cfg).value;
                    else if (a_id == "M1" || a_id == "M2")
                        exact = partner_time(k, t, cfg).value;
                    else
                        exact = msd_of(k, t, cfg);
                    const real a = form.expression(t);
                    return {t, exact, a, exact / a};
                });
            };
        } else if (*ve) {
            if (co.format == "svg") throw DomainError("verify writes csv or json");
            const Suite s = run_verify(cfg);
            write_verify(s, co.format, *os);
            int pass = 0;
            for (const auto& c : s.checks) pass += c.pass;
            err << "verify: " << pass << "/" << s.checks.size() << " checks passed\n";
            return s.passed() ? 0 : 1;
        } else if (*fd) {
            const auto k = f_flags.build();
            GridSpec g = default_grid(k, f_t, f_nx, cfg);
            if (f_L > 0) g.x_half_width = f_L;
            if (f_nt > 0) g.nt = f_nt;
            g.validate();
            FdOptions opt;
            opt.store_every = f_every;
            const auto sol = solve_fp_integral(k, g, InitialCondition::DeltaApprox, opt, cfg);
            if (co.format == "csv") {
                write_field_csv(sol, *os);
            } else if (co.format == "json") {
                nlohmann::json j;
                j["kernel"] = k.name();
                j["grid"] = {{"x_half_width", double(g.x_half_width)}, {"nx", g.nx}, {"t_final", double(g.t_final)}, {"nt", g.nt}};
                real drift = 0;
                for (real m : sol.mass) drift = std::max(drift, std::fabs(m - 1));
                j["max_mass_drift"] = double(drift);
                j["msd"] = double(sol.msd.back());
                j["msd_reference"] = double(msd_of(k, f_t, cfg));
                j["min_value"] = double(sol.min_value);
                *os << j.dump(2) << '\n';
            } else {
                Table t;
                t.columns = {"x", "p"};
                for (std::size_t i = 0; i < sol.x.size(); ++i) t.rows.push_back({sol.x[i], real(sol.field.back()[i])});
                write_svg(t, *os, false, co.log_y, "fd solution " + k.name());
            }
            return 0;
        }
        try {
            compute();
        } catch (const DomainError& e) {
            // raised by the evaluators for arguments the flags let through
            err << "error: " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return 1;
        }
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const RouteUnavailable& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Inapplicable& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    if (co.format == "csv")
        write_csv(table, *os);
    else if (co.format == "json")
        write_json(table, *os);
    else
        write_svg(table, *os, co.log_x || default_logx, co.log_y, title);
    return 0;
}

}  // namespace ultraslow::cli
