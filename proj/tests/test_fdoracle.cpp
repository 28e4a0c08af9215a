#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ultraslow/fdoracle.hpp"
#include "ultraslow/moments.hpp"
#include "ultraslow/pdf.hpp"

using namespace ultraslow;

namespace {

const MemoryKernel K1 = MemoryKernel::distributed();
const MemoryKernel K2 = MemoryKernel::distributed_prabhakar(0.5L, 0.5L, 1);

GridSpec acceptance_grid() {
    GridSpec g;
    g.x_half_width = 25;
    g.nx = 401;
    g.t_final = 1;
    g.nt = 2000;
    return g;
}

}  // namespace

TEST_CASE("k1 on the acceptance grid") {
    FdOptions o;
    o.store_every = 500;
    const auto s = solve_fp_integral(K1, acceptance_grid(), InitialCondition::DeltaApprox, o);
    REQUIRE(s.mass.size() == 2001);
    for (real m : s.mass) CHECK(std::fabs(double(m) - 1) < 1e-3);
    CHECK(std::fabs(double(s.msd.back() / msd1(1)) - 1) < 0.02);
    CHECK(s.min_value >= -1e-6L);
    CHECK(s.t.size() == 5);
    // mirror symmetry of every stored slice
    for (const auto& row : s.field) {
        const int n = int(row.size());
        for (int i = 0; i < n / 2; ++i) CHECK(std::fabs(row[i] - row[n - 1 - i]) <= 1e-13 * (1 + std::fabs(row[i])));
    }
    // the field itself against the inverted PDF; the cusp at x = 0 costs O(dx)
    const auto& last = s.field.back();
    CHECK(std::fabs(last[200] / double(pdf_eval({0, 1, K1}).value) - 1) < 0.05);
    for (int i : {204, 220, 240}) {
        CAPTURE(double(s.x[i]));
        const double ref = double(pdf_eval({s.x[i], 1, K1}).value);
        CHECK(std::fabs(last[i] - ref) < 0.02 * ref + 1e-4);
    }
}

TEST_CASE("k2 against the quadrature MSD") {
    const auto s = solve_fp_integral(K2, acceptance_grid());
    const real ref = msd2(0.5L, 0.5L, 1, 1, 1, Msd2Route::QuadratureOracle).value;
    CHECK(std::fabs(double(s.msd.back() / ref) - 1) < 0.03);
    for (real m : s.mass) CHECK(std::fabs(double(m) - 1) < 1e-3);
}

TEST_CASE("refinement") {
    GridSpec coarse;
    coarse.x_half_width = 25;
    coarse.nx = 201;
    coarse.t_final = 1;
    coarse.nt = 1000;
    GridSpec fine = coarse;
    fine.nx = 401;
    fine.nt = 2000;
    const real e1 = std::fabs(solve_fp_integral(K1, coarse).msd.back() - msd1(1));
    const real e2 = std::fabs(solve_fp_integral(K1, fine).msd.back() - msd1(1));
    CHECK(e1 / e2 >= 2);
}

TEST_CASE("default grid") {
    const auto g = default_grid(K1, 0.5L);
    CHECK(g.x_half_width >= 10 * std::sqrt(msd1(0.5L)));
    const auto s = solve_fp_integral(K1, g);
    for (real m : s.mass) CHECK(std::fabs(double(m) - 1) < 1e-3);
}

TEST_CASE("guards") {
    GridSpec g = acceptance_grid();
    g.nt = 200;  // far beyond the explicit limit
    CHECK_THROWS_AS(solve_fp_integral(K1, g), InstabilityDetected);
    g.nx = 400;
    CHECK_THROWS_AS(solve_fp_integral(K1, g), DomainError);
}

TEST_CASE("csv dump") {
    GridSpec g;
    g.x_half_width = 10;
    g.nx = 21;
    g.t_final = 0.1L;
    g.nt = 10;
    FdOptions o;
    o.store_every = 5;
    const auto s = solve_fp_integral(K1, g, InitialCondition::DeltaApprox, o);
    std::ostringstream os;
    write_field_csv(s, os);
    std::istringstream in(os.str());
    std::string line;
    int rows = 0;
    std::getline(in, line);
    CHECK(line.rfind("t,", 0) == 0);
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
}
