#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "lek/errors.hpp"
#include "lek/pde.hpp"

using lek::Grid;
using lek::GridFunction;
using lek::geometry::ConvexDomain;
using namespace lek::pde;

namespace {

std::shared_ptr<const Grid> hat_grid_1d() {
    // nodes -2..2 at h = 1, single interior node at 0
    Grid g;
    g.dim = 1;
    g.h = 1.0;
    g.i0 = {-2, 0};
    g.n = {5, 1};
    g.mask = {0, 0, 1, 0, 0};
    return std::make_shared<const Grid>(g);
}

} // namespace

TEST_CASE("energy: closed-form examples") {
    auto grid = hat_grid_1d();
    GridFunction f(grid);
    const PQParams prm{2.0, 1.0, 1.0};
    CHECK(energy(f, prm) == doctest::Approx(0.0));

    f.values[2] = 1.0;  // hat of height 1
    CHECK(energy(f, prm) == doctest::Approx(0.0));  // (1/2)(1+1) - 1

    // small multiples of any nonzero profile have negative energy (q < p)
    const PQParams prm32{3.0, 2.0, 1.0};
    GridFunction tiny(grid);
    tiny.values[2] = 1e-3;
    CHECK(energy(tiny, prm32) < 0.0);
}

TEST_CASE("energy gradient: q = 1 constant and finite-difference check") {
    const auto dom = ConvexDomain::interval(-1.0, 1.0);
    auto grid = std::make_shared<const Grid>(lek::geometry::rasterize(dom, 0.125));
    GridFunction f(grid);

    const PQParams prm{2.0, 1.0, 1.0};
    auto g0 = energy_gradient(f, prm);
    const double hN = grid->h;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        if (grid->mask[i])
            CHECK(g0.values[i] == doctest::Approx(-hN).epsilon(1e-12));
        else
            CHECK(g0.values[i] == 0.0);
    }

    const PQParams prmq{2.0, 2.0 - 1e-9, 1.0};
    GridFunction z(grid);
    auto gz = energy_gradient(z, prmq);
    for (double v : gz.values) CHECK(v == 0.0);

    // central finite differences on a random positive function
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uni(0.2, 1.0);
    for (const PQParams prm_fd : {PQParams{2.0, 1.0, 1.0}, PQParams{3.0, 1.5, 2.0},
                                  PQParams{1.5, 1.2, 1.0}}) {
        CAPTURE(prm_fd.p);
        GridFunction u(grid);
        for (std::size_t i = 0; i < grid->size(); ++i)
            if (grid->mask[i]) u.values[i] = uni(rng);
        const auto g = energy_gradient(u, prm_fd);
        const double step = 1e-6;
        for (std::size_t i = 0; i < grid->size(); ++i) {
            if (!grid->mask[i]) continue;
            GridFunction up = u, dn = u;
            up.values[i] += step;
            dn.values[i] -= step;
            const double fd = (energy(up, prm_fd) - energy(dn, prm_fd)) / (2.0 * step);
            CHECK(g.values[i] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("1D solve: torsion profile and report") {
    const auto dom = ConvexDomain::interval(-1.0, 1.0);
    SolveOptions opts;
    auto [u, rep] = solve_lane_emden(dom, {2.0, 1.0, 1.0}, 1.0 / 64, opts);
    REQUIRE(rep.converged);
    CHECK(rep.residual <= 1e-8);
    const Grid& g = *u.grid;
    double maxerr = 0.0, maxval = 0.0;
    for (int ix = 0; ix < g.n[0]; ++ix) {
        if (!g.interior(ix, 0)) continue;
        const double x = g.coord(0, ix);
        maxerr = std::max(maxerr, std::abs(u.values[g.index(ix, 0)] - (1.0 - x * x) / 2.0));
        maxval = std::max(maxval, u.values[g.index(ix, 0)]);
    }
    // the three-point scheme is exact on quadratics, so only solver tolerance remains
    CHECK(maxerr <= 1e-6);
    CHECK(maxval == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("energy descent along accepted iterates") {
    std::vector<double> trace;
    SolveOptions opts;
    opts.energy_trace = &trace;
    const auto dom = ConvexDomain::interval(-1.0, 1.0);
    auto [u, rep] = solve_lane_emden(dom, {3.0, 1.5, 1.0}, 1.0 / 32, opts);
    REQUIRE(rep.converged);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 0; i + 1 < trace.size(); ++i)
        CHECK(trace[i + 1] <= trace[i] + 1e-12 * (1.0 + std::abs(trace[i])));
    CHECK(trace.back() < 0.0);
}

TEST_CASE("alpha scaling law of solves") {
    const auto dom = ConvexDomain::interval(-1.0, 1.0);
    const double h = 1.0 / 32;
    auto [u1, r1] = solve_lane_emden(dom, {2.0, 1.5, 1.0}, h);
    auto [u4, r4] = solve_lane_emden(dom, {2.0, 1.5, 4.0}, h);
    REQUIRE(r1.converged);
    REQUIRE(r4.converged);
    const double factor = std::pow(4.0, 1.0 / (2.0 - 1.5));
    double worst = 0.0;
    for (std::size_t i = 0; i < u1.values.size(); ++i)
        worst = std::max(worst, std::abs(u4.values[i] - factor * u1.values[i]));
    CHECK(worst <= 10.0 * 1e-8 * factor + 1e-7);
}

TEST_CASE("domain scaling law") {
    // solving on t*Omega at spacing t*h reproduces t^{p/(p-q)} u(x/t)
    const double h = 1.0 / 16;
    const auto dom1 = ConvexDomain::box({-1.0, -1.0}, {1.0, 1.0});
    const auto dom2 = ConvexDomain::box({-2.0, -2.0}, {2.0, 2.0});
    auto [u1, r1] = solve_lane_emden(dom1, {2.0, 1.0, 1.0}, h);
    auto [u2, r2] = solve_lane_emden(dom2, {2.0, 1.0, 1.0}, 2.0 * h);
    REQUIRE(r1.converged);
    REQUIRE(r2.converged);
    const Grid& g1 = *u1.grid;
    const Grid& g2 = *u2.grid;
    const double factor = std::pow(2.0, 2.0 / (2.0 - 1.0));
    double worst = 0.0;
    for (int ix = 0; ix < g1.n[0]; ++ix)
        for (int iy = 0; iy < g1.n[1]; ++iy) {
            if (!g1.interior(ix, iy)) continue;
            // same lattice index corresponds to the doubled coordinate
            const long jx = g1.i0[0] + ix - g2.i0[0];
            const long jy = g1.i0[1] + iy - g2.i0[1];
            REQUIRE(jx >= 0);
            REQUIRE(jx < g2.n[0]);
            const double expected = factor * u1.values[g1.index(ix, iy)];
            const double got = u2.values[g2.index(static_cast<int>(jx), static_cast<int>(jy))];
            worst = std::max(worst, std::abs(got - expected));
        }
    CHECK(worst <= 1e-4);
}

TEST_CASE("uniqueness: initialization independence") {
    const auto dom = ConvexDomain::box({-1.0, -1.0}, {1.0, 1.0});
    const double h = 1.0 / 16;
    SolveOptions a;
    a.init = InitKind::Constant;
    a.init_constant = 0.01;
    SolveOptions b;
    b.init = InitKind::Torsion;
    auto [ua, ra] = solve_lane_emden(dom, {3.0, 2.0, 1.0}, h, a);
    auto [ub, rb] = solve_lane_emden(dom, {3.0, 2.0, 1.0}, h, b);
    REQUIRE(ra.converged);
    REQUIRE(rb.converged);
    double worst = 0.0;
    for (std::size_t i = 0; i < ua.values.size(); ++i)
        worst = std::max(worst, std::abs(ua.values[i] - ub.values[i]));
    CHECK(worst <= 1e-5);
}

TEST_CASE("positivity of converged solutions") {
    const auto dom = ConvexDomain::disk({0.0, 0.0}, 1.0);
    const double h = 1.0 / 24;
    auto [u, rep] = solve_lane_emden(dom, {2.0, 1.5, 1.0}, h);
    REQUIRE(rep.converged);
    const Grid& g = *u.grid;
    for (int iy = 0; iy < g.n[1]; ++iy)
        for (int ix = 0; ix < g.n[0]; ++ix) {
            const std::size_t i = g.index(ix, iy);
            if (!g.mask[i]) continue;
            CHECK(u.values[i] >= 0.0);
            const double d = dom.distance_to_boundary({g.coord(0, ix), g.coord(1, iy)});
            if (d >= 2.0 * h) CHECK(u.values[i] > 0.0);
        }
}

TEST_CASE("p-Laplace inner solver examples") {
    const auto iv = ConvexDomain::interval(-1.0, 1.0);
    const double h = 1.0 / 64;
    auto grid = std::make_shared<const Grid>(lek::geometry::rasterize(iv, h));

    GridFunction zero_rhs(grid);
    auto u0 = solve_plaplace_fixed_rhs(iv, 2.0, zero_rhs, h);
    CHECK(u0.max_abs() <= 1e-12);

    GridFunction one_rhs(grid);
    for (std::size_t i = 0; i < grid->size(); ++i)
        if (grid->mask[i]) one_rhs.values[i] = 1.0;
    auto ut = solve_plaplace_fixed_rhs(iv, 2.0, one_rhs, h);
    CHECK(ut.max_interior() == doctest::Approx(0.5).epsilon(1e-9));

    const auto disk = ConvexDomain::disk({0.0, 0.0}, 1.0);
    const double hd = 1.0 / 32;
    auto dgrid = std::make_shared<const Grid>(lek::geometry::rasterize(disk, hd));
    GridFunction rhs_d(dgrid);
    for (std::size_t i = 0; i < dgrid->size(); ++i)
        if (dgrid->mask[i]) rhs_d.values[i] = 1.0;
    auto ud = solve_plaplace_fixed_rhs(disk, 2.0, rhs_d, hd);
    double worst = 0.0;
    const Grid& g = *ud.grid;
    for (int iy = 0; iy < g.n[1]; ++iy)
        for (int ix = 0; ix < g.n[0]; ++ix) {
            const std::size_t i = g.index(ix, iy);
            if (!g.mask[i]) continue;
            const double r2 = g.coord(0, ix) * g.coord(0, ix) + g.coord(1, iy) * g.coord(1, iy);
            worst = std::max(worst, std::abs(ud.values[i] - (1.0 - r2) / 4.0));
        }
    CHECK(worst <= 3.0 * hd);

    CHECK_THROWS_AS(solve_plaplace_fixed_rhs(iv, 2.0, GridFunction(grid, -1.0), h),
                    lek::ParameterError);
}

TEST_CASE("fixed point vs energy minimizer") {
    const auto iv = ConvexDomain::interval(-1.0, 1.0);
    const double h = 1.0 / 128;
    auto [ufp, rfp] = fixed_point_solve(iv, {2.0, 1.5, 1.0}, h);
    auto [umin, rmin] = solve_lane_emden(iv, {2.0, 1.5, 1.0}, h);
    REQUIRE(rfp.converged);
    REQUIRE(rmin.converged);
    double worst = 0.0;
    for (std::size_t i = 0; i < ufp.values.size(); ++i)
        worst = std::max(worst, std::abs(ufp.values[i] - umin.values[i]));
    CHECK(worst <= 1e-4);

    // q = 1 converges in one outer iteration
    auto [u1, r1] = fixed_point_solve(iv, {2.0, 1.0, 1.0}, h);
    CHECK(r1.iterations == 1);
    CHECK(r1.converged);

    const auto box = ConvexDomain::box({-1.0, -1.0}, {1.0, 1.0});
    auto [ubf, rbf] = fixed_point_solve(box, {3.0, 2.0, 1.0}, 1.0 / 16);
    auto [ubm, rbm] = solve_lane_emden(box, {3.0, 2.0, 1.0}, 1.0 / 16);
    REQUIRE(rbf.converged);
    REQUIRE(rbm.converged);
    worst = 0.0;
    for (std::size_t i = 0; i < ubf.values.size(); ++i)
        worst = std::max(worst, std::abs(ubf.values[i] - ubm.values[i]));
    CHECK(worst <= 1e-3);
}

TEST_CASE("residual operator") {
    const auto iv = ConvexDomain::interval(-1.0, 1.0);
    const double h = 1.0 / 32;
    auto grid = std::make_shared<const Grid>(lek::geometry::rasterize(iv, h));

    GridFunction zero(grid);
    CHECK(residual(zero, {2.0, 1.0, 0.7}) == doctest::Approx(0.7));  // |0 - alpha|

    auto [u, rep] = solve_lane_emden(iv, {2.0, 1.0, 1.0}, h);
    REQUIRE(rep.converged);
    CHECK(residual(u, {2.0, 1.0, 1.0}) <= 1e-8);

    // monotone growth under perturbation
    double prev = residual(u, {2.0, 1.0, 1.0});
    for (double epsb : {1e-4, 1e-3, 1e-2}) {
        GridFunction v = u;
        for (std::size_t i = 0; i < grid->size(); ++i)
            if (grid->mask[i]) v.values[i] += epsb;
        const double r = residual(v, {2.0, 1.0, 1.0});
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("nonnegative boundary datum") {
    const auto iv = ConvexDomain::interval(-1.0, 1.0);
    const double h = 1.0 / 32;
    SolveOptions opts;
    opts.datum = [](const lek::geometry::Point&) { return 0.25; };
    auto [ud, rd] = solve_lane_emden(iv, {2.0, 1.0, 1.0}, h, opts);
    auto [u0, r0] = solve_lane_emden(iv, {2.0, 1.0, 1.0}, h);
    REQUIRE(rd.converged);
    REQUIRE(r0.converged);
    const Grid& g = *ud.grid;
    // comparison principle: the solution with the larger datum dominates
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.mask[i]) CHECK(ud.values[i] >= u0.values[i] - 1e-9);
    // exterior nodes carry the datum exactly
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!g.mask[i]) CHECK(ud.values[i] == 0.25);

    SolveOptions bad;
    bad.datum = [](const lek::geometry::Point&) { return -1.0; };
    CHECK_THROWS_AS(solve_lane_emden(iv, {2.0, 1.0, 1.0}, h, bad), lek::ParameterError);
}

TEST_CASE("non-finite input raises a numeric error") {
    const auto iv = ConvexDomain::interval(-1.0, 1.0);
    auto grid = std::make_shared<const Grid>(lek::geometry::rasterize(iv, 0.125));
    GridFunction f(grid);
    for (std::size_t i = 0; i < grid->size(); ++i)
        if (grid->mask[i]) f.values[i] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(energy(f, {2.0, 1.0, 1.0}), lek::NumericError);
}

TEST_CASE("iteration exhaustion yields a non-converged report") {
    const auto square = ConvexDomain::box({-1.0, -1.0}, {1.0, 1.0});
    SolveOptions opts;
    opts.max_iterations = 2;
    auto [u, rep] = solve_lane_emden(square, {3.0, 2.0, 1.0}, 1.0 / 16, opts);
    CHECK_FALSE(rep.converged);
    CHECK(rep.iterations <= 2);
}

TEST_CASE("degenerate exponent on a polygon: both engines agree") {
    const auto tri = ConvexDomain::polygon({{0.0, 0.0}, {4.0, 0.0}, {0.0, 3.0}});
    const double h = 1.0 / 16;
    auto [um, rm] = solve_lane_emden(tri, {4.0, 2.5, 1.0}, h);
    auto [uf, rf] = fixed_point_solve(tri, {4.0, 2.5, 1.0}, h);
    REQUIRE(rm.converged);
    REQUIRE(rf.converged);
    double worst = 0.0;
    for (std::size_t i = 0; i < um.values.size(); ++i)
        worst = std::max(worst, std::abs(um.values[i] - uf.values[i]));
    CHECK(worst <= 1e-3);
}

TEST_CASE("singular exponent range 1 < p < 2") {
    const auto iv = ConvexDomain::interval(-1.0, 1.0);
    const double h = 1.0 / 64;
    auto [um, rm] = solve_lane_emden(iv, {1.5, 1.2, 1.0}, h);
    auto [uf, rf] = fixed_point_solve(iv, {1.5, 1.2, 1.0}, h);
    REQUIRE(rm.converged);
    REQUIRE(rf.converged);
    double worst = 0.0;
    for (std::size_t i = 0; i < um.values.size(); ++i)
        worst = std::max(worst, std::abs(um.values[i] - uf.values[i]));
    CHECK(worst <= 1e-4);
    CHECK(um.max_interior() > 0.0);
}

TEST_CASE("distance initialization reaches the same minimizer") {
    const auto disk = ConvexDomain::disk({0.0, 0.0}, 1.0);
    SolveOptions opts;
    opts.init = InitKind::Distance;
    auto [ud, rd] = solve_lane_emden(disk, {2.0, 1.0, 1.0}, 1.0 / 16, opts);
    auto [us, rs] = solve_lane_emden(disk, {2.0, 1.0, 1.0}, 1.0 / 16);
    REQUIRE(rd.converged);
    REQUIRE(rs.converged);
    double worst = 0.0;
    for (std::size_t i = 0; i < ud.values.size(); ++i)
        worst = std::max(worst, std::abs(ud.values[i] - us.values[i]));
    CHECK(worst <= 1e-5);
}
