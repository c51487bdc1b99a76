#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "seagle/forward.hpp"
#include "seagle/potential.hpp"
#include "test_util.hpp"

using namespace seagle;
using std::numbers::pi;

namespace {

struct Setup {
    double k = 2.0 * pi / 0.0749;
    Grid grid;
    SensorArray sensors;
    SourceSpec source;

    Setup() : grid(Grid::centered2d(32, 32, 0.0096)), source(SourceSpec::point({-0.4, 0.02, 0}, k)) {
        for (int i = 0; i < 24; ++i) {
            const double a = 2.0 * pi * i / 24;
            sensors.points.push_back({0.35 * std::cos(a), 0.35 * std::sin(a), 0});
        }
    }
};

}  // namespace

TEST_CASE("incident fields") {
    Setup s;
    SourceSpec plane = SourceSpec::plane({1.0, 1.0, 0}, s.k);
    ComplexField u = incident_field(plane, s.grid);
    for (const cdouble& v : u.values) CHECK(std::abs(std::abs(v) - 1.0) < 1e-14);

    // Plane wave is exactly 1 at the coordinate origin.
    Grid odd = Grid::centered2d(5, 5, 0.01);
    ComplexField uo = incident_field(plane, odd);
    CHECK(uo.values[odd.linear_index({2, 2, 0})] == cdouble{1.0, 0.0});

    // 2D point source radiates the Green function.
    ComplexField us = incident_field(s.source, s.sensors, 2);
    std::array<double, 3> off{s.sensors.points[0][0] - s.source.location[0],
                              s.sensors.points[0][1] - s.source.location[1], 0};
    CHECK(us.values[0] == green_scalar(off, s.k, 2));

    // Source on a target sample is a singularity.
    SourceSpec on_grid = SourceSpec::point({0.0048, 0.0048, 0}, s.k);
    Grid tiny = Grid::make(2, {2, 2, 1}, 0.0048, {0, 0, 0});
    CHECK_THROWS_AS(incident_field(on_grid, tiny), SingularityError);
}

TEST_CASE("system operator adjoint consistency") {
    Setup s;
    InteriorOperator G(s.grid, s.k);
    ScatteringPotential f = make_ball(s.grid, {0.01, 0.0, 0}, 0.05, 0.2, s.k);
    SystemOperator A(G, f);
    for (int trial = 0; trial < 5; ++trial) {
        ComplexField x = test_util::random_grid_field(s.grid, 500 + static_cast<unsigned>(trial));
        ComplexField y = test_util::random_grid_field(s.grid, 600 + static_cast<unsigned>(trial));
        cdouble lhs = inner(y.values, A.apply(x).values);
        cdouble rhs = inner(A.apply_adjoint(y).values, x.values);
        CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-12);
    }
}

TEST_CASE("zero potential: identity system, immediate exit") {
    Setup s;
    InteriorOperator G(s.grid, s.k);
    SensorOperator Gs(s.grid, s.sensors, s.k);
    ScatteringPotential f0 = ScatteringPotential::zeros(s.grid);
    ComplexField u_in = incident_field(s.source, s.grid);
    ComplexField u_in_s = incident_field(s.source, s.sensors, 2);

    ForwardRecord rec = solve_forward(G, Gs, f0, u_in, u_in_s, {});
    CHECK(rec.k_eff == 0);
    CHECK(rec.gamma.empty());
    CHECK(rec.residual_norm == 0.0);
    CHECK(rec.u_hat.values == u_in_s.values);
    CHECK(rec.u_final.values == u_in.values);
}

TEST_CASE("record invariants and convergence on a scattering cylinder") {
    Setup s;
    InteriorOperator G(s.grid, s.k);
    SensorOperator Gs(s.grid, s.sensors, s.k);
    ScatteringPotential f = make_ball(s.grid, {0.0, 0.01, 0}, 0.075, 0.2, s.k);
    ComplexField u_in = incident_field(s.source, s.grid);
    ComplexField u_in_s = incident_field(s.source, s.sensors, 2);

    ForwardOptions opts;
    opts.max_iters = 120;
    ForwardRecord rec = solve_forward(G, Gs, f, u_in, u_in_s, opts);

    CHECK(rec.k_eff > 0);
    CHECK(rec.gamma.size() == static_cast<std::size_t>(rec.k_eff));
    CHECK(rec.mu.size() == static_cast<std::size_t>(rec.k_eff));
    CHECK(rec.y.size() == rec.k_eff);
    CHECK(rec.mu[0] == -1.0);  // forced by t0 = 0
    for (double gk : rec.gamma) {
        CHECK(gk > 0.0);
        CHECK(std::isfinite(gk));
    }

    // Objective threshold satisfied within the budget.
    const double uin_sq = norm2sq(u_in.values);
    CHECK(rec.residual_norm * rec.residual_norm <= 5e-7 * uin_sq);

    // Endpoint residual not worse than the start (u0 = u_in).
    SystemOperator A(G, f);
    ComplexField r0 = A.apply(u_in);
    for (std::size_t i = 0; i < r0.values.size(); ++i) r0.values[i] -= u_in.values[i];
    CHECK(rec.residual_norm <= norm2(r0.values));

    // u_hat recomputable from its definition.
    ComplexField fu = rec.u_final;
    for (std::size_t i = 0; i < fu.values.size(); ++i) fu.values[i] *= f.values[i];
    ComplexField uh = Gs.apply(fu);
    for (std::size_t i = 0; i < uh.values.size(); ++i) uh.values[i] += u_in_s.values[i];
    CHECK(uh.values == rec.u_hat.values);

    // Determinism: bit-identical rerun.
    ForwardRecord rec2 = solve_forward(G, Gs, f, u_in, u_in_s, opts);
    CHECK(rec2.gamma == rec.gamma);
    CHECK(rec2.u_hat.values == rec.u_hat.values);
    CHECK(rec2.u_final.values == rec.u_final.values);

    // Replay with the snapshot potential reproduces u_hat bit for bit.
    ComplexField replay = replay_forward(G, Gs, rec, f, u_in, u_in_s);
    CHECK(replay.values == rec.u_hat.values);
}

TEST_CASE("gradient stopping rule discards the partial iteration") {
    Setup s;
    InteriorOperator G(s.grid, s.k);
    SensorOperator Gs(s.grid, s.sensors, s.k);
    ScatteringPotential f = make_ball(s.grid, {0.0, 0.0, 0}, 0.06, 0.1, s.k);
    ComplexField u_in = incident_field(s.source, s.grid);
    ComplexField u_in_s = incident_field(s.source, s.sensors, 2);

    ForwardOptions opts;
    opts.stop = ForwardStop::gradient;
    opts.max_iters = 400;
    opts.gradient_tol = -1.0;  // default 5e-7 ||u_in||
    ForwardRecord rec = solve_forward(G, Gs, f, u_in, u_in_s, opts);
    CHECK(rec.k_eff > 0);
    CHECK(rec.k_eff < 400);
    CHECK(rec.gamma.size() == static_cast<std::size_t>(rec.k_eff));
    CHECK(rec.residual_norm < 1e-3 * norm2(u_in.values));
}

TEST_CASE("replay of a zero-potential record under zero potential") {
    Setup s;
    InteriorOperator G(s.grid, s.k);
    SensorOperator Gs(s.grid, s.sensors, s.k);
    ScatteringPotential f0 = ScatteringPotential::zeros(s.grid);
    ComplexField u_in = incident_field(s.source, s.grid);
    ComplexField u_in_s = incident_field(s.source, s.sensors, 2);
    ForwardRecord rec = solve_forward(G, Gs, f0, u_in, u_in_s, {});
    ComplexField replay = replay_forward(G, Gs, rec, f0, u_in, u_in_s);
    CHECK(replay.values == u_in_s.values);
}

TEST_CASE("history spill to disk reproduces in-memory iterates") {
    Setup s;
    InteriorOperator G(s.grid, s.k);
    SensorOperator Gs(s.grid, s.sensors, s.k);
    ScatteringPotential f = make_ball(s.grid, {0.0, 0.0, 0}, 0.05, 0.15, s.k);
    ComplexField u_in = incident_field(s.source, s.grid);
    ComplexField u_in_s = incident_field(s.source, s.sensors, 2);

    ForwardOptions mem_opts;
    mem_opts.max_iters = 12;
    mem_opts.stop = ForwardStop::gradient;
    mem_opts.gradient_tol = 1e-300;
    ForwardRecord mem = solve_forward(G, Gs, f, u_in, u_in_s, mem_opts);

    auto dir = std::filesystem::temp_directory_path() / "seagle_spill_test";
    std::filesystem::remove_all(dir);
    ForwardOptions disk_opts = mem_opts;
    disk_opts.spill_dir = dir.string();
    ForwardRecord disk = solve_forward(G, Gs, f, u_in, u_in_s, disk_opts);

    CHECK(disk.y.on_disk());
    REQUIRE(disk.k_eff == mem.k_eff);
    for (int k = 0; k < mem.k_eff; ++k) {
        CHECK(disk.y.get(k).values == mem.y.get(k).values);
        CHECK(disk.w.get(k).values == mem.w.get(k).values);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("endpoint residual never exceeds the initial residual, random potentials") {
    // Accelerated iterations are not monotone per step; the contract is
    // endpoint vs start, for any contrast up to 1.
    Setup s;
    Grid grid = Grid::centered2d(16, 16, 0.0096);
    InteriorOperator G(grid, s.k);
    SensorArray sensors;
    sensors.points = {{0.3, 0.0, 0}};
    SensorOperator Gs(grid, sensors, s.k);
    SourceSpec src = SourceSpec::point({-0.3, 0.0, 0}, s.k);
    ComplexField u_in = incident_field(src, grid);
    ComplexField u_in_s = incident_field(src, sensors, 2);

    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        ScatteringPotential f = ScatteringPotential::zeros(grid);
        test_util::Rng rng(seed);
        const double k2 = s.k * s.k;
        for (double& v : f.values) v = 2.0 * k2 * rng.uniform();  // contrast <= 1

        ForwardOptions opts;
        opts.max_iters = 50;
        ForwardRecord rec = solve_forward(G, Gs, f, u_in, u_in_s, opts);

        SystemOperator A(G, f);
        ComplexField r0 = A.apply(u_in);
        for (std::size_t i = 0; i < r0.values.size(); ++i) r0.values[i] -= u_in.values[i];
        CHECK(rec.residual_norm <= norm2(r0.values) * (1.0 + 1e-12));
        for (double g : rec.gamma) CHECK(g > 0.0);
    }
}

TEST_CASE("warm start override is honored and replays exactly") {
    Setup s;
    InteriorOperator G(s.grid, s.k);
    SensorOperator Gs(s.grid, s.sensors, s.k);
    ScatteringPotential f = make_ball(s.grid, {0.0, 0.0, 0}, 0.06, 0.15, s.k);
    ComplexField u_in = incident_field(s.source, s.grid);
    ComplexField u_in_s = incident_field(s.source, s.sensors, 2);

    ForwardOptions cold;
    cold.max_iters = 200;
    ForwardRecord first = solve_forward(G, Gs, f, u_in, u_in_s, cold);
    REQUIRE(first.k_eff > 2);

    // Restarting from the converged field finishes much faster.
    ForwardOptions warm = cold;
    warm.warm_start = first.u_final;
    ForwardRecord second = solve_forward(G, Gs, f, u_in, u_in_s, warm);
    CHECK(second.k_eff < first.k_eff);
    CHECK(second.residual_norm * second.residual_norm <= 5e-7 * norm2sq(u_in.values));

    // The replay of a warm-started record reproduces its u_hat bit for bit.
    ComplexField replay = replay_forward(G, Gs, second, f, u_in, u_in_s);
    CHECK(replay.values == second.u_hat.values);
}
