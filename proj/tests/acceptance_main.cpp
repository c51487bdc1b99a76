// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Individual criteria can be selected with --only N.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

#include "seagle/configio.hpp"
#include "seagle/inverse.hpp"
#include "seagle/oracle.hpp"
#include "seagle/potential.hpp"
#include "seagle/regularization.hpp"

using namespace seagle;
using std::numbers::pi;

namespace {

const double kLambda = 0.0749;
const double kWavenumber = 2.0 * pi / kLambda;

struct Harness {
    int failures = 0;
    int selected = 0;  // 0 = all

    bool wants(int n) const { return selected == 0 || selected == n; }

    void report(int n, const char* name, bool pass, const std::string& detail) {
        std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", n, name,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
};

std::vector<cdouble> random_complex(std::size_t n, std::uint64_t seed) {
    std::vector<cdouble> v(n);
    std::uint64_t s = seed * 6364136223846793005ull + 1442695040888963407ull;
    auto next = [&s]() {
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        return static_cast<double>((s * 0x2545f4914f6cdd1dull) >> 11) * 0x1.0p-53 - 0.5;
    };
    for (cdouble& z : v) z = {next(), next()};
    return v;
}

double rel_err(const std::vector<cdouble>& got, const std::vector<cdouble>& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        num += std::norm(got[i] - want[i]);
        den += std::norm(want[i]);
    }
    return std::sqrt(num / den);
}

// Squared-ratio error, the printed normalized error convention.
double norm_err_sq(const std::vector<cdouble>& got, const std::vector<cdouble>& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        num += std::norm(got[i] - want[i]);
        den += std::norm(want[i]);
    }
    return num / den;
}

char buf[512];

// ---------------------------------------------------------------- criterion 1
void criterion_operator_correctness(Harness& h) {
    double worst_fft = 0.0, worst_adj = 0.0;
    auto exercise = [&](const Grid& g) {
        InteriorOperator G(g, kWavenumber);
        ComplexField w = ComplexField::on_grid(g);
        w.values = random_complex(g.num_samples(), 7 + g.num_samples());
        ComplexField fast = G.apply(w);
        ComplexField slow = direct_convolution_oracle(g, kWavenumber, w);
        worst_fft = std::max(worst_fft, rel_err(fast.values, slow.values));
        for (int trial = 0; trial < 5; ++trial) {
            ComplexField x = ComplexField::on_grid(g);
            ComplexField y = ComplexField::on_grid(g);
            x.values = random_complex(g.num_samples(), 31 + trial);
            y.values = random_complex(g.num_samples(), 57 + trial);
            cdouble lhs = inner(y.values, G.apply(x).values);
            cdouble rhs = inner(G.apply(y, true).values, x.values);
            worst_adj = std::max(worst_adj, std::abs(lhs - rhs) / std::abs(lhs));
        }
    };
    exercise(Grid::centered2d(8, 8, 0.0048));
    exercise(Grid::centered2d(16, 16, 0.0048));
    exercise(Grid::centered3d(8, 8, 8, 0.006));

    std::snprintf(buf, sizeof(buf), "fft-vs-direct %.2e (<1e-10), adjoint %.2e (<1e-12)",
                  worst_fft, worst_adj);
    h.report(1, "operator correctness", worst_fft < 1e-10 && worst_adj < 1e-12, buf);
}

// ---------------------------------------------------------------- criterion 2
void criterion_forward_convergence(Harness& h) {
    Grid grid = Grid::centered2d(128, 128, 0.0048);
    InteriorOperator G(grid, kWavenumber);
    SensorArray sensors;
    for (int i = 0; i < 64; ++i) {
        const double a = 2.0 * pi * i / 64;
        sensors.points.push_back({0.55 * std::cos(a), 0.55 * std::sin(a), 0});
    }
    SensorOperator Gs(grid, sensors, kWavenumber);
    // The reference cylinder setup scaled from its 250-point grid onto
    // 128 points: the 6-wavelength diameter shrinks proportionally.
    const double radius = 3.0 * kLambda * (128.0 / 250.0);
    HomogeneousScatterer cyl{HomogeneousScatterer::Shape::cylinder, radius, std::sqrt(1.2),
                             {0, 0, 0}};
    ScatteringPotential f = cyl.rasterize(grid, kWavenumber);
    SourceSpec src = SourceSpec::point({-0.6, 0.0, 0}, kWavenumber);
    ComplexField u_in = incident_field(src, grid);
    ComplexField u_in_s = incident_field(src, sensors, 2);

    ForwardOptions opts;
    opts.max_iters = 120;
    opts.stop = ForwardStop::objective;
    opts.objective_tol_rel = 5e-7;
    opts.record_history = false;
    ForwardRecord rec = solve_forward(G, Gs, f, u_in, u_in_s, opts);

    const double ratio = rec.residual_norm * rec.residual_norm / norm2sq(u_in.values);
    std::snprintf(buf, sizeof(buf), "K_eff=%d, ||A u - u_in||^2 / ||u_in||^2 = %.2e (<=5e-7)",
                  rec.k_eff, ratio);
    h.report(2, "forward convergence at 20% contrast, 128x128, K<=120",
             rec.k_eff <= 120 && ratio <= 5e-7, buf);
}

// ---------------------------------------------------------------- criterion 3
void criterion_forward_accuracy_ordering(Harness& h) {
    Grid grid = Grid::centered2d(128, 128, 0.0048);
    InteriorOperator G(grid, kWavenumber);
    SensorArray sensors;
    for (int i = 0; i < 64; ++i) {
        const double a = 2.0 * pi * i / 64;
        sensors.points.push_back({0.55 * std::cos(a), 0.55 * std::sin(a), 0});
    }
    SensorOperator Gs(grid, sensors, kWavenumber);
    SourceSpec src = SourceSpec::point({-0.6, 0.0, 0}, kWavenumber);
    ComplexField u_in = incident_field(src, grid);
    ComplexField u_in_s = incident_field(src, sensors, 2);
    std::vector<std::array<double, 3>> pts(sensors.points.begin(), sensors.points.end());

    const std::vector<double> contrasts{0.01, 0.05, 0.10, 0.20, 0.50, 1.00};
    std::vector<double> seagle_err, born_err, rytov_err;
    for (double c : contrasts) {
        HomogeneousScatterer cyl{HomogeneousScatterer::Shape::cylinder, 3.0 * kLambda,
                                 std::sqrt(1.0 + c), {0, 0, 0}};
        ScatteringPotential f = cyl.rasterize(grid, kWavenumber);
        ComplexField truth = analytic_field(cyl, src, pts, kWavenumber);

        ForwardOptions opts;
        opts.max_iters = 4000;
        opts.objective_tol_rel = 5e-7;
        opts.record_history = false;
        ForwardRecord rec = solve_forward(G, Gs, f, u_in, u_in_s, opts);
        seagle_err.push_back(norm_err_sq(rec.u_hat.values, truth.values));

        ComplexField born = forward_born(Gs, u_in, u_in_s, f);
        born_err.push_back(norm_err_sq(born.values, truth.values));

        ComplexField phi = forward_rytov(Gs, u_in, u_in_s, f);
        ComplexField ryt = rytov_field(phi, u_in_s);
        rytov_err.push_back(norm_err_sq(ryt.values, truth.values));
    }

    bool ordering_20 = seagle_err[3] < born_err[3] && seagle_err[3] < rytov_err[3];
    bool seagle_bounded = true;
    for (double e : seagle_err) seagle_bounded = seagle_bounded && e < 1e-1 && std::isfinite(e);
    bool born_blows_up = born_err.back() > 1e-1;
    bool born_monotone = true;
    for (std::size_t i = 1; i < born_err.size(); ++i)
        born_monotone = born_monotone && born_err[i] > born_err[i - 1];
    // Regression anchors pinned from the first validated run (measured
    // 2.56e-6 at 20% and 6.48e-04 at 100%), with 3x headroom.
    bool anchors = seagle_err[3] < 1e-5 && seagle_err.back() < 2e-3;

    // 3D spot check: sphere of one-wavelength radius at 20% contrast.
    Grid g3 = Grid::centered3d(64, 64, 64, 0.006);
    InteriorOperator G3(g3, kWavenumber);
    SensorArray s3;
    for (int i = 0; i < 32; ++i) {
        const double a = 2.0 * pi * i / 32;
        s3.points.push_back({0.42 * std::cos(a), 0.42 * std::sin(a), 0.0});
    }
    SensorOperator Gs3(g3, s3, kWavenumber);
    HomogeneousScatterer sph{HomogeneousScatterer::Shape::sphere, kLambda, std::sqrt(1.2),
                             {0, 0, 0}};
    ScatteringPotential f3 = sph.rasterize(g3, kWavenumber);
    SourceSpec src3 = SourceSpec::point({-0.55, 0.0, 0.0}, kWavenumber);
    ComplexField u_in3 = incident_field(src3, g3);
    ComplexField u_in_s3 = incident_field(src3, s3, 3);
    ForwardOptions o3;
    o3.max_iters = 200;
    o3.objective_tol_rel = 5e-7;
    o3.record_history = false;
    ForwardRecord rec3 = solve_forward(G3, Gs3, f3, u_in3, u_in_s3, o3);
    std::vector<std::array<double, 3>> pts3(s3.points.begin(), s3.points.end());
    ComplexField truth3 = analytic_field(sph, src3, pts3, kWavenumber);
    double err3 = norm_err_sq(rec3.u_hat.values, truth3.values);
    ComplexField born3 = forward_born(Gs3, u_in3, u_in_s3, f3);
    double born3_err = norm_err_sq(born3.values, truth3.values);
    bool spot3d = err3 < born3_err && err3 < 1e-1;

    std::snprintf(buf, sizeof(buf),
                  "20%%: seagle %.2e born %.2e rytov %.2e; 100%%: seagle %.2e born %.2e; "
                  "3D 64^3: seagle %.2e born %.2e",
                  seagle_err[3], born_err[3], rytov_err[3], seagle_err.back(), born_err.back(),
                  err3, born3_err);
    h.report(3, "forward accuracy ordering vs analytic series",
             ordering_20 && seagle_bounded && born_blows_up && born_monotone && spot3d && anchors,
             buf);
}

// ---------------------------------------------------------------- criterion 4
void criterion_gradient_exactness(Harness& h) {
    Grid grid = Grid::centered2d(8, 8, 0.5);
    const double k = 1.0;
    InteriorOperator G(grid, k);
    SensorArray sensors;
    sensors.points = {{4.0, 1.0, 0}, {4.0, -1.0, 0}, {-4.0, 1.5, 0}, {-4.0, -1.5, 0}};
    SensorOperator Gs(grid, sensors, k);
    ScatteringPotential f = ScatteringPotential::zeros(grid);
    {
        auto noise = random_complex(f.values.size(), 1234);
        for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = 0.8 * noise[i].real();
    }
    MeasurementSet ms;
    ms.sensors = sensors;
    std::vector<SourceSpec> sources = {SourceSpec::point({-6.0, 0.5, 0}, k),
                                       SourceSpec::point({0.5, 6.0, 0}, k)};
    for (std::size_t s = 0; s < sources.size(); ++s) {
        ComplexField u_in_s = incident_field(sources[s], sensors, 2);
        ComplexField m = u_in_s;
        for (std::size_t i = 0; i < m.values.size(); ++i)
            m.values[i] *= 1.05 + 0.1 * static_cast<double>(i + s);
        ms.entries.push_back({sources[s], m});
    }

    ForwardOptions opts;
    opts.max_iters = 5;
    opts.stop = ForwardStop::gradient;
    opts.gradient_tol = 1e-300;
    FidelityResult fid = data_fidelity(G, Gs, f, ms, opts);
    RealField grad = data_gradient(G, Gs, f, ms, fid.records);

    double worst = 0.0;
    for (std::size_t j = 0; j < f.values.size(); ++j) {
        const double hstep = 1e-6 * (1.0 + std::abs(f.values[j]));
        double fd = fd_gradient(G, Gs, f, ms, fid.records, j, hstep);
        worst = std::max(worst, std::abs(grad.values[j] - fd) / std::max(std::abs(fd), 1e-12));
    }

    // Observed O(h^2): halving h divides the FD truncation error by ~4.
    int quadratic = 0;
    {
        const std::size_t j = 27;
        double hstep = 0.5, prev = -1.0;
        for (int level = 0; level < 4; ++level) {
            double fd = fd_gradient(G, Gs, f, ms, fid.records, j, hstep);
            double err = std::abs(fd - grad.values[j]);
            if (prev > 0.0 && prev / err > 3.0 && prev / err < 5.0) ++quadratic;
            prev = err;
            hstep *= 0.5;
        }
    }

    std::snprintf(buf, sizeof(buf), "max component rel err %.2e (<1e-6), O(h^2) ratios seen %d/3",
                  worst, quadratic);
    h.report(4, "gradient exactness vs frozen-replay finite differences",
             worst < 1e-6 && quadratic >= 2, buf);
}

// ---------------------------------------------------------------- criterion 5
void criterion_cross_oracle(Harness& h) {
    HomogeneousScatterer cyl{HomogeneousScatterer::Shape::cylinder, 3.0 * kLambda,
                             std::sqrt(1.1), {0, 0, 0}};
    SourceSpec src = SourceSpec::point({-0.6, 0.0, 0}, kWavenumber);
    SensorArray sensors;
    for (int i = 0; i < 64; ++i) {
        const double a = 2.0 * pi * i / 64;
        sensors.points.push_back({0.55 * std::cos(a), 0.55 * std::sin(a), 0});
    }
    std::vector<std::array<double, 3>> pts(sensors.points.begin(), sensors.points.end());
    ComplexField truth = analytic_field(cyl, src, pts, kWavenumber);

    auto solve_at = [&](int n, double pixel) {
        Grid grid = Grid::centered2d(n, n, pixel);
        InteriorOperator G(grid, kWavenumber);
        SensorOperator Gs(grid, sensors, kWavenumber);
        ScatteringPotential f = cyl.rasterize(grid, kWavenumber);
        ComplexField u_in = incident_field(src, grid);
        DirectSolveResult sol = direct_solve(G, f, u_in, 1e-8, 20000);
        ComplexField fu = sol.u;
        for (std::size_t i = 0; i < fu.values.size(); ++i) fu.values[i] *= f.values[i];
        ComplexField u_hat = Gs.apply(fu);
        ComplexField u_in_s = incident_field(src, sensors, 2);
        for (std::size_t i = 0; i < u_hat.values.size(); ++i)
            u_hat.values[i] += u_in_s.values[i];
        return rel_err(u_hat.values, truth.values);
    };

    const double coarse = solve_at(128, 0.0048);
    const double fine = solve_at(256, 0.0024);
    std::snprintf(buf, sizeof(buf), "rel err %.2e at 128^2 (<1e-3), %.2e at 256^2 (decreasing)",
                  coarse, fine);
    h.report(5, "direct Krylov solve vs analytic series, 10% cylinder",
             coarse < 1e-3 && fine < coarse, buf);
}

// ---------------------------------------------------------------- criterion 6
void criterion_tv_prox(Harness& h) {
    bool pass = true;
    std::string detail;

    // 2x2 brute force.
    {
        Grid g2 = Grid::centered2d(2, 2, 1.0);
        RealField g{g2, {1.0, -0.5, 0.25, 0.75}};
        const double alpha = 0.5;
        ProxResult pr = tv_prox(g, alpha, ConstraintSet::none(), 20000, 1e-14);
        auto objective = [&](const std::array<double, 4>& x) {
            double quad = 0.0;
            for (std::size_t i = 0; i < 4; ++i) {
                double d = x[i] - g.values[i];
                quad += 0.5 * d * d;
            }
            RealField fx{g2, {x[0], x[1], x[2], x[3]}};
            return quad + alpha * tv_value(fx);
        };
        std::array<double, 4> best{g.values[0], g.values[1], g.values[2], g.values[3]};
        double range = 2.0;
        for (int level = 0; level < 40; ++level) {
            std::array<double, 4> center = best;
            double best_val = objective(best);
            for (int i0 = -4; i0 <= 4; ++i0)
                for (int i1 = -4; i1 <= 4; ++i1)
                    for (int i2 = -4; i2 <= 4; ++i2)
                        for (int i3 = -4; i3 <= 4; ++i3) {
                            std::array<double, 4> cand{
                                center[0] + range * i0 / 4, center[1] + range * i1 / 4,
                                center[2] + range * i2 / 4, center[3] + range * i3 / 4};
                            double v = objective(cand);
                            if (v < best_val) {
                                best_val = v;
                                best = cand;
                            }
                        }
            range *= 0.45;
        }
        double dist = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            dist = std::max(dist, std::abs(pr.image.values[i] - best[i]));
        pass = pass && dist < 1e-4;
        detail += "oracle dist " + std::to_string(dist);
    }

    // Identity at alpha -> 0.
    {
        Grid g4 = Grid::centered2d(4, 4, 1.0);
        RealField g{g4, {}};
        auto noise = random_complex(16, 5);
        for (const auto& z : noise) g.values.push_back(z.real());
        ProxResult pr = tv_prox(g, 1e-15, ConstraintSet::none(), 200, 1e-12);
        double dist = 0.0;
        for (std::size_t i = 0; i < 16; ++i)
            dist = std::max(dist, std::abs(pr.image.values[i] - g.values[i]));
        pass = pass && dist < 1e-10;
    }

    // Objective decrease on random 32x32.
    {
        Grid g32 = Grid::centered2d(32, 32, 1.0);
        RealField g{g32, {}};
        auto noise = random_complex(32 * 32, 9);
        for (const auto& z : noise) g.values.push_back(z.real());
        const double alpha = 0.2;
        ProxResult pr = tv_prox(g, alpha, ConstraintSet::none(), 200, 1e-8);
        double quad = 0.0;
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            double d = pr.image.values[i] - g.values[i];
            quad += 0.5 * d * d;
        }
        double obj = quad + alpha * tv_value(pr.image);
        double obj_at_g = alpha * tv_value(g);
        pass = pass && obj <= obj_at_g + 1e-12;
    }

    h.report(6, "tv prox oracle agreement, identity limit, objective decrease", pass, detail);
}

// ---------------------------------------------------------------- criterion 7
void criterion_end_to_end(Harness& h) {
    ExperimentConfig cfg = parse_config(R"({"preset": "shepp-logan-64"})");
    cfg.jobs = 2;
    cfg.reconstruction.jobs = 2;

    InteriorOperator G(cfg.grid, cfg.wavenumber);
    SensorOperator Gs(cfg.grid, cfg.sensors, cfg.wavenumber);
    ScatteringPotential truth = cfg.build_phantom(cfg.grid);

    Grid fine = cfg.fine_grid();
    ScatteringPotential f_fine = cfg.build_phantom(fine);
    SynthesisOptions syn;
    syn.seed = cfg.seed;
    syn.direct_tol = cfg.direct_tol;
    std::printf("    [criterion 7] synthesizing measurements on %dx%d...\n", fine.counts[0],
                fine.counts[1]);
    std::fflush(stdout);
    MeasurementSet ms = synthesize_measurements(f_fine, cfg.sources, cfg.sensors, cfg.grid, syn);

    ReconstructionConfig rc = cfg.reconstruction;
    rc.tau = *cfg.tau_relative * ms.stacked_norm_sq();

    auto run_model = [&](ForwardModel model) {
        ReconstructionConfig local = rc;
        local.model = model;
        return reconstruct(G, Gs, local, ms, &truth);
    };

    std::printf("    [criterion 7] reconstructing (seagle)...\n");
    std::fflush(stdout);
    ReconstructionResult seagle_run = run_model(ForwardModel::seagle);
    std::printf("    [criterion 7] reconstructing (born)...\n");
    std::fflush(stdout);
    ReconstructionResult born_run = run_model(ForwardModel::born);
    std::printf("    [criterion 7] reconstructing (rytov)...\n");
    std::fflush(stdout);
    ReconstructionResult rytov_run = run_model(ForwardModel::rytov);

    const double es = seagle_run.history.rows.back().norm_error;
    const double eb = born_run.history.rows.back().norm_error;
    const double er = rytov_run.history.rows.back().norm_error;

    bool fits_decreasing = true;
    const auto& rows = seagle_run.history.rows;
    for (std::size_t i = 1; i < rows.size(); ++i)
        fits_decreasing = fits_decreasing &&
                          rows[i].norm_data_fit <= rows[i - 1].norm_data_fit * 1.001;
    fits_decreasing = fits_decreasing && rows.back().norm_data_fit < rows.front().norm_data_fit;

    // Regression anchors pinned from the first validated run (measured
    // 0.303 / 0.595 / 0.506 normalized error and final fit 1.30e-4).
    bool anchors = es < 0.40 && eb > 0.45 && er > 0.40 && rows.back().norm_data_fit < 1e-3;

    std::snprintf(buf, sizeof(buf),
                  "norm err: seagle %.4f born %.4f rytov %.4f; seagle fit %.3e -> %.3e",
                  es, eb, er, rows.front().norm_data_fit, rows.back().norm_data_fit);
    h.report(7, "end-to-end inversion ordering at equal budgets",
             es < eb && es < er && fits_decreasing && anchors, buf);
}

// ---------------------------------------------------------------- criterion 8
void criterion_trivial_physics(Harness& h) {
    Grid grid = Grid::centered2d(16, 16, 0.012);
    InteriorOperator G(grid, kWavenumber);
    SensorArray sensors;
    sensors.points = {{0.35, 0.0, 0}, {0.0, 0.35, 0}, {-0.35, 0.0, 0}};
    SensorOperator Gs(grid, sensors, kWavenumber);
    SourceSpec src = SourceSpec::point({-0.5, 0.0, 0}, kWavenumber);
    ComplexField u_in = incident_field(src, grid);
    ComplexField u_in_s = incident_field(src, sensors, 2);

    bool pass = true;

    // f = 0 -> u_hat equals the incident field exactly.
    ScatteringPotential f0 = ScatteringPotential::zeros(grid);
    ForwardRecord rec = solve_forward(G, Gs, f0, u_in, u_in_s, {});
    pass = pass && rec.u_hat.values == u_in_s.values && rec.residual_norm == 0.0;

    // Zero gradient at u_hat = m, exactly.
    ScatteringPotential f = make_ball(grid, {0.0, 0.0, 0}, 0.05, 0.1, kWavenumber);
    ForwardOptions opts;
    opts.max_iters = 20;
    MeasurementSet ms;
    ms.sensors = sensors;
    ms.entries.push_back({src, u_in_s});
    FidelityResult pre = data_fidelity(G, Gs, f, ms, opts);
    ms.entries[0].m = pre.records[0].u_hat;
    FidelityResult fid = data_fidelity(G, Gs, f, ms, opts);
    RealField grad = data_gradient(G, Gs, f, ms, fid.records);
    pass = pass && fid.value == 0.0;
    for (double v : grad.values) pass = pass && v == 0.0;

    // Zero TV for constants, exactly.
    RealField c{grid, std::vector<double>(grid.num_samples(), 4.2)};
    pass = pass && tv_value(c) == 0.0;

    h.report(8, "trivial physics exact to machine precision", pass, "");
}

}  // namespace

int main(int argc, char** argv) {
    Harness h;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) h.selected = std::atoi(argv[i + 1]);

    if (h.wants(1)) criterion_operator_correctness(h);
    if (h.wants(2)) criterion_forward_convergence(h);
    if (h.wants(3)) criterion_forward_accuracy_ordering(h);
    if (h.wants(4)) criterion_gradient_exactness(h);
    if (h.wants(5)) criterion_cross_oracle(h);
    if (h.wants(6)) criterion_tv_prox(h);
    if (h.wants(7)) criterion_end_to_end(h);
    if (h.wants(8)) criterion_trivial_physics(h);

    if (h.failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) failed\n", h.failures);
    return h.failures == 0 ? 0 : 1;
}
