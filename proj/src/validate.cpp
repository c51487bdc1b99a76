#include "seagle/validate.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "seagle/inverse.hpp"
#include "seagle/oracle.hpp"
#include "seagle/potential.hpp"

namespace seagle {

bool ValidationReport::all_passed() const {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return !rows.empty();
}

std::string ValidationReport::to_table() const {
    std::ostringstream os;
    os << "suite: " << suite << "\n";
    char line[160];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof(line), "  [%s] %-52s measured %.3e  threshold %.3e\n",
                      r.pass ? "PASS" : "FAIL", r.check.c_str(), r.measured, r.threshold);
        os << line;
    }
    os << (all_passed() ? "result: PASS" : "result: FAIL") << "\n";
    return os.str();
}

namespace {

using std::numbers::pi;

void push(ValidationReport& rep, const std::string& check, double measured, double threshold) {
    rep.rows.push_back({check, measured, threshold, measured < threshold});
}

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

struct GradientInstance {
    Grid grid;
    ScatteringPotential f;
    MeasurementSet ms;
};

ValidationReport suite_green_ops() {
    ValidationReport rep{"green-ops", {}};
    const double k = 2.0 * pi / 0.0749;

    for (int n : {8, 16}) {
        Grid grid = Grid::centered2d(n, n, 0.0048);
        InteriorOperator G(grid, k);
        ComplexField w = ComplexField::on_grid(grid);
        w.values = random_complex(grid.num_samples(), 11 + static_cast<std::uint64_t>(n));
        ComplexField fast = G.apply(w);
        ComplexField slow = direct_convolution_oracle(grid, k, w);
        double num = 0.0;
        for (std::size_t i = 0; i < fast.values.size(); ++i)
            num += std::norm(fast.values[i] - slow.values[i]);
        push(rep, "fft vs direct sum, " + std::to_string(n) + "x" + std::to_string(n),
             std::sqrt(num / norm2sq(slow.values)), 1e-10);
    }
    {
        Grid grid = Grid::centered3d(8, 8, 8, 0.006);
        InteriorOperator G(grid, k);
        ComplexField w = ComplexField::on_grid(grid);
        w.values = random_complex(grid.num_samples(), 29);
        ComplexField fast = G.apply(w);
        ComplexField slow = direct_convolution_oracle(grid, k, w);
        double num = 0.0;
        for (std::size_t i = 0; i < fast.values.size(); ++i)
            num += std::norm(fast.values[i] - slow.values[i]);
        push(rep, "fft vs direct sum, 8^3", std::sqrt(num / norm2sq(slow.values)), 1e-10);
    }
    {
        Grid grid = Grid::centered2d(12, 12, 0.0048);
        InteriorOperator G(grid, k);
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            ComplexField x = ComplexField::on_grid(grid);
            ComplexField y = ComplexField::on_grid(grid);
            x.values = random_complex(grid.num_samples(), 100 + static_cast<std::uint64_t>(trial));
            y.values = random_complex(grid.num_samples(), 200 + static_cast<std::uint64_t>(trial));
            cdouble lhs = inner(y.values, G.apply(x).values);
            cdouble rhs = inner(G.apply(y, true).values, x.values);
            worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
        }
        push(rep, "interior adjoint identity", worst, 1e-12);
    }
    return rep;
}

/// The random small instance shared by the gradient oracle checks:
/// nondimensional units (k = 1) so h = 1e-6 (1 + |f_j|) is well conditioned
/// for every component.
GradientInstance make_gradient_instance() {
    GradientInstance inst;
    const double k = 1.0;
    inst.grid = Grid::centered2d(8, 8, 0.5);
    inst.f = ScatteringPotential::zeros(inst.grid);
    auto noise = random_complex(inst.f.values.size(), 1234);
    for (std::size_t i = 0; i < inst.f.values.size(); ++i)
        inst.f.values[i] = 0.8 * noise[i].real();

    inst.ms.sensors.points = {{4.0, 1.0, 0}, {4.0, -1.0, 0}, {-4.0, 1.5, 0}, {-4.0, -1.5, 0}};
    std::vector<SourceSpec> sources = {SourceSpec::point({-6.0, 0.5, 0}, k),
                                       SourceSpec::point({0.5, 6.0, 0}, k)};
    for (std::size_t s = 0; s < sources.size(); ++s) {
        ComplexField u_in_s = incident_field(sources[s], inst.ms.sensors, inst.grid.dim);
        ComplexField m = u_in_s;
        for (std::size_t i = 0; i < m.values.size(); ++i)
            m.values[i] *= 1.05 + 0.1 * static_cast<double>(i + s);  // synthetic mismatch
        inst.ms.entries.push_back({sources[s], m});
    }
    return inst;
}

ValidationReport suite_gradient() {
    ValidationReport rep{"gradient", {}};
    GradientInstance inst = make_gradient_instance();
    InteriorOperator G(inst.grid, 1.0);
    SensorOperator Gs(inst.grid, inst.ms.sensors, 1.0);

    ForwardOptions opts;
    opts.max_iters = 5;
    opts.stop = ForwardStop::gradient;
    opts.gradient_tol = 1e-300;  // run all 5 iterations
    FidelityResult fid = data_fidelity(G, Gs, inst.f, inst.ms, opts);
    RealField grad = data_gradient(G, Gs, inst.f, inst.ms, fid.records);

    double worst = 0.0;
    for (std::size_t j = 0; j < inst.f.values.size(); ++j) {
        const double h = 1e-6 * (1.0 + std::abs(inst.f.values[j]));
        double fd = fd_gradient(G, Gs, inst.f, inst.ms, fid.records, j, h);
        double denom = std::max(std::abs(fd), 1e-12);
        worst = std::max(worst, std::abs(grad.values[j] - fd) / denom);
    }
    push(rep, "backpropagated vs finite-difference gradient", worst, 1e-6);
    return rep;
}

ValidationReport suite_forward_analytic() {
    ValidationReport rep{"forward-analytic", {}};
    const double lambda = 0.0749;
    const double k = 2.0 * pi / lambda;
    Grid grid = Grid::centered2d(64, 64, 0.0096);
    InteriorOperator G(grid, k);
    SensorArray sensors;
    for (int i = 0; i < 64; ++i) {
        const double a = 2.0 * pi * i / 64;
        sensors.points.push_back({0.5 * std::cos(a), 0.5 * std::sin(a), 0});
    }
    SensorOperator Gs(grid, sensors, k);
    SourceSpec src = SourceSpec::point({-0.6, 0.0, 0}, k);
    ComplexField u_in = incident_field(src, grid);
    ComplexField u_in_s = incident_field(src, sensors, grid.dim);

    {
        // Zero contrast is exact.
        ScatteringPotential f0 = ScatteringPotential::zeros(grid);
        ForwardOptions opts;
        ForwardRecord rec = solve_forward(G, Gs, f0, u_in, u_in_s, opts);
        double num = 0.0;
        for (std::size_t i = 0; i < rec.u_hat.values.size(); ++i)
            num += std::norm(rec.u_hat.values[i] - u_in_s.values[i]);
        push(rep, "zero contrast: u_hat equals incident", std::sqrt(num / norm2sq(u_in_s.values)),
             1e-14);
    }
    {
        HomogeneousScatterer cyl{HomogeneousScatterer::Shape::cylinder, 1.5 * lambda,
                                 std::sqrt(1.1), {0, 0, 0}};
        ScatteringPotential f = cyl.rasterize(grid, k);
        ForwardOptions opts;
        opts.max_iters = 2000;
        ForwardRecord rec = solve_forward(G, Gs, f, u_in, u_in_s, opts);
        std::vector<std::array<double, 3>> pts(sensors.points.begin(), sensors.points.end());
        ComplexField truth = analytic_field(cyl, src, pts, k);
        double num = 0.0;
        for (std::size_t i = 0; i < truth.values.size(); ++i)
            num += std::norm(rec.u_hat.values[i] - truth.values[i]);
        push(rep, "10% cylinder vs analytic series", num / norm2sq(truth.values), 1e-2);
    }
    return rep;
}

ValidationReport suite_prox() {
    ValidationReport rep{"prox", {}};
    {
        Grid g2 = Grid::centered2d(2, 2, 1.0);
        RealField g{g2, {0.7, -1.3, 0.4, 2.1}};
        ProxResult pr = tv_prox(g, 1e-15, ConstraintSet::none(), 200, 1e-12);
        double worst = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            worst = std::max(worst, std::abs(pr.image.values[i] - g.values[i]));
        push(rep, "alpha -> 0 gives identity", worst, 1e-10);
    }
    {
        Grid g2 = Grid::centered2d(2, 2, 1.0);
        RealField g{g2, {1.0, -0.5, 0.25, 0.75}};
        const double alpha = 0.5;
        ProxResult pr = tv_prox(g, alpha, ConstraintSet::none(), 20000, 1e-14);

        // Nested coordinate grid search over the 4 unknowns.
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
            const int half = 4;
            for (int i0 = -half; i0 <= half; ++i0)
                for (int i1 = -half; i1 <= half; ++i1)
                    for (int i2 = -half; i2 <= half; ++i2)
                        for (int i3 = -half; i3 <= half; ++i3) {
                            std::array<double, 4> cand{center[0] + range * i0 / half,
                                                       center[1] + range * i1 / half,
                                                       center[2] + range * i2 / half,
                                                       center[3] + range * i3 / half};
                            double v = objective(cand);
                            if (v < best_val) {
                                best_val = v;
                                best = cand;
                            }
                        }
            range *= 0.45;
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            worst = std::max(worst, std::abs(pr.image.values[i] - best[i]));
        push(rep, "2x2 brute-force oracle distance", worst, 1e-4);
    }
    return rep;
}

ValidationReport suite_end_to_end() {
    ValidationReport rep{"end-to-end", {}};
    const double lambda = 0.0749;
    const double k = 2.0 * pi / lambda;
    Grid grid = Grid::centered2d(32, 32, 0.0096);
    InteriorOperator G(grid, k);
    SensorArray sensors;
    for (int i = 0; i < 40; ++i) {
        const double a = 2.0 * pi * i / 40;
        sensors.points.push_back({0.35 * std::cos(a), 0.35 * std::sin(a), 0});
    }
    SensorOperator Gs(grid, sensors, k);

    std::vector<SourceSpec> sources;
    for (int i = 0; i < 8; ++i) {
        const double a = 2.0 * pi * i / 8;
        sources.push_back(SourceSpec::point({0.45 * std::cos(a), 0.45 * std::sin(a), 0}, k));
    }

    HomogeneousScatterer cyl{HomogeneousScatterer::Shape::cylinder, lambda, std::sqrt(1.2),
                             {0.01, -0.015, 0}};
    Grid fine = Grid::centered2d(64, 64, 0.0048);
    ScatteringPotential f_fine = cyl.rasterize(fine, k);
    ScatteringPotential f_true = cyl.rasterize(grid, k);

    SynthesisOptions syn;
    syn.seed = 7;
    MeasurementSet ms = synthesize_measurements(f_fine, sources, sensors, grid, syn);

    ReconstructionConfig cfg;
    cfg.outer_iters = 12;
    cfg.tau = 1.5e-9 * ms.stacked_norm_sq();
    cfg.constraint = ConstraintSet::non_positive();
    cfg.forward.max_iters = 60;
    cfg.jobs = 2;

    cfg.model = ForwardModel::seagle;
    ReconstructionResult seagle_run = reconstruct(G, Gs, cfg, ms, &f_true);
    cfg.model = ForwardModel::born;
    ReconstructionResult born_run = reconstruct(G, Gs, cfg, ms, &f_true);

    const double err_seagle = seagle_run.history.rows.back().norm_error;
    const double err_born = born_run.history.rows.back().norm_error;
    push(rep, "seagle error below born error (ratio)", err_seagle / err_born, 1.0);
    push(rep, "seagle data fit decreased (final/initial)",
         seagle_run.history.rows.back().norm_data_fit /
             seagle_run.history.rows.front().norm_data_fit,
         1.0);
    return rep;
}

}  // namespace

std::vector<std::string> validation_suite_names() {
    return {"green-ops", "gradient", "forward-analytic", "prox", "end-to-end"};
}

ValidationReport run_validation_suite(const std::string& suite) {
    if (suite == "green-ops") return suite_green_ops();
    if (suite == "gradient") return suite_gradient();
    if (suite == "forward-analytic") return suite_forward_analytic();
    if (suite == "prox") return suite_prox();
    if (suite == "end-to-end") return suite_end_to_end();
    throw ConfigError("unknown validation suite '" + suite + "'");
}

}  // namespace seagle
