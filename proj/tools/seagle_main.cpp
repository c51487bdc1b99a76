// Command-line front end: forward solves, measurement synthesis,
// reconstruction and oracle validation, all driven by a JSON config.
//
// Exit codes are stable API: 0 success, 2 config error, 3 solver error,
// 4 inverse-crime refusal, 5 geometry mismatch.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "seagle/configio.hpp"
#include "seagle/gridio.hpp"
#include "seagle/manifest.hpp"
#include "seagle/parallel.hpp"
#include "seagle/serialize.hpp"
#include "seagle/validate.hpp"

namespace {

namespace fs = std::filesystem;
using namespace seagle;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitInverseCrime = 4;
constexpr int kExitGeometry = 5;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 0;
};

fs::path resolve_out(const std::string& out) {
    fs::path p(out);
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv("SEAGLE_OUT_ROOT")) return fs::path(root) / p;
    return p;
}

struct StageTimer {
    std::vector<std::pair<std::string, double>>& sink;
    std::string name;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    ~StageTimer() {
        sink.emplace_back(name,
                          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                              .count());
    }
};

ExperimentConfig load_and_finalize(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (args.jobs > 0) cfg.jobs = args.jobs;
    if (cfg.jobs <= 0) cfg.jobs = default_jobs();
    cfg.reconstruction.jobs = cfg.jobs;
    return cfg;
}

RunManifest manifest_for(const std::string& command, const ExperimentConfig& cfg,
                         const CommonArgs& args) {
    RunManifest m;
    m.command = command;
    m.config_hash = fnv1a_hex(cfg.canonical_json + ":" + std::to_string(cfg.seed));
    m.canonical_config = cfg.canonical_json;
    m.seed = cfg.seed;
    m.version = library_version();
    m.inputs.push_back(args.config_path);
    return m;
}

int cmd_forward(const CommonArgs& args) {
    ExperimentConfig cfg = load_and_finalize(args);
    const fs::path out = resolve_out(args.out_dir);
    fs::create_directories(out);
    RunManifest manifest = manifest_for("forward", cfg, args);

    ScatteringPotential f = cfg.build_phantom(cfg.grid);
    InteriorOperator green(cfg.grid, cfg.wavenumber);
    SensorOperator sensor_op(cfg.grid, cfg.sensors, cfg.wavenumber);

    std::vector<double> residuals(cfg.sources.size(), 0.0);
    std::vector<int> iterations(cfg.sources.size(), 0);
    {
        StageTimer timer{manifest.stage_seconds, "solve"};
        parallel_for_index(static_cast<int>(cfg.sources.size()), cfg.jobs, [&](int s) {
            const SourceSpec& src = cfg.sources[static_cast<std::size_t>(s)];
            src.validate_against(cfg.grid);
            ComplexField u_in = incident_field(src, cfg.grid);
            ComplexField u_in_s = incident_field(src, cfg.sensors, cfg.grid.dim);
            ForwardOptions opts = cfg.forward;
            opts.record_history = false;
            ForwardRecord rec = solve_forward(green, sensor_op, f, u_in, u_in_s, opts);
            char name[32];
            std::snprintf(name, sizeof(name), "u_hat_%03d", s);
            write_complex_field(out / name, rec.u_hat);
            std::snprintf(name, sizeof(name), "u_total_%03d", s);
            write_complex_field(out / name, rec.u_final);
            residuals[static_cast<std::size_t>(s)] = rec.residual_norm;
            iterations[static_cast<std::size_t>(s)] = rec.k_eff;
        });
    }

    {
        std::ofstream res(out / "residuals.csv");
        res << "source,k_eff,residual_norm\n";
        res.precision(17);
        for (std::size_t s = 0; s < residuals.size(); ++s)
            res << s << ',' << iterations[s] << ',' << residuals[s] << "\n";
    }
    write_real_field(out / "potential", f.grid, f.values);
    for (std::size_t s = 0; s < cfg.sources.size(); ++s) {
        char name[32];
        std::snprintf(name, sizeof(name), "u_hat_%03zu", s);
        manifest.outputs.push_back((out / name).string());
    }
    manifest.outputs.push_back((out / "residuals.csv").string());
    manifest.write(out / "manifest.json");
    return 0;
}

int cmd_synthesize(const CommonArgs& args) {
    ExperimentConfig cfg = load_and_finalize(args);
    const fs::path out = resolve_out(args.out_dir);
    fs::create_directories(out);
    RunManifest manifest = manifest_for("synthesize", cfg, args);

    const Grid fine = cfg.fine_grid();
    ScatteringPotential f_fine = cfg.build_phantom(fine);

    SynthesisOptions syn;
    syn.snr_db = cfg.snr_db;
    syn.seed = cfg.seed;
    syn.direct_tol = cfg.direct_tol;
    syn.allow_inverse_crime = cfg.allow_inverse_crime;

    MeasurementSet ms;
    {
        StageTimer timer{manifest.stage_seconds, "synthesize"};
        ms = synthesize_measurements(f_fine, cfg.sources, cfg.sensors, cfg.grid, syn);
    }

    MeasurementMetadata meta;
    meta.snr_db = cfg.snr_db;
    meta.seed = cfg.seed;
    meta.fine_grid = fine;
    save_measurements(out, ms, meta);
    write_real_field(out / "ground_truth", cfg.grid,
                     cfg.build_phantom(cfg.grid).values);
    manifest.outputs.push_back(out.string());
    manifest.write(out / "manifest.json");
    return 0;
}

int cmd_reconstruct(const CommonArgs& args, const std::string& measurements_dir,
                    const std::string& model_override) {
    ExperimentConfig cfg = load_and_finalize(args);
    if (!model_override.empty()) {
        if (model_override == "seagle") cfg.reconstruction.model = ForwardModel::seagle;
        else if (model_override == "born") cfg.reconstruction.model = ForwardModel::born;
        else if (model_override == "rytov") cfg.reconstruction.model = ForwardModel::rytov;
        else throw ConfigError("unknown model '" + model_override + "'");
    }
    const fs::path out = resolve_out(args.out_dir);
    fs::create_directories(out);
    RunManifest manifest = manifest_for("reconstruct", cfg, args);
    manifest.inputs.push_back(measurements_dir);

    LoadedMeasurements loaded = load_measurements(measurements_dir);
    loaded.set.validate(cfg.grid);
    // The stored geometry must match the config geometry.
    if (loaded.set.sensors.count() != cfg.sensors.count())
        throw GeometryError("measurement sensors do not match config sensors");
    for (int i = 0; i < cfg.sensors.count(); ++i)
        for (int d = 0; d < 3; ++d)
            if (loaded.set.sensors.points[static_cast<std::size_t>(i)][d] !=
                cfg.sensors.points[static_cast<std::size_t>(i)][d])
                throw GeometryError("measurement sensors do not match config sensors");
    if (loaded.set.num_sources() != static_cast<int>(cfg.sources.size()))
        throw GeometryError("measurement sources do not match config sources");

    if (cfg.tau_relative) cfg.reconstruction.tau = *cfg.tau_relative * loaded.set.stacked_norm_sq();

    InteriorOperator green(cfg.grid, cfg.wavenumber);
    SensorOperator sensor_op(cfg.grid, cfg.sensors, cfg.wavenumber);

    std::optional<ScatteringPotential> truth;
    const fs::path truth_stem = fs::path(measurements_dir) / "ground_truth";
    if (fs::exists(truth_stem.string() + ".json")) {
        RealField t = read_real_field(truth_stem);
        if (t.grid == cfg.grid) truth = ScatteringPotential{t.grid, std::move(t.values)};
    }

    ReconstructionResult result;
    {
        StageTimer timer{manifest.stage_seconds, "reconstruct"};
        result = reconstruct(green, sensor_op, cfg.reconstruction, loaded.set,
                             truth ? &*truth : nullptr);
    }

    write_real_field(out / "f_hat", result.image.grid, result.image.values);
    {
        std::ofstream csv(out / "history.csv");
        csv << result.history.to_csv();
    }
    manifest.outputs.push_back((out / "f_hat").string());
    manifest.outputs.push_back((out / "history.csv").string());
    manifest.write(out / "manifest.json");
    return 0;
}

int cmd_validate(const std::string& suite, const std::string& out_dir) {
    ValidationReport rep = run_validation_suite(suite);
    std::cout << rep.to_table();
    if (!out_dir.empty()) {
        const fs::path out = resolve_out(out_dir);
        fs::create_directories(out);
        std::ofstream f(out / ("validate_" + suite + ".txt"));
        f << rep.to_table();
    }
    return rep.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SEAGLE inverse scattering: accelerated forward model, "
                 "backpropagated gradients, TV-regularized reconstruction"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string measurements_dir;
    std::string model_override;
    std::string suite;

    auto add_common = [&](CLI::App* sub, bool needs_config = true) {
        if (needs_config)
            sub->add_option("--config", common.config_path, "JSON config path")->required();
        sub->add_option("--out", common.out_dir, "output directory");
        sub->add_option("--seed", common.seed, "seed override")
            ->each([&](const std::string&) { common.seed_set = true; });
        sub->add_option("--jobs", common.jobs, "max concurrent per-source solves");
    };

    CLI::App* fwd = app.add_subcommand("forward", "run the forward model for each source");
    add_common(fwd);
    CLI::App* syn = app.add_subcommand("synthesize", "generate measurements on a finer grid");
    add_common(syn);
    CLI::App* rec = app.add_subcommand("reconstruct", "TV-regularized reconstruction");
    add_common(rec);
    rec->add_option("--measurements", measurements_dir, "measurement directory")->required();
    rec->add_option("--model", model_override, "seagle | born | rytov");
    CLI::App* val = app.add_subcommand("validate", "run an oracle comparison suite");
    val->add_option("--suite", suite, "green-ops | gradient | forward-analytic | prox | end-to-end")
        ->required();
    val->add_option("--out", common.out_dir, "output directory for the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (fwd->parsed()) return cmd_forward(common);
        if (syn->parsed()) return cmd_synthesize(common);
        if (rec->parsed()) return cmd_reconstruct(common, measurements_dir, model_override);
        if (val->parsed()) return cmd_validate(suite, val->count("--out") ? common.out_dir : "");
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InverseCrimeError& e) {
        std::cerr << "inverse-crime refusal: " << e.what() << "\n";
        return kExitInverseCrime;
    } catch (const GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return kExitGeometry;
    } catch (const SolverBreakdownError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const NonConvergenceError& e) {
        std::cerr << "solver error: " << e.what() << " (residual " << e.residual() << ")\n";
        return kExitSolver;
    } catch (const InvalidInputError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
