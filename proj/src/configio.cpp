#include "seagle/configio.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "seagle/gridio.hpp"

namespace seagle {

using json = nlohmann::ordered_json;
using std::numbers::pi;

namespace {

void deep_merge(json& base, const json& overlay) {
    if (!overlay.is_object() || !base.is_object()) {
        base = overlay;
        return;
    }
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object())
            deep_merge(base[it.key()], it.value());
        else
            base[it.key()] = it.value();
    }
}

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why);
}

double require_positive(const json& j, const std::string& field) {
    if (!j.contains(field)) fail(field, "missing");
    double v = j.at(field).get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) fail(field, "must be positive and finite");
    return v;
}

std::array<double, 3> to_vec3(const json& j, const std::string& field) {
    auto v = j.get<std::vector<double>>();
    if (v.size() < 2 || v.size() > 3) fail(field, "expected 2 or 3 coordinates");
    std::array<double, 3> out{0, 0, 0};
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
}

std::vector<SourceSpec> parse_sources(const json& j, double k_b) {
    if (!j.is_object()) fail("sources", "expected an object");
    const std::string type = j.value("type", "");
    std::vector<SourceSpec> out;
    if (type == "fan") {
        const double line_x = j.at("line_x_m").get<double>();
        const double a0 = j.at("angle_min_deg").get<double>();
        const double a1 = j.at("angle_max_deg").get<double>();
        const double da = require_positive(j, "angle_step_deg");
        if (a1 < a0) fail("sources.angle_max_deg", "must be >= angle_min_deg");
        for (double a = a0; a <= a1 + 1e-9; a += da) {
            const double y = std::abs(line_x) * std::tan(a * pi / 180.0);
            out.push_back(SourceSpec::point({line_x, y, 0.0}, k_b));
        }
    } else if (type == "ring") {
        const double r = require_positive(j, "radius_m");
        const int count = j.at("count").get<int>();
        if (count < 1) fail("sources.count", "must be >= 1");
        for (int i = 0; i < count; ++i) {
            const double a = 2.0 * pi * i / count;
            out.push_back(SourceSpec::point({r * std::cos(a), r * std::sin(a), 0.0}, k_b));
        }
    } else if (type == "points") {
        for (const auto& p : j.at("locations_m"))
            out.push_back(SourceSpec::point(to_vec3(p, "sources.locations_m"), k_b));
    } else if (type == "planes") {
        for (const auto& p : j.at("directions"))
            out.push_back(SourceSpec::plane(to_vec3(p, "sources.directions"), k_b));
    } else {
        fail("sources.type", "expected fan | ring | points | planes");
    }
    if (out.empty()) fail("sources", "no sources produced");
    return out;
}

SensorArray parse_sensors(const json& j) {
    if (!j.is_object()) fail("sensors", "expected an object");
    const std::string type = j.value("type", "");
    SensorArray out;
    if (type == "two-line") {
        const double offset = require_positive(j, "offset_x_m");
        const int count = j.at("count_per_line").get<int>();
        const double spacing = require_positive(j, "spacing_m");
        if (count < 1) fail("sensors.count_per_line", "must be >= 1");
        for (int side = 0; side < 2; ++side) {
            const double x = side == 0 ? -offset : offset;
            for (int i = 0; i < count; ++i) {
                const double y = (i - 0.5 * (count - 1)) * spacing;
                out.points.push_back({x, y, 0.0});
            }
        }
        out.segment_starts = {0, count};
    } else if (type == "ring") {
        const double r = require_positive(j, "radius_m");
        const int count = j.at("count").get<int>();
        if (count < 1) fail("sensors.count", "must be >= 1");
        for (int i = 0; i < count; ++i) {
            const double a = 2.0 * pi * i / count;
            out.points.push_back({r * std::cos(a), r * std::sin(a), 0.0});
        }
        out.segment_starts = {0};
    } else if (type == "explicit") {
        for (const auto& p : j.at("points_m"))
            out.points.push_back(to_vec3(p, "sensors.points_m"));
        if (j.contains("segment_starts"))
            out.segment_starts = j.at("segment_starts").get<std::vector<int>>();
        else
            out.segment_starts = {0};
    } else {
        fail("sensors.type", "expected two-line | ring | explicit");
    }
    return out;
}

}  // namespace

ScatteringPotential ExperimentConfig::build_phantom(const Grid& on_grid) const {
    switch (phantom_kind) {
        case PhantomKind::none:
            return ScatteringPotential::zeros(on_grid);
        case PhantomKind::shepp_logan:
            return make_shepp_logan(on_grid, phantom_contrast, wavenumber, phantom_sign,
                                    phantom_extent_fraction);
        case PhantomKind::ball:
            return make_ball(on_grid, ball_center, ball_radius, phantom_contrast, wavenumber,
                             phantom_sign);
        case PhantomKind::file: {
            RealField f = read_real_field(phantom_path);
            if (!(f.grid == on_grid))
                throw GeometryError("phantom file grid does not match the requested grid");
            return ScatteringPotential{f.grid, std::move(f.values)};
        }
    }
    throw ConfigError("unknown phantom kind");
}

Grid ExperimentConfig::fine_grid() const {
    if (fine_factor < 1) throw ConfigError("fine_factor must be >= 1");
    std::array<int, 3> counts{1, 1, 1};
    for (int d = 0; d < grid.dim; ++d) counts[d] = grid.counts[d] * fine_factor;
    const double h = grid.pixel_size / fine_factor;
    std::array<double, 3> origin{0, 0, 0};
    for (int d = 0; d < grid.dim; ++d) {
        const double center = grid.origin[d] + 0.5 * (grid.counts[d] - 1) * grid.pixel_size;
        origin[d] = center - 0.5 * (counts[d] - 1) * h;
    }
    return Grid::make(grid.dim, counts, h, origin);
}

std::vector<std::string> preset_names() {
    return {"cylinder-2d", "cylinder-2d-128", "sphere-3d-64", "shepp-logan-full", "shepp-logan-64"};
}

std::string preset_json(const std::string& name) {
    // Reference geometries: 2D validation uses wavelength 74.9 mm on a
    // 4.8 mm grid; the inversion setup uses wavelength 7.49 cm, a 0.479 cm
    // grid, two 169-sensor detectors 95.9 cm out, and a fan of transmitters
    // every 5 degrees within +-60.
    if (name == "cylinder-2d") {
        return R"({
  "wavelength_m": 0.0749,
  "grid": {"counts": [250, 250], "pixel_size_m": 0.0048},
  "phantom": {"type": "ball", "contrast": 0.2, "radius_m": 0.2247},
  "sources": {"type": "points", "locations_m": [[-0.9, 0.0]]},
  "sensors": {"type": "ring", "radius_m": 0.9, "count": 180},
  "forward": {"max_iters": 1000, "stop": "objective", "objective_tol_rel": 5e-7}
})";
    }
    if (name == "cylinder-2d-128") {
        return R"({
  "wavelength_m": 0.0749,
  "grid": {"counts": [128, 128], "pixel_size_m": 0.0048},
  "phantom": {"type": "ball", "contrast": 0.2, "radius_m": 0.2247},
  "sources": {"type": "points", "locations_m": [[-0.6, 0.0]]},
  "sensors": {"type": "ring", "radius_m": 0.5, "count": 128},
  "forward": {"max_iters": 1000, "stop": "objective", "objective_tol_rel": 5e-7}
})";
    }
    if (name == "sphere-3d-64") {
        return R"({
  "wavelength_m": 0.0749,
  "grid": {"counts": [64, 64, 64], "pixel_size_m": 0.006},
  "phantom": {"type": "ball", "contrast": 0.2, "radius_m": 0.0749},
  "sources": {"type": "points", "locations_m": [[-0.55, 0.0, 0.0]]},
  "sensors": {"type": "ring", "radius_m": 0.42, "count": 32},
  "forward": {"max_iters": 200, "stop": "objective", "objective_tol_rel": 5e-7}
})";
    }
    if (name == "shepp-logan-full") {
        return R"({
  "wavelength_m": 0.0749,
  "grid": {"counts": [250, 250], "pixel_size_m": 0.00479},
  "phantom": {"type": "shepp-logan", "contrast": 0.2, "extent_fraction": 0.9417},
  "sources": {"type": "fan", "line_x_m": -1.439, "angle_min_deg": -60, "angle_max_deg": 60, "angle_step_deg": 5},
  "sensors": {"type": "two-line", "offset_x_m": 0.959, "count_per_line": 169, "spacing_m": 0.0384},
  "forward": {"max_iters": 120, "stop": "objective", "objective_tol_rel": 5e-7},
  "synthesize": {"fine_factor": 2, "direct_tol": 1e-8},
  "reconstruct": {"model": "seagle", "tau": {"relative": 1.5e-9}, "outer_iters": 100, "constraint": "non-positive"}
})";
    }
    if (name == "shepp-logan-64") {
        // The shepp-logan-full geometry shrunk to a 64 x 64 grid with the object kept
        // several wavelengths across, so the
        // inversion stays in the multiple-scattering regime the experiment
        // is about. Pixel 9 mm is lambda/8.3; the detectors, spacing and
        // transmitter line scale with the domain (factor 0.481).
        return R"({
  "wavelength_m": 0.0749,
  "grid": {"counts": [64, 64], "pixel_size_m": 0.009},
  "phantom": {"type": "shepp-logan", "contrast": 0.2, "extent_fraction": 0.9417},
  "sources": {"type": "fan", "line_x_m": -0.692, "angle_min_deg": -60, "angle_max_deg": 60, "angle_step_deg": 5},
  "sensors": {"type": "two-line", "offset_x_m": 0.4612, "count_per_line": 169, "spacing_m": 0.018467},
  "forward": {"max_iters": 120, "stop": "objective", "objective_tol_rel": 5e-7},
  "synthesize": {"fine_factor": 2, "direct_tol": 1e-8},
  "reconstruct": {"model": "seagle", "tau": {"relative": 1.5e-9}, "outer_iters": 40, "constraint": "non-positive"}
})";
    }
    throw ConfigError("unknown preset '" + name + "'");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");

    if (doc.contains("preset")) {
        json base = json::parse(preset_json(doc.at("preset").get<std::string>()));
        json overlay = doc;
        overlay.erase("preset");
        deep_merge(base, overlay);
        base["preset"] = doc.at("preset");
        doc = std::move(base);
    }

    ExperimentConfig cfg;

    if (doc.contains("wavenumber_rad_per_m"))
        cfg.wavenumber = require_positive(doc, "wavenumber_rad_per_m");
    else if (doc.contains("wavelength_m"))
        cfg.wavenumber = wavenumber_from_wavelength(require_positive(doc, "wavelength_m"));
    else
        fail("wavelength_m", "missing (or give wavenumber_rad_per_m)");

    if (!doc.contains("grid")) fail("grid", "missing");
    {
        const json& g = doc.at("grid");
        auto counts_v = g.at("counts").get<std::vector<int>>();
        if (counts_v.size() != 2 && counts_v.size() != 3) fail("grid.counts", "expected 2 or 3 axes");
        std::array<int, 3> counts{1, 1, 1};
        for (std::size_t i = 0; i < counts_v.size(); ++i) counts[i] = counts_v[i];
        const double h = require_positive(g, "pixel_size_m");
        const int dim = static_cast<int>(counts_v.size());
        try {
            if (g.contains("origin_m")) {
                auto o = to_vec3(g.at("origin_m"), "grid.origin_m");
                cfg.grid = Grid::make(dim, counts, h, o);
            } else {
                cfg.grid = Grid::centered(dim, counts, h);
            }
        } catch (const InvalidInputError& e) {
            throw ConfigError(std::string("config field 'grid': ") + e.what());
        }
    }

    if (doc.contains("phantom")) {
        const json& p = doc.at("phantom");
        const std::string type = p.value("type", "");
        if (type == "shepp-logan") {
            cfg.phantom_kind = ExperimentConfig::PhantomKind::shepp_logan;
            cfg.phantom_contrast = p.value("contrast", 0.2);
            cfg.phantom_extent_fraction = p.value("extent_fraction", 0.9417);
        } else if (type == "ball") {
            cfg.phantom_kind = ExperimentConfig::PhantomKind::ball;
            cfg.phantom_contrast = p.value("contrast", 0.2);
            cfg.ball_radius = require_positive(p, "radius_m");
            if (p.contains("center_m")) cfg.ball_center = to_vec3(p.at("center_m"), "phantom.center_m");
        } else if (type == "file") {
            cfg.phantom_kind = ExperimentConfig::PhantomKind::file;
            cfg.phantom_path = p.at("path").get<std::string>();
        } else if (type == "none" || type.empty()) {
            cfg.phantom_kind = ExperimentConfig::PhantomKind::none;
        } else {
            fail("phantom.type", "expected shepp-logan | ball | file | none");
        }
        const std::string sign = p.value("sign", "negative");
        if (sign == "negative") cfg.phantom_sign = PotentialSign::negative;
        else if (sign == "positive") cfg.phantom_sign = PotentialSign::positive;
        else fail("phantom.sign", "expected negative | positive");
        if (cfg.phantom_contrast < 0.0) fail("phantom.contrast", "must be >= 0");
    }

    if (!doc.contains("sources")) fail("sources", "missing");
    cfg.sources = parse_sources(doc.at("sources"), cfg.wavenumber);
    if (!doc.contains("sensors")) fail("sensors", "missing");
    cfg.sensors = parse_sensors(doc.at("sensors"));

    if (doc.contains("forward")) {
        const json& f = doc.at("forward");
        cfg.forward.max_iters = f.value("max_iters", cfg.forward.max_iters);
        if (cfg.forward.max_iters < 1) fail("forward.max_iters", "must be >= 1");
        const std::string stop = f.value("stop", "objective");
        if (stop == "objective") cfg.forward.stop = ForwardStop::objective;
        else if (stop == "gradient") cfg.forward.stop = ForwardStop::gradient;
        else fail("forward.stop", "expected objective | gradient");
        cfg.forward.objective_tol_rel = f.value("objective_tol_rel", cfg.forward.objective_tol_rel);
        cfg.forward.gradient_tol = f.value("gradient_tol", cfg.forward.gradient_tol);
    }

    if (doc.contains("synthesize")) {
        const json& s = doc.at("synthesize");
        cfg.fine_factor = s.value("fine_factor", 2);
        if (s.contains("snr_db") && !s.at("snr_db").is_null())
            cfg.snr_db = s.at("snr_db").get<double>();
        cfg.direct_tol = s.value("direct_tol", 1e-8);
        cfg.allow_inverse_crime = s.value("allow_inverse_crime", false);
    }

    if (doc.contains("reconstruct")) {
        const json& r = doc.at("reconstruct");
        const std::string model = r.value("model", "seagle");
        if (model == "seagle") cfg.reconstruction.model = ForwardModel::seagle;
        else if (model == "born") cfg.reconstruction.model = ForwardModel::born;
        else if (model == "rytov") cfg.reconstruction.model = ForwardModel::rytov;
        else fail("reconstruct.model", "expected seagle | born | rytov");
        if (r.contains("tau")) {
            const json& t = r.at("tau");
            if (t.is_object() && t.contains("relative"))
                cfg.tau_relative = t.at("relative").get<double>();
            else if (t.is_object() && t.contains("absolute"))
                cfg.reconstruction.tau = t.at("absolute").get<double>();
            else if (t.is_string() && t.get<std::string>() == "paper-fig4")
                cfg.tau_relative = 1.5e-9;
            else if (t.is_number())
                cfg.reconstruction.tau = t.get<double>();
            else
                fail("reconstruct.tau", "expected {relative:..}, {absolute:..} or \"paper-fig4\"");
        }
        cfg.reconstruction.outer_iters = r.value("outer_iters", cfg.reconstruction.outer_iters);
        if (cfg.reconstruction.outer_iters < 1) fail("reconstruct.outer_iters", "must be >= 1");
        const std::string c = r.value("constraint", "none");
        if (c == "none") cfg.reconstruction.constraint = ConstraintSet::none();
        else if (c == "non-negative") cfg.reconstruction.constraint = ConstraintSet::non_negative();
        else if (c == "non-positive") cfg.reconstruction.constraint = ConstraintSet::non_positive();
        else fail("reconstruct.constraint", "expected none | non-negative | non-positive");
        if (r.contains("step")) {
            const json& s = r.at("step");
            const std::string rule = s.value("rule", "backtracking");
            if (rule == "backtracking") cfg.reconstruction.step_rule = StepRule::backtracking;
            else if (rule == "fixed") cfg.reconstruction.step_rule = StepRule::fixed;
            else fail("reconstruct.step.rule", "expected backtracking | fixed");
            cfg.reconstruction.initial_step = s.value("initial", -1.0);
        }
        if (r.contains("prox")) {
            cfg.reconstruction.prox_iters = r.at("prox").value("iters", 100);
            cfg.reconstruction.prox_tol = r.at("prox").value("tol", 1e-6);
        }
        cfg.reconstruction.monotone = r.value("monotone", true);
        cfg.reconstruction.record_iterates = r.value("record_iterates", false);
        if (r.contains("initial_file")) {
            RealField init = read_real_field(r.at("initial_file").get<std::string>());
            if (!(init.grid == cfg.grid))
                throw GeometryError("reconstruct.initial_file grid does not match config grid");
            cfg.reconstruction.initial = ScatteringPotential{init.grid, std::move(init.values)};
        }
        cfg.reconstruction.forward = cfg.forward;
    } else {
        cfg.reconstruction.forward = cfg.forward;
    }

    cfg.seed = doc.value("seed", 0ull);
    cfg.jobs = doc.value("jobs", 0);

    cfg.canonical_json = doc.dump(2);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

}  // namespace seagle
