#include "seagle/serialize.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "seagle/gridio.hpp"

namespace seagle {

using json = nlohmann::ordered_json;

namespace {

json grid_to_json(const Grid& g) {
    json j;
    j["dim"] = g.dim;
    j["counts"] = std::vector<int>(g.counts.begin(), g.counts.begin() + g.dim);
    j["pixel_size"] = g.pixel_size;
    j["origin"] = std::vector<double>(g.origin.begin(), g.origin.begin() + g.dim);
    return j;
}

Grid grid_from_json(const json& j) {
    const int dim = j.at("dim").get<int>();
    auto counts_v = j.at("counts").get<std::vector<int>>();
    auto origin_v = j.at("origin").get<std::vector<double>>();
    std::array<int, 3> counts{1, 1, 1};
    std::array<double, 3> origin{0, 0, 0};
    for (int d = 0; d < dim; ++d) {
        counts[d] = counts_v[static_cast<std::size_t>(d)];
        origin[d] = origin_v[static_cast<std::size_t>(d)];
    }
    return Grid::make(dim, counts, j.at("pixel_size").get<double>(), origin);
}

json source_to_json(const SourceSpec& s) {
    json j;
    j["kind"] = s.kind == SourceSpec::Kind::point_source ? "point" : "plane";
    if (s.kind == SourceSpec::Kind::point_source)
        j["location_m"] = std::vector<double>(s.location.begin(), s.location.end());
    else
        j["direction"] = std::vector<double>(s.direction.begin(), s.direction.end());
    j["wavenumber_rad_per_m"] = s.wavenumber;
    return j;
}

SourceSpec source_from_json(const json& j) {
    const double k = j.at("wavenumber_rad_per_m").get<double>();
    if (j.at("kind").get<std::string>() == "point") {
        auto v = j.at("location_m").get<std::vector<double>>();
        return SourceSpec::point({v[0], v[1], v.size() > 2 ? v[2] : 0.0}, k);
    }
    auto v = j.at("direction").get<std::vector<double>>();
    return SourceSpec::plane({v[0], v[1], v.size() > 2 ? v[2] : 0.0}, k);
}

}  // namespace

void save_measurements(const std::filesystem::path& dir, const MeasurementSet& ms,
                       const MeasurementMetadata& meta) {
    std::filesystem::create_directories(dir);
    json doc;
    doc["kind"] = "measurement-set";
    doc["num_sources"] = ms.num_sources();
    json sensors;
    json pts = json::array();
    for (const auto& p : ms.sensors.points)
        pts.push_back(std::vector<double>{p[0], p[1], p[2]});
    sensors["points_m"] = pts;
    sensors["segment_starts"] = ms.sensors.segment_starts;
    doc["sensors"] = sensors;
    json sources = json::array();
    for (const auto& e : ms.entries) sources.push_back(source_to_json(e.source));
    doc["sources"] = sources;
    doc["seed"] = meta.seed;
    if (meta.snr_db) doc["snr_db"] = *meta.snr_db;
    else doc["snr_db"] = nullptr;
    if (meta.fine_grid) doc["fine_grid"] = grid_to_json(*meta.fine_grid);

    {
        std::ofstream out(dir / "metadata.json");
        if (!out) throw IoError("cannot write " + (dir / "metadata.json").string());
        out << doc.dump(2) << "\n";
    }
    char name[32];
    for (int s = 0; s < ms.num_sources(); ++s) {
        std::snprintf(name, sizeof(name), "m_%03d", s);
        write_complex_field(dir / name, ms.entries[static_cast<std::size_t>(s)].m);
    }
}

LoadedMeasurements load_measurements(const std::filesystem::path& dir) {
    std::ifstream in(dir / "metadata.json");
    if (!in) throw IoError("cannot open " + (dir / "metadata.json").string());
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ConfigError("bad measurement metadata: " + std::string(e.what()));
    }
    LoadedMeasurements out;
    for (const auto& p : doc.at("sensors").at("points_m")) {
        auto v = p.get<std::vector<double>>();
        out.set.sensors.points.push_back({v[0], v[1], v.size() > 2 ? v[2] : 0.0});
    }
    out.set.sensors.segment_starts =
        doc.at("sensors").at("segment_starts").get<std::vector<int>>();
    out.meta.seed = doc.value("seed", 0ull);
    if (doc.contains("snr_db") && !doc.at("snr_db").is_null())
        out.meta.snr_db = doc.at("snr_db").get<double>();
    if (doc.contains("fine_grid")) out.meta.fine_grid = grid_from_json(doc.at("fine_grid"));

    const int ns = doc.at("num_sources").get<int>();
    char name[32];
    for (int s = 0; s < ns; ++s) {
        std::snprintf(name, sizeof(name), "m_%03d", s);
        SourceMeasurement entry;
        entry.source = source_from_json(doc.at("sources").at(static_cast<std::size_t>(s)));
        entry.m = read_complex_field(dir / name);
        out.set.entries.push_back(std::move(entry));
    }
    return out;
}

void save_forward_record(const std::filesystem::path& dir, const ForwardRecord& record) {
    std::filesystem::create_directories(dir);
    json doc;
    doc["kind"] = "forward-record";
    doc["k_eff"] = record.k_eff;
    doc["gamma"] = record.gamma;
    doc["mu"] = record.mu;
    doc["residual_norm"] = record.residual_norm;
    doc["history_recorded"] = record.history_recorded;
    doc["adjoint_residuals_cached"] = record.adjoint_residuals_cached;
    {
        std::ofstream out(dir / "metadata.json");
        if (!out) throw IoError("cannot write " + (dir / "metadata.json").string());
        out << doc.dump(2) << "\n";
    }
    write_real_field(dir / "f_snapshot", record.f_snapshot.grid, record.f_snapshot.values);
    write_complex_field(dir / "u_final", record.u_final);
    write_complex_field(dir / "u_hat", record.u_hat);
    if (record.warm_start) write_complex_field(dir / "warm_start", *record.warm_start);
    char name[32];
    if (record.history_recorded) {
        for (int k = 0; k < record.k_eff; ++k) {
            std::snprintf(name, sizeof(name), "y_%04d", k);
            write_complex_field(dir / name, record.y.get(k));
        }
        if (record.adjoint_residuals_cached) {
            for (int k = 0; k < record.k_eff; ++k) {
                std::snprintf(name, sizeof(name), "w_%04d", k);
                write_complex_field(dir / name, record.w.get(k));
            }
        }
    }
}

ForwardRecord load_forward_record(const std::filesystem::path& dir) {
    std::ifstream in(dir / "metadata.json");
    if (!in) throw IoError("cannot open " + (dir / "metadata.json").string());
    json doc;
    in >> doc;
    ForwardRecord rec;
    rec.k_eff = doc.at("k_eff").get<int>();
    rec.gamma = doc.at("gamma").get<std::vector<double>>();
    rec.mu = doc.at("mu").get<std::vector<double>>();
    rec.residual_norm = doc.at("residual_norm").get<double>();
    rec.history_recorded = doc.value("history_recorded", true);
    rec.adjoint_residuals_cached = doc.value("adjoint_residuals_cached", false);
    RealField f = read_real_field(dir / "f_snapshot");
    rec.f_snapshot = ScatteringPotential{f.grid, std::move(f.values)};
    rec.u_final = read_complex_field(dir / "u_final");
    rec.u_hat = read_complex_field(dir / "u_hat");
    if (std::filesystem::exists(dir / "warm_start.json"))
        rec.warm_start = read_complex_field(dir / "warm_start");
    char name[32];
    if (rec.history_recorded) {
        for (int k = 0; k < rec.k_eff; ++k) {
            std::snprintf(name, sizeof(name), "y_%04d", k);
            rec.y.push(read_complex_field(dir / name));
        }
        if (rec.adjoint_residuals_cached) {
            for (int k = 0; k < rec.k_eff; ++k) {
                std::snprintf(name, sizeof(name), "w_%04d", k);
                rec.w.push(read_complex_field(dir / name));
            }
        }
    }
    return rec;
}

}  // namespace seagle
