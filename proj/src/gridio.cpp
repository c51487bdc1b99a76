#include "seagle/gridio.hpp"

#include <bit>
#include <fstream>

#include <json.hpp>

namespace seagle {

static_assert(std::endian::native == std::endian::little,
              "grid format payloads are little-endian; big-endian hosts are unsupported");

namespace {

using json = nlohmann::ordered_json;

json metadata_for(const Grid& grid, bool sensor_domain, int sensor_count, bool is_complex) {
    json meta;
    if (sensor_domain) {
        meta["dim"] = 1;
        meta["counts"] = std::vector<int>{sensor_count};
        meta["pixel_size"] = 1.0;
        meta["origin"] = std::vector<double>{0.0};
        meta["domain"] = "sensor";
    } else {
        meta["dim"] = grid.dim;
        std::vector<int> counts(grid.counts.begin(), grid.counts.begin() + grid.dim);
        meta["counts"] = counts;
        meta["pixel_size"] = grid.pixel_size;
        std::vector<double> origin(grid.origin.begin(), grid.origin.begin() + grid.dim);
        meta["origin"] = origin;
        meta["domain"] = "grid";
    }
    meta["scalar"] = is_complex ? "complex128-interleaved" : "real64";
    meta["byte_order"] = "little-endian";
    return meta;
}

void write_payload(const std::filesystem::path& stem, const json& meta, const void* data,
                   std::size_t bytes) {
    std::filesystem::path jpath = stem;
    jpath += ".json";
    std::filesystem::path bpath = stem;
    bpath += ".bin";
    {
        std::ofstream js(jpath);
        if (!js) throw IoError("cannot open " + jpath.string() + " for writing");
        js << meta.dump(2) << "\n";
    }
    std::ofstream bs(bpath, std::ios::binary);
    if (!bs) throw IoError("cannot open " + bpath.string() + " for writing");
    bs.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!bs) throw IoError("short write to " + bpath.string());
}

}  // namespace

void write_real_field(const std::filesystem::path& stem, const Grid& grid,
                      const std::vector<double>& values) {
    if (values.size() != grid.num_samples())
        throw InvalidInputError("write_real_field: value count does not match grid");
    json meta = metadata_for(grid, false, 0, false);
    write_payload(stem, meta, values.data(), values.size() * sizeof(double));
}

void write_complex_field(const std::filesystem::path& stem, const ComplexField& field) {
    const bool sensor = field.tag == ComplexField::Tag::sensor;
    json meta = metadata_for(field.grid, sensor, field.sensor_count, true);
    write_payload(stem, meta, field.values.data(), field.values.size() * sizeof(cdouble));
}

LoadedField read_field(const std::filesystem::path& stem) {
    std::filesystem::path jpath = stem;
    jpath += ".json";
    std::filesystem::path bpath = stem;
    bpath += ".bin";

    std::ifstream js(jpath);
    if (!js) throw IoError("cannot open " + jpath.string());
    json meta;
    try {
        js >> meta;
    } catch (const std::exception& e) {
        throw ConfigError("bad grid metadata in " + jpath.string() + ": " + e.what());
    }

    LoadedField out;
    const std::string scalar = meta.at("scalar").get<std::string>();
    if (scalar == "complex128-interleaved")
        out.is_complex = true;
    else if (scalar == "real64")
        out.is_complex = false;
    else
        throw ConfigError("unknown scalar kind '" + scalar + "' in " + jpath.string());
    if (meta.value("byte_order", "little-endian") != "little-endian")
        throw ConfigError("unsupported byte order in " + jpath.string());

    const int dim = meta.at("dim").get<int>();
    std::size_t total = 1;
    if (dim == 1) {
        out.sensor_domain = true;
        out.sensor_count = meta.at("counts").at(0).get<int>();
        total = static_cast<std::size_t>(out.sensor_count);
    } else {
        auto counts = meta.at("counts").get<std::vector<int>>();
        auto origin = meta.at("origin").get<std::vector<double>>();
        if (static_cast<int>(counts.size()) != dim || static_cast<int>(origin.size()) != dim)
            throw ConfigError("counts/origin arity mismatch in " + jpath.string());
        std::array<int, 3> c{1, 1, 1};
        std::array<double, 3> o{0, 0, 0};
        for (int d = 0; d < dim; ++d) {
            c[d] = counts[static_cast<std::size_t>(d)];
            o[d] = origin[static_cast<std::size_t>(d)];
        }
        out.grid = Grid::make(dim, c, meta.at("pixel_size").get<double>(), o);
        total = out.grid.num_samples();
    }

    std::ifstream bs(bpath, std::ios::binary);
    if (!bs) throw IoError("cannot open " + bpath.string());
    const std::size_t bytes = total * (out.is_complex ? sizeof(cdouble) : sizeof(double));
    if (out.is_complex) {
        out.complex_values.resize(total);
        bs.read(reinterpret_cast<char*>(out.complex_values.data()),
                static_cast<std::streamsize>(bytes));
    } else {
        out.real_values.resize(total);
        bs.read(reinterpret_cast<char*>(out.real_values.data()),
                static_cast<std::streamsize>(bytes));
    }
    if (static_cast<std::size_t>(bs.gcount()) != bytes)
        throw IoError("short read from " + bpath.string());
    return out;
}

RealField read_real_field(const std::filesystem::path& stem) {
    LoadedField f = read_field(stem);
    if (f.is_complex || f.sensor_domain)
        throw ConfigError("expected a real grid field at " + stem.string());
    return RealField{f.grid, std::move(f.real_values)};
}

ComplexField read_complex_field(const std::filesystem::path& stem) {
    LoadedField f = read_field(stem);
    if (!f.is_complex) throw ConfigError("expected a complex field at " + stem.string());
    ComplexField out;
    if (f.sensor_domain) {
        out.tag = ComplexField::Tag::sensor;
        out.sensor_count = f.sensor_count;
    } else {
        out.tag = ComplexField::Tag::grid;
        out.grid = f.grid;
    }
    out.values = std::move(f.complex_values);
    return out;
}

}  // namespace seagle
