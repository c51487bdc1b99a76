#pragma once

#include <filesystem>
#include <string>

#include "seagle/grid.hpp"

namespace seagle {

/// External grid format: a JSON sidecar `<stem>.json` describing the layout
/// (dim, counts, pixel_size, origin, scalar kind, byte order) plus a raw
/// little-endian binary payload `<stem>.bin` in row-major axis order.
/// Round trips are bit-exact.
///
/// Sensor-domain complex fields reuse the same container with dim = 1; their
/// physical coordinates live with the owning measurement set, not here.
void write_real_field(const std::filesystem::path& stem, const Grid& grid,
                      const std::vector<double>& values);
void write_complex_field(const std::filesystem::path& stem, const ComplexField& field);

struct LoadedField {
    bool is_complex = false;
    Grid grid;              // dim >= 2 payloads
    int sensor_count = 0;   // dim == 1 payloads
    bool sensor_domain = false;
    std::vector<double> real_values;
    std::vector<cdouble> complex_values;
};

LoadedField read_field(const std::filesystem::path& stem);

RealField read_real_field(const std::filesystem::path& stem);
ComplexField read_complex_field(const std::filesystem::path& stem);

}  // namespace seagle
