#pragma once

#include <filesystem>
#include <optional>

#include "seagle/gradient.hpp"

namespace seagle {

struct MeasurementMetadata {
    std::optional<double> snr_db;
    std::uint64_t seed = 0;
    std::optional<Grid> fine_grid;
};

/// Measurement sets serialize to a directory: metadata.json carrying the
/// geometry (sensors, sources, wavenumber), seed, SNR and simulation-grid
/// spec, plus one sensor field per source in the grid format.
void save_measurements(const std::filesystem::path& dir, const MeasurementSet& ms,
                       const MeasurementMetadata& meta);

struct LoadedMeasurements {
    MeasurementSet set;
    MeasurementMetadata meta;
};

LoadedMeasurements load_measurements(const std::filesystem::path& dir);

/// Forward records serialize to a directory of grid-format files plus a
/// metadata document (gamma, mu, K_eff, residual).
void save_forward_record(const std::filesystem::path& dir, const ForwardRecord& record);
ForwardRecord load_forward_record(const std::filesystem::path& dir);

}  // namespace seagle
