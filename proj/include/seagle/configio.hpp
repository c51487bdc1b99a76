#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "seagle/inverse.hpp"
#include "seagle/oracle.hpp"

namespace seagle {

/// Fully resolved experiment description: geometry, excitation, phantom,
/// solver and reconstruction settings. Built from a JSON document, with
/// named presets for the standard validation and inversion setups.
struct ExperimentConfig {
    double wavenumber = 0.0;  // rad/m; configs may state a wavelength instead
    Grid grid;                // reconstruction grid

    enum class PhantomKind { none, shepp_logan, ball, file };
    PhantomKind phantom_kind = PhantomKind::none;
    double phantom_contrast = 0.0;
    PotentialSign phantom_sign = PotentialSign::negative;
    double phantom_extent_fraction = 0.9417;
    double ball_radius = 0.0;
    std::array<double, 3> ball_center{0, 0, 0};
    std::filesystem::path phantom_path;

    std::vector<SourceSpec> sources;
    SensorArray sensors;

    ForwardOptions forward;

    int fine_factor = 2;
    std::optional<double> snr_db;
    double direct_tol = 1e-8;
    bool allow_inverse_crime = false;

    ReconstructionConfig reconstruction;
    /// tau given relative to ||m||^2; resolved against the measurements.
    std::optional<double> tau_relative;

    std::uint64_t seed = 0;
    int jobs = 0;  // 0 = all available

    /// Canonical JSON echo of the resolved configuration.
    std::string canonical_json;

    ScatteringPotential build_phantom(const Grid& on_grid) const;
    /// Simulation grid: fine_factor times finer, same physical extent,
    /// recentered so samples do not coincide with reconstruction samples.
    Grid fine_grid() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);

/// Presets: "cylinder-2d" (250 x 250 cylinder validation), "cylinder-2d-128",
/// "sphere-3d-64", "shepp-logan-full" (full inversion geometry), "shepp-logan-64".
std::string preset_json(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace seagle
