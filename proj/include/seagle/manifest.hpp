#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace seagle {

std::string library_version();

/// Reproducibility sidecar written next to every command's outputs: the
/// resolved config and its hash, the seed, software version, input/output
/// paths, and per-stage wall times. Everything except the timings is
/// deterministic for a given (config, seed).
struct RunManifest {
    std::string command;
    std::string config_hash;
    std::string canonical_config;
    std::uint64_t seed = 0;
    std::string version;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<std::pair<std::string, double>> stage_seconds;

    void write(const std::filesystem::path& path) const;
};

std::string fnv1a_hex(const std::string& bytes);

}  // namespace seagle
