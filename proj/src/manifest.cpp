#include "seagle/manifest.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "seagle/errors.hpp"

namespace seagle {

std::string library_version() { return "0.1.0"; }

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << h;
    return os.str();
}

void RunManifest::write(const std::filesystem::path& path) const {
    nlohmann::ordered_json doc;
    doc["command"] = command;
    doc["version"] = version.empty() ? library_version() : version;
    doc["config_hash"] = config_hash;
    doc["seed"] = seed;
    doc["inputs"] = inputs;
    doc["outputs"] = outputs;
    nlohmann::ordered_json stages = nlohmann::ordered_json::object();
    for (const auto& [name, secs] : stage_seconds) stages[name] = secs;
    doc["stage_seconds"] = stages;
    if (!canonical_config.empty())
        doc["config"] = nlohmann::ordered_json::parse(canonical_config);

    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path.string());
    out << doc.dump(2) << "\n";
}

}  // namespace seagle
