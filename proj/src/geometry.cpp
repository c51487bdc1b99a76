#include "seagle/geometry.hpp"

#include <cmath>
#include <numbers>

namespace seagle {

SourceSpec SourceSpec::point(std::array<double, 3> location, double k_b) {
    if (!(k_b > 0.0)) throw InvalidInputError("SourceSpec: wavenumber must be positive");
    SourceSpec s;
    s.kind = Kind::point_source;
    s.location = location;
    s.wavenumber = k_b;
    return s;
}

SourceSpec SourceSpec::plane(std::array<double, 3> direction, double k_b) {
    if (!(k_b > 0.0)) throw InvalidInputError("SourceSpec: wavenumber must be positive");
    double n2 = direction[0] * direction[0] + direction[1] * direction[1] +
                direction[2] * direction[2];
    if (!(n2 > 0.0)) throw InvalidInputError("SourceSpec: zero plane-wave direction");
    double inv = 1.0 / std::sqrt(n2);
    SourceSpec s;
    s.kind = Kind::plane_wave;
    for (int d = 0; d < 3; ++d) s.direction[d] = direction[d] * inv;
    s.wavenumber = k_b;
    return s;
}

void SourceSpec::validate_against(const Grid& domain) const {
    if (kind == Kind::point_source && domain.contains_point(location))
        throw GeometryError("SourceSpec: point source lies inside the reconstruction domain");
}

void SensorArray::validate_against(const Grid& domain) const {
    if (points.empty()) throw InvalidInputError("SensorArray: need at least one sensor");
    for (const auto& p : points)
        if (domain.contains_point(p))
            throw GeometryError("SensorArray: sensor lies inside the reconstruction domain");
    if (segment_starts.empty() || segment_starts.front() != 0)
        throw InvalidInputError("SensorArray: first segment must start at 0");
    for (std::size_t i = 1; i < segment_starts.size(); ++i)
        if (segment_starts[i] <= segment_starts[i - 1] || segment_starts[i] >= count())
            throw InvalidInputError("SensorArray: segment starts must be strictly ascending");
}

std::pair<int, int> SensorArray::segment(int s) const {
    int begin = segment_starts[static_cast<std::size_t>(s)];
    int end = (s + 1 < num_segments()) ? segment_starts[static_cast<std::size_t>(s) + 1]
                                       : count();
    return {begin, end};
}

double wavenumber_from_wavelength(double lambda_m) {
    if (!(lambda_m > 0.0)) throw InvalidInputError("wavelength must be positive");
    return 2.0 * std::numbers::pi / lambda_m;
}

}  // namespace seagle
