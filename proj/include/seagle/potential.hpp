#pragma once

#include "seagle/grid.hpp"

namespace seagle {

/// f = k_b^2 (1 - n^2) from a refractive-index map. Requires n > 0 and finite.
ScatteringPotential potential_from_index(const RealField& index, double k_b);

/// Inverse of potential_from_index: n = sqrt(1 - f / k_b^2).
RealField index_from_potential(const ScatteringPotential& f, double k_b);

/// max|f| / k_b^2, the scattering-strength measure.
double contrast(const ScatteringPotential& f, double k_b);

enum class PotentialSign { negative, positive };

/// Standard Shepp-Logan ellipse phantom (modified intensity table), rescaled
/// so contrast(result, k_b) equals target_contrast. The default sign makes
/// f <= 0, i.e. object index above background. 2D only.
///
/// extent_fraction sets the height of the outer ellipse relative to the
/// shorter grid extent.
ScatteringPotential make_shepp_logan(const Grid& grid, double target_contrast, double k_b,
                                     PotentialSign sign = PotentialSign::negative,
                                     double extent_fraction = 0.9417);

/// Homogeneous cylinder (2D) or sphere (3D) rasterized with per-pixel coverage
/// weighting so the discrete potential tracks the true shape to O(h^2).
ScatteringPotential make_ball(const Grid& grid, std::array<double, 3> center, double radius,
                              double target_contrast, double k_b,
                              PotentialSign sign = PotentialSign::negative,
                              int supersample = 8);

}  // namespace seagle
