#pragma once

#include <optional>

#include "seagle/gradient.hpp"
#include "seagle/potential.hpp"

namespace seagle {

/// Homogeneous circular cylinder (2D) or sphere (3D).
struct HomogeneousScatterer {
    enum class Shape { cylinder, sphere };

    Shape shape = Shape::cylinder;
    double radius = 0.0;          // meters
    double index = 1.0;           // interior refractive index, background = 1
    std::array<double, 3> center{0, 0, 0};

    ScatteringPotential rasterize(const Grid& grid, double k_b) const;
};

struct SeriesOptions {
    int truncation = -1;       // modes; < 0 selects ceil(k R) + 15
    double tail_tol = 1e-10;   // last-coefficient convergence threshold
    int max_truncation = 400;  // doubling cap before giving up
};

/// Partial-wave series solution of the scattering problem: the incident
/// field is expanded about the scatterer center, per-mode 2x2 continuity
/// conditions (field and normal derivative at the boundary, interior
/// wavenumber k_b n) give the scattered and interior coefficients, and the
/// total field is summed at the requested points. Point sources and plane
/// waves; 3D raises NonConvergenceError if the series will not settle.
ComplexField analytic_field(const HomogeneousScatterer& scatterer, const SourceSpec& source,
                            const std::vector<std::array<double, 3>>& points, double k_b,
                            const SeriesOptions& options = {});

ComplexField analytic_field(const HomogeneousScatterer& scatterer, const SourceSpec& source,
                            const Grid& grid, double k_b, const SeriesOptions& options = {});

struct DirectSolveResult {
    ComplexField u;
    int iterations = 0;
    double residual = 0.0;  // ||A u - u_in||_2
};

/// Independent solver for A u = u_in: matrix-free BiCGSTAB on the same
/// operator applications the accelerated solver uses. Throws
/// NonConvergenceError (carrying the reached residual) past max_iters.
DirectSolveResult direct_solve(const InteriorOperator& green, const ScatteringPotential& f,
                               const ComplexField& u_in, double tol, int max_iters = 4000);

/// Central finite difference of the frozen-coefficient replay data fit with
/// respect to component j: ( D(f + h e_j) - D(f - h e_j) ) / 2h.
double fd_gradient(const InteriorOperator& green, const SensorOperator& sensor_op,
                   const ScatteringPotential& f, const MeasurementSet& measurements,
                   const std::vector<ForwardRecord>& records, std::size_t component, double h);

struct SynthesisOptions {
    std::optional<double> snr_db;  // complex Gaussian noise level; empty = none
    std::uint64_t seed = 0;
    double direct_tol = 1e-8;
    int direct_max_iters = 20000;
    bool allow_inverse_crime = false;
};

/// Measurement synthesis on a fine grid that must differ from the
/// reconstruction discretization (refusal otherwise, unless explicitly
/// overridden): direct solve per source, sensor evaluation through the
/// fine-grid operator, then seeded complex Gaussian noise at the requested
/// SNR. Noise draws depend only on (seed, source index).
MeasurementSet synthesize_measurements(const ScatteringPotential& fine_potential,
                                       const std::vector<SourceSpec>& sources,
                                       const SensorArray& sensors, const Grid& recon_grid,
                                       const SynthesisOptions& options);

}  // namespace seagle
