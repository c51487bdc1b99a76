#include "seagle/oracle.hpp"

#include <cmath>
#include <numbers>

#include "seagle/special_functions.hpp"

namespace seagle {

using std::numbers::pi;

ScatteringPotential HomogeneousScatterer::rasterize(const Grid& grid, double k_b) const {
    const int want_dim = shape == Shape::cylinder ? 2 : 3;
    if (grid.dim != want_dim)
        throw InvalidInputError("HomogeneousScatterer: grid dimension does not match shape");
    const double c = std::abs(k_b * k_b * (1.0 - index * index)) / (k_b * k_b);
    const PotentialSign sign = index >= 1.0 ? PotentialSign::negative : PotentialSign::positive;
    return make_ball(grid, center, radius, c, k_b, sign);
}

namespace {

struct ModeTable {
    // Scattered (outside) and interior coefficients for |m| = 0..M, without
    // the source-dependent azimuthal factor.
    std::vector<cdouble> b;
    std::vector<cdouble> c;
    int truncation = 0;
};

/// Solves the per-mode continuity conditions for the 2D cylinder:
///   a_m J_m(kR) + b_m H_m(kR)      = c_m J_m(k_i R)
///   a_m k J'_m(kR) + b_m k H'_m(kR) = c_m k_i J'_m(k_i R)
ModeTable cylinder_modes(const std::vector<cdouble>& a, double k, double ki, double R) {
    const int M = static_cast<int>(a.size()) - 1;
    const double kR = k * R, kiR = ki * R;
    auto j_out = sf::bessel_j_array(M + 1, kR);
    auto y_out = sf::bessel_y_array(M + 1, kR);
    auto j_in = sf::bessel_j_array(M + 1, kiR);

    ModeTable t;
    t.truncation = M;
    t.b.resize(static_cast<std::size_t>(M) + 1);
    t.c.resize(static_cast<std::size_t>(M) + 1);
    for (int m = 0; m <= M; ++m) {
        const std::size_t um = static_cast<std::size_t>(m);
        const double jm = j_out[um];
        const double jm_p = (m == 0) ? -j_out[1] : j_out[um - 1] - (m / kR) * j_out[um];
        const cdouble hm{j_out[um], y_out[um]};
        const cdouble hm_p = (m == 0)
                                 ? cdouble{-j_out[1], -y_out[1]}
                                 : cdouble{j_out[um - 1], y_out[um - 1]} - (m / kR) * hm;
        const double gm = j_in[um];
        const double gm_p = (m == 0) ? -j_in[1] : j_in[um - 1] - (m / kiR) * j_in[um];

        // [ H_m(kR)      -J_m(kiR)   ] [b]   [ -J_m(kR)    ]
        // [ k H'_m(kR)   -ki J'_m(kiR)] [c] = [ -k J'_m(kR) ] * a_m
        const cdouble a11 = hm, a12 = -gm;
        const cdouble a21 = k * hm_p, a22 = -ki * gm_p;
        const cdouble det = a11 * a22 - a12 * a21;
        const cdouble r1 = -jm * a[um];
        const cdouble r2 = -k * jm_p * a[um];
        t.b[um] = (r1 * a22 - a12 * r2) / det;
        t.c[um] = (a11 * r2 - r1 * a21) / det;
    }
    return t;
}

/// Same continuity conditions with spherical radial functions.
ModeTable sphere_modes(const std::vector<cdouble>& a, double k, double ki, double R) {
    const int L = static_cast<int>(a.size()) - 1;
    const double kR = k * R, kiR = ki * R;
    auto j_out = sf::sph_bessel_j_array(L + 1, kR);
    auto y_out = sf::sph_bessel_y_array(L + 1, kR);
    auto j_in = sf::sph_bessel_j_array(L + 1, kiR);

    auto sph_prime = [](const std::vector<double>& z, int l, double x) {
        if (l == 0) return -z[1];
        return z[static_cast<std::size_t>(l - 1)] -
               ((l + 1.0) / x) * z[static_cast<std::size_t>(l)];
    };

    ModeTable t;
    t.truncation = L;
    t.b.resize(static_cast<std::size_t>(L) + 1);
    t.c.resize(static_cast<std::size_t>(L) + 1);
    for (int l = 0; l <= L; ++l) {
        const std::size_t ul = static_cast<std::size_t>(l);
        const double jl = j_out[ul];
        const double jl_p = sph_prime(j_out, l, kR);
        const double yl = y_out[ul];
        const double yl_p = (l == 0) ? -y_out[1]
                                     : y_out[ul - 1] - ((l + 1.0) / kR) * y_out[ul];
        const cdouble hl{jl, yl};
        const cdouble hl_p{jl_p, yl_p};
        const double gl = j_in[ul];
        const double gl_p = sph_prime(j_in, l, kiR);

        const cdouble a11 = hl, a12 = -gl;
        const cdouble a21 = k * hl_p, a22 = -ki * gl_p;
        const cdouble det = a11 * a22 - a12 * a21;
        const cdouble r1 = -jl * a[ul];
        const cdouble r2 = -k * jl_p * a[ul];
        t.b[ul] = (r1 * a22 - a12 * r2) / det;
        t.c[ul] = (a11 * r2 - r1 * a21) / det;
    }
    return t;
}

}  // namespace

ComplexField analytic_field(const HomogeneousScatterer& scatterer, const SourceSpec& source,
                            const std::vector<std::array<double, 3>>& points, double k_b,
                            const SeriesOptions& options) {
    if (!(scatterer.radius > 0.0) || !(scatterer.index > 0.0))
        throw InvalidInputError("analytic_field: radius and index must be positive");
    const int dim = scatterer.shape == HomogeneousScatterer::Shape::cylinder ? 2 : 3;
    const double k = k_b;
    const double ki = k_b * scatterer.index;
    const double R = scatterer.radius;

    // No contrast: every mode coefficient vanishes, total = incident.
    ComplexField out = ComplexField::at_sensors(static_cast<int>(points.size()));
    if (scatterer.index == 1.0) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            std::array<double, 3> x = points[i];
            if (source.kind == SourceSpec::Kind::plane_wave) {
                double phase = 0.0;
                for (int d = 0; d < dim; ++d) phase += source.direction[d] * x[d];
                out.values[i] = std::polar(1.0, k * phase);
            } else {
                std::array<double, 3> off{0, 0, 0};
                for (int d = 0; d < dim; ++d) off[d] = x[d] - source.location[d];
                out.values[i] = green_scalar(off, k, dim);
            }
        }
        return out;
    }

    // Geometry of the source relative to the scatterer center.
    double src_dist = 0.0, src_angle = 0.0;
    std::array<double, 3> axis{1, 0, 0};  // 3D symmetry axis, center -> source
    if (source.kind == SourceSpec::Kind::point_source) {
        std::array<double, 3> rel{0, 0, 0};
        for (int d = 0; d < dim; ++d) rel[d] = source.location[d] - scatterer.center[d];
        for (int d = 0; d < dim; ++d) src_dist += rel[d] * rel[d];
        src_dist = std::sqrt(src_dist);
        if (src_dist <= R)
            throw GeometryError("analytic_field: point source inside the scatterer");
        if (dim == 2) src_angle = std::atan2(rel[1], rel[0]);
        else
            for (int d = 0; d < 3; ++d) axis[d] = rel[d] / src_dist;
    } else {
        if (dim == 2) src_angle = std::atan2(source.direction[1], source.direction[0]);
        else
            axis = source.direction;
    }

    int M = options.truncation > 0 ? options.truncation
                                   : static_cast<int>(std::ceil(k * R)) + 15;
    for (;;) {
        // Incident expansion coefficients about the center, |m| dependence only.
        std::vector<cdouble> a(static_cast<std::size_t>(M) + 1);
        cdouble plane_phase = 1.0;
        if (source.kind == SourceSpec::Kind::plane_wave) {
            double cd = 0.0;
            for (int d = 0; d < dim; ++d) cd += source.direction[d] * scatterer.center[d];
            plane_phase = std::polar(1.0, k * cd);
        }
        if (dim == 2) {
            if (source.kind == SourceSpec::Kind::point_source) {
                auto js = sf::bessel_j_array(M, k * src_dist);
                auto ys = sf::bessel_y_array(M, k * src_dist);
                for (int m = 0; m <= M; ++m)
                    a[static_cast<std::size_t>(m)] =
                        cdouble(0.0, -0.25) *
                        cdouble{js[static_cast<std::size_t>(m)], ys[static_cast<std::size_t>(m)]};
            } else {
                cdouble jm{1.0, 0.0};
                for (int m = 0; m <= M; ++m) {
                    a[static_cast<std::size_t>(m)] = plane_phase * jm;
                    jm *= cdouble(0.0, 1.0);
                }
            }
        } else {
            if (source.kind == SourceSpec::Kind::point_source) {
                auto js = sf::sph_bessel_j_array(M, k * src_dist);
                auto ys = sf::sph_bessel_y_array(M, k * src_dist);
                for (int l = 0; l <= M; ++l) {
                    cdouble hl{js[static_cast<std::size_t>(l)], ys[static_cast<std::size_t>(l)]};
                    a[static_cast<std::size_t>(l)] =
                        cdouble(0.0, -k / (4.0 * pi)) * (2.0 * l + 1.0) * hl;
                }
            } else {
                cdouble il{1.0, 0.0};
                for (int l = 0; l <= M; ++l) {
                    a[static_cast<std::size_t>(l)] = plane_phase * (2.0 * l + 1.0) * il;
                    il *= cdouble(0.0, 1.0);
                }
            }
        }

        ModeTable modes = dim == 2 ? cylinder_modes(a, k, ki, R) : sphere_modes(a, k, ki, R);

        // Convergence of the truncated series, judged at the boundary where
        // the radial factors are largest relative to the field scale.
        double head = 0.0, tail = 0.0;
        {
            auto radial_out = dim == 2 ? sf::bessel_j_array(M, k * R)
                                       : sf::sph_bessel_j_array(M, k * R);
            auto radial_y = dim == 2 ? sf::bessel_y_array(M, k * R)
                                     : sf::sph_bessel_y_array(M, k * R);
            for (int m = 0; m <= M; ++m) {
                const std::size_t um = static_cast<std::size_t>(m);
                double mag = std::abs(modes.b[um] * cdouble{radial_out[um], radial_y[um]});
                if (m >= M - 1) tail = std::max(tail, mag);
                else head = std::max(head, mag);
            }
        }
        if (head > 0.0 && tail > options.tail_tol * head) {
            if (2 * M > options.max_truncation)
                throw NonConvergenceError(
                    "analytic_field: series truncation did not converge; increase truncation",
                    tail / head);
            M *= 2;
            continue;
        }

        // Sum the series at the evaluation points.
        for (std::size_t i = 0; i < points.size(); ++i) {
            std::array<double, 3> rel{0, 0, 0};
            for (int d = 0; d < dim; ++d) rel[d] = points[i][d] - scatterer.center[d];
            double r = 0.0;
            for (int d = 0; d < dim; ++d) r += rel[d] * rel[d];
            r = std::sqrt(r);

            if (dim == 2) {
                const double theta = std::atan2(rel[1], rel[0]);
                const double dtheta = theta - src_angle;
                if (r >= R) {
                    cdouble u;
                    if (source.kind == SourceSpec::Kind::point_source) {
                        std::array<double, 3> off{0, 0, 0};
                        for (int d = 0; d < 2; ++d) off[d] = points[i][d] - source.location[d];
                        u = green_scalar(off, k, 2);
                    } else {
                        double phase = 0.0;
                        for (int d = 0; d < 2; ++d) phase += source.direction[d] * points[i][d];
                        u = std::polar(1.0, k * phase);
                    }
                    auto jr = sf::bessel_j_array(M, k * r);
                    auto yr = sf::bessel_y_array(M, k * r);
                    for (int m = 0; m <= M; ++m) {
                        const std::size_t um = static_cast<std::size_t>(m);
                        cdouble h{jr[um], yr[um]};
                        double fold = m == 0 ? 1.0 : 2.0 * std::cos(m * dtheta);
                        u += modes.b[um] * h * fold;
                    }
                    out.values[i] = u;
                } else {
                    cdouble u = 0.0;
                    if (r == 0.0) {
                        u = modes.c[0] * 1.0;  // J_0(0) = 1, higher orders vanish
                    } else {
                        auto jr = sf::bessel_j_array(M, ki * r);
                        for (int m = 0; m <= M; ++m) {
                            const std::size_t um = static_cast<std::size_t>(m);
                            double fold = m == 0 ? 1.0 : 2.0 * std::cos(m * dtheta);
                            u += modes.c[um] * jr[um] * fold;
                        }
                    }
                    out.values[i] = u;
                }
            } else {
                double cos_gamma = 1.0;
                if (r > 0.0) {
                    double dot = 0.0;
                    for (int d = 0; d < 3; ++d) dot += rel[d] * axis[d];
                    cos_gamma = std::min(1.0, std::max(-1.0, dot / r));
                }
                auto pl = sf::legendre_array(M, cos_gamma);
                if (r >= R) {
                    cdouble u;
                    if (source.kind == SourceSpec::Kind::point_source) {
                        std::array<double, 3> off{0, 0, 0};
                        for (int d = 0; d < 3; ++d) off[d] = points[i][d] - source.location[d];
                        u = green_scalar(off, k, 3);
                    } else {
                        double phase = 0.0;
                        for (int d = 0; d < 3; ++d) phase += source.direction[d] * points[i][d];
                        u = std::polar(1.0, k * phase);
                    }
                    auto jr = sf::sph_bessel_j_array(M, k * r);
                    auto yr = sf::sph_bessel_y_array(M, k * r);
                    for (int l = 0; l <= M; ++l) {
                        const std::size_t ul = static_cast<std::size_t>(l);
                        u += modes.b[ul] * cdouble{jr[ul], yr[ul]} * pl[ul];
                    }
                    out.values[i] = u;
                } else {
                    cdouble u = 0.0;
                    if (r == 0.0) {
                        u = modes.c[0];  // j_0(0) = 1
                    } else {
                        auto jr = sf::sph_bessel_j_array(M, ki * r);
                        for (int l = 0; l <= M; ++l) {
                            const std::size_t ul = static_cast<std::size_t>(l);
                            u += modes.c[ul] * jr[ul] * pl[ul];
                        }
                    }
                    out.values[i] = u;
                }
            }
        }
        return out;
    }
}

ComplexField analytic_field(const HomogeneousScatterer& scatterer, const SourceSpec& source,
                            const Grid& grid, double k_b, const SeriesOptions& options) {
    std::vector<std::array<double, 3>> points(grid.num_samples());
    for (std::size_t i = 0; i < points.size(); ++i) points[i] = grid.sample_coords(i);
    ComplexField flat = analytic_field(scatterer, source, points, k_b, options);
    ComplexField out = ComplexField::on_grid(grid);
    out.values = std::move(flat.values);
    return out;
}

DirectSolveResult direct_solve(const InteriorOperator& green, const ScatteringPotential& f,
                               const ComplexField& u_in, double tol, int max_iters) {
    if (!(tol > 0.0)) throw InvalidInputError("direct_solve: tol must be positive");
    const SystemOperator A(green, f);
    const std::size_t n = u_in.values.size();
    const double target = tol * norm2(u_in.values);

    // BiCGSTAB with x0 = u_in.
    ComplexField x = u_in;
    ComplexField r = A.apply(x);
    for (std::size_t i = 0; i < n; ++i) r.values[i] = u_in.values[i] - r.values[i];
    double r_norm = norm2(r.values);
    if (r_norm <= target) return {std::move(x), 0, r_norm};

    const ComplexField r0 = r;
    ComplexField p = r;
    cdouble rho_prev = inner(r0.values, r.values);
    if (rho_prev == cdouble{})
        throw SolverBreakdownError("direct_solve: initial shadow product vanished");

    for (int it = 1; it <= max_iters; ++it) {
        ComplexField Ap = A.apply(p);
        cdouble denom = inner(r0.values, Ap.values);
        if (denom == cdouble{}) throw SolverBreakdownError("direct_solve: breakdown in alpha");
        cdouble alpha = rho_prev / denom;

        ComplexField s = r;
        for (std::size_t i = 0; i < n; ++i) s.values[i] -= alpha * Ap.values[i];
        double s_norm = norm2(s.values);
        if (s_norm <= target) {
            for (std::size_t i = 0; i < n; ++i) x.values[i] += alpha * p.values[i];
            return {std::move(x), it, s_norm};
        }

        ComplexField As = A.apply(s);
        double as_sq = norm2sq(As.values);
        if (as_sq == 0.0) throw SolverBreakdownError("direct_solve: breakdown in omega");
        cdouble omega = inner(As.values, s.values) / as_sq;

        for (std::size_t i = 0; i < n; ++i)
            x.values[i] += alpha * p.values[i] + omega * s.values[i];
        for (std::size_t i = 0; i < n; ++i) r.values[i] = s.values[i] - omega * As.values[i];

        r_norm = norm2(r.values);
        if (r_norm <= target) return {std::move(x), it, r_norm};

        cdouble rho = inner(r0.values, r.values);
        if (rho == cdouble{} || omega == cdouble{})
            throw SolverBreakdownError("direct_solve: stagnation in rho/omega");
        cdouble beta = (rho / rho_prev) * (alpha / omega);
        rho_prev = rho;
        for (std::size_t i = 0; i < n; ++i)
            p.values[i] = r.values[i] + beta * (p.values[i] - omega * Ap.values[i]);
    }
    throw NonConvergenceError("direct_solve: BiCGSTAB did not reach tolerance", r_norm);
}

double fd_gradient(const InteriorOperator& green, const SensorOperator& sensor_op,
                   const ScatteringPotential& f, const MeasurementSet& measurements,
                   const std::vector<ForwardRecord>& records, std::size_t component, double h) {
    if (!(h > 0.0)) throw InvalidInputError("fd_gradient: h must be positive");
    if (records.size() != static_cast<std::size_t>(measurements.num_sources()))
        throw InvalidInputError("fd_gradient: one record per source required");

    auto replay_fit = [&](const ScatteringPotential& fp) {
        double acc = 0.0;
        for (int s = 0; s < measurements.num_sources(); ++s) {
            const auto& entry = measurements.entries[static_cast<std::size_t>(s)];
            ComplexField u_in = incident_field(entry.source, fp.grid);
            ComplexField u_in_s = incident_field(entry.source, measurements.sensors, fp.grid.dim);
            ComplexField u_hat = replay_forward(green, sensor_op,
                                                records[static_cast<std::size_t>(s)], fp, u_in,
                                                u_in_s);
            for (std::size_t i = 0; i < u_hat.values.size(); ++i)
                acc += std::norm(u_hat.values[i] - entry.m.values[i]);
        }
        return 0.5 * acc;
    };

    ScatteringPotential plus = f;
    plus.values[component] += h;
    ScatteringPotential minus = f;
    minus.values[component] -= h;
    return (replay_fit(plus) - replay_fit(minus)) / (2.0 * h);
}

MeasurementSet synthesize_measurements(const ScatteringPotential& fine_potential,
                                       const std::vector<SourceSpec>& sources,
                                       const SensorArray& sensors, const Grid& recon_grid,
                                       const SynthesisOptions& options) {
    if (sources.empty()) throw InvalidInputError("synthesize_measurements: no sources");
    const Grid& fine = fine_potential.grid;
    if (fine == recon_grid && !options.allow_inverse_crime)
        throw InverseCrimeError(
            "synthesize_measurements: simulation grid equals the reconstruction grid");
    if (!options.allow_inverse_crime && fine.pixel_size >= recon_grid.pixel_size)
        throw InverseCrimeError(
            "synthesize_measurements: simulation grid must be strictly finer than the "
            "reconstruction grid");

    InteriorOperator green(fine, sources.front().wavenumber);
    SensorOperator sensor_op(fine, sensors, sources.front().wavenumber);

    MeasurementSet ms;
    ms.sensors = sensors;
    for (std::size_t s = 0; s < sources.size(); ++s) {
        const SourceSpec& src = sources[s];
        if (src.wavenumber != sources.front().wavenumber)
            throw InvalidInputError("synthesize_measurements: mixed wavenumbers");
        src.validate_against(fine);
        ComplexField u_in = incident_field(src, fine);
        ComplexField u_in_s = incident_field(src, sensors, fine.dim);
        DirectSolveResult sol =
            direct_solve(green, fine_potential, u_in, options.direct_tol, options.direct_max_iters);

        ComplexField fu = sol.u;
        for (std::size_t i = 0; i < fu.values.size(); ++i)
            fu.values[i] *= fine_potential.values[i];
        ComplexField m = sensor_op.apply(fu);
        for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] += u_in_s.values[i];

        if (options.snr_db) {
            // Per-component sigma for the requested stacked SNR; the stream
            // is keyed to (seed, source) so scheduling cannot change draws.
            const double signal = norm2sq(m.values);
            const double snr = std::pow(10.0, *options.snr_db / 10.0);
            const double sigma =
                std::sqrt(signal / (snr * 2.0 * static_cast<double>(m.values.size())));
            std::uint64_t state = options.seed * 0x9e3779b97f4a7c15ull + (s + 1) * 0xbf58476d1ce4e5b9ull;
            auto next_u64 = [&state]() {
                state ^= state >> 12;
                state ^= state << 25;
                state ^= state >> 27;
                return state * 0x2545f4914f6cdd1dull;
            };
            auto uniform = [&]() {
                return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
            };
            for (cdouble& z : m.values) {
                // Box-Muller, fully pinned across platforms.
                double u1 = uniform(), u2 = uniform();
                double mag = std::sqrt(-2.0 * std::log(u1));
                z += sigma * cdouble{mag * std::cos(2.0 * pi * u2),
                                     mag * std::sin(2.0 * pi * u2)};
            }
        }
        ms.entries.push_back(SourceMeasurement{src, std::move(m)});
    }
    return ms;
}

}  // namespace seagle
