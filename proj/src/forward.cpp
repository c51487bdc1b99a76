#include "seagle/forward.hpp"

#include <cmath>
#include <filesystem>

#include "seagle/gridio.hpp"

namespace seagle {

SystemOperator::SystemOperator(const InteriorOperator& green, const ScatteringPotential& f)
    : green_(green), f_(f) {
    require_same_grid(green.grid(), f.grid, "SystemOperator");
}

ComplexField SystemOperator::apply(const ComplexField& u) const {
    require_same_grid(u.grid, f_.grid, "SystemOperator::apply");
    ComplexField fu = u;
    for (std::size_t i = 0; i < fu.values.size(); ++i) fu.values[i] *= f_.values[i];
    ComplexField gfu = green_.apply(fu, false);
    ComplexField out = u;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= gfu.values[i];
    return out;
}

ComplexField SystemOperator::apply_adjoint(const ComplexField& u) const {
    require_same_grid(u.grid, f_.grid, "SystemOperator::apply_adjoint");
    ComplexField gu = green_.apply(u, true);
    ComplexField out = u;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] -= std::conj(cdouble(f_.values[i])) * gu.values[i];
    return out;
}

namespace {

cdouble incident_value(const SourceSpec& source, const std::array<double, 3>& x, int dim) {
    if (source.kind == SourceSpec::Kind::plane_wave) {
        double phase = 0.0;
        for (int d = 0; d < dim; ++d) phase += source.direction[d] * x[d];
        return std::polar(1.0, source.wavenumber * phase);
    }
    std::array<double, 3> off{0, 0, 0};
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) {
        off[d] = x[d] - source.location[d];
        r2 += off[d] * off[d];
    }
    if (!(r2 > 0.0))
        throw SingularityError("incident_field: point source coincides with a target sample");
    return green_scalar(off, source.wavenumber, dim);
}

}  // namespace

ComplexField incident_field(const SourceSpec& source, const Grid& targets) {
    ComplexField out = ComplexField::on_grid(targets);
    const std::size_t n = targets.num_samples();
    for (std::size_t i = 0; i < n; ++i)
        out.values[i] = incident_value(source, targets.sample_coords(i), targets.dim);
    return out;
}

ComplexField incident_field(const SourceSpec& source, const SensorArray& targets, int dim) {
    if (dim != 2 && dim != 3) throw InvalidInputError("incident_field: dim must be 2 or 3");
    ComplexField out = ComplexField::at_sensors(targets.count());
    for (int m = 0; m < targets.count(); ++m)
        out.values[static_cast<std::size_t>(m)] =
            incident_value(source, targets.points[static_cast<std::size_t>(m)], dim);
    return out;
}

FieldSequence::FieldSequence(std::string spill_dir, std::string prefix)
    : dir_(std::move(spill_dir)), prefix_(std::move(prefix)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

void FieldSequence::push(const ComplexField& f) {
    if (dir_.empty()) {
        mem_.push_back(f);
    } else {
        write_complex_field(std::filesystem::path(dir_) /
                                (prefix_ + "_" + std::to_string(count_)),
                            f);
    }
    ++count_;
}

ComplexField FieldSequence::get(int k) const {
    if (k < 0 || k >= count_) throw InvalidInputError("FieldSequence::get: index out of range");
    if (dir_.empty()) return mem_[static_cast<std::size_t>(k)];
    return read_complex_field(std::filesystem::path(dir_) /
                              (prefix_ + "_" + std::to_string(k)));
}

namespace {

void axpy(ComplexField& y, double a, const ComplexField& x) {
    for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += a * x.values[i];
}

}  // namespace

ForwardRecord solve_forward(const InteriorOperator& green, const SensorOperator& sensor_op,
                            const ScatteringPotential& f, const ComplexField& u_in,
                            const ComplexField& u_in_sensors, const ForwardOptions& options) {
    require_same_grid(green.grid(), f.grid, "solve_forward");
    require_same_grid(u_in.grid, f.grid, "solve_forward");
    if (options.max_iters < 1) throw InvalidInputError("solve_forward: max_iters must be >= 1");
    if (u_in_sensors.sensor_count != sensor_op.sensors().count())
        throw GeometryError("solve_forward: incident sensor field count mismatch");

    const SystemOperator A(green, f);
    const double norm_uin = norm2(u_in.values);
    const double norm_uin_sq = norm_uin * norm_uin;
    const double g_tol =
        options.gradient_tol > 0.0 ? options.gradient_tol : 5e-7 * norm_uin;

    ForwardRecord rec;
    rec.f_snapshot = f;
    rec.history_recorded = options.record_history;
    rec.adjoint_residuals_cached = options.record_history && options.cache_adjoint_residuals;
    if (options.record_history) {
        rec.y = FieldSequence(options.spill_dir, "y");
        if (rec.adjoint_residuals_cached) rec.w = FieldSequence(options.spill_dir, "w");
    }
    if (options.warm_start) {
        require_same_grid(options.warm_start->grid, f.grid, "solve_forward warm start");
        rec.warm_start = options.warm_start;
    }
    const ComplexField& u_init = options.warm_start ? *options.warm_start : u_in;

    ComplexField u_prev2 = u_init;  // u_{k-2}
    ComplexField u_prev = u_init;   // u_{k-1}
    double t_prev = 0.0;

    for (int k = 1; k <= options.max_iters; ++k) {
        const double t_k = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_prev * t_prev));
        const double mu_k = (t_prev - 1.0) / t_k;

        ComplexField y = u_prev;
        for (std::size_t i = 0; i < y.values.size(); ++i)
            y.values[i] += mu_k * (u_prev.values[i] - u_prev2.values[i]);

        // v = A^H (A y - u_in); keep G^H of the residual for the backward pass.
        ComplexField r_y = A.apply(y);
        for (std::size_t i = 0; i < r_y.values.size(); ++i) r_y.values[i] -= u_in.values[i];
        ComplexField ghr = green.apply(r_y, true);
        ComplexField v = r_y;
        for (std::size_t i = 0; i < v.values.size(); ++i)
            v.values[i] -= std::conj(cdouble(f.values[i])) * ghr.values[i];

        const double v_norm_sq = norm2sq(v.values);
        if (options.stop == ForwardStop::gradient && std::sqrt(v_norm_sq) < g_tol) break;

        ComplexField Av = A.apply(v);
        const double av_norm_sq = norm2sq(Av.values);
        if (av_norm_sq == 0.0) {
            if (v_norm_sq > 0.0)
                throw SolverBreakdownError("solve_forward: ||A v|| vanished with nonzero gradient");
            break;  // exact stationary point
        }
        const double gamma_k = v_norm_sq / av_norm_sq;

        ComplexField u_k = y;
        axpy(u_k, -gamma_k, v);

        rec.gamma.push_back(gamma_k);
        rec.mu.push_back(mu_k);
        if (options.record_history) {
            rec.y.push(y);
            if (rec.adjoint_residuals_cached) rec.w.push(ghr);
        }
        rec.k_eff = k;

        u_prev2 = std::move(u_prev);
        u_prev = std::move(u_k);
        t_prev = t_k;

        if (options.stop == ForwardStop::objective) {
            // A u_k - u_in = (A y - u_in) - gamma_k A v, no extra applies.
            double res_sq = 0.0;
            for (std::size_t i = 0; i < r_y.values.size(); ++i)
                res_sq += std::norm(r_y.values[i] - gamma_k * Av.values[i]);
            if (res_sq <= options.objective_tol_rel * norm_uin_sq) break;
        }
    }

    rec.u_final = std::move(u_prev);

    // Predicted field at the sensors: u_hat = u_in(sensors) + G~ diag(f) u_K.
    ComplexField fu = rec.u_final;
    for (std::size_t i = 0; i < fu.values.size(); ++i) fu.values[i] *= f.values[i];
    rec.u_hat = sensor_op.apply(fu);
    for (std::size_t i = 0; i < rec.u_hat.values.size(); ++i)
        rec.u_hat.values[i] += u_in_sensors.values[i];

    // Report the residual of the returned field directly, not via recurrences.
    ComplexField final_res = A.apply(rec.u_final);
    for (std::size_t i = 0; i < final_res.values.size(); ++i)
        final_res.values[i] -= u_in.values[i];
    rec.residual_norm = norm2(final_res.values);
    return rec;
}

ComplexField replay_forward(const InteriorOperator& green, const SensorOperator& sensor_op,
                            const ForwardRecord& record, const ScatteringPotential& f,
                            const ComplexField& u_in, const ComplexField& u_in_sensors) {
    require_same_grid(green.grid(), f.grid, "replay_forward");
    require_same_grid(u_in.grid, f.grid, "replay_forward");
    if (record.gamma.size() != static_cast<std::size_t>(record.k_eff) ||
        record.mu.size() != static_cast<std::size_t>(record.k_eff))
        throw InvalidInputError("replay_forward: record history length mismatch");

    const SystemOperator A(green, f);
    const ComplexField& u_init = record.warm_start ? *record.warm_start : u_in;
    ComplexField u_prev2 = u_init;
    ComplexField u_prev = u_init;

    for (int k = 1; k <= record.k_eff; ++k) {
        const double mu_k = record.mu[static_cast<std::size_t>(k - 1)];
        const double gamma_k = record.gamma[static_cast<std::size_t>(k - 1)];

        ComplexField y = u_prev;
        for (std::size_t i = 0; i < y.values.size(); ++i)
            y.values[i] += mu_k * (u_prev.values[i] - u_prev2.values[i]);

        ComplexField r_y = A.apply(y);
        for (std::size_t i = 0; i < r_y.values.size(); ++i) r_y.values[i] -= u_in.values[i];
        ComplexField ghr = green.apply(r_y, true);
        ComplexField v = r_y;
        for (std::size_t i = 0; i < v.values.size(); ++i)
            v.values[i] -= std::conj(cdouble(f.values[i])) * ghr.values[i];

        ComplexField u_k = y;
        axpy(u_k, -gamma_k, v);

        u_prev2 = std::move(u_prev);
        u_prev = std::move(u_k);
    }

    ComplexField fu = u_prev;
    for (std::size_t i = 0; i < fu.values.size(); ++i) fu.values[i] *= f.values[i];
    ComplexField u_hat = sensor_op.apply(fu);
    for (std::size_t i = 0; i < u_hat.values.size(); ++i)
        u_hat.values[i] += u_in_sensors.values[i];
    return u_hat;
}

}  // namespace seagle
