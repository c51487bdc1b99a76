#include "seagle/gradient.hpp"

#include <cmath>

#include "seagle/parallel.hpp"

namespace seagle {

void MeasurementSet::validate(const Grid& domain) const {
    sensors.validate_against(domain);
    if (entries.empty()) throw InvalidInputError("MeasurementSet: no sources");
    for (const auto& e : entries) {
        e.source.validate_against(domain);
        if (e.m.tag != ComplexField::Tag::sensor || e.m.sensor_count != sensors.count())
            throw GeometryError("MeasurementSet: measurement length does not match sensor count");
        for (const cdouble& z : e.m.values)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw InvalidInputError("MeasurementSet: non-finite measurement entry");
    }
}

double MeasurementSet::stacked_norm_sq() const {
    double s = 0.0;
    for (const auto& e : entries) s += norm2sq(e.m.values);
    return s;
}

FidelityResult data_fidelity(const InteriorOperator& green, const SensorOperator& sensor_op,
                             const ScatteringPotential& f, const MeasurementSet& measurements,
                             const ForwardOptions& options, int jobs) {
    measurements.validate(f.grid);
    const int ns = measurements.num_sources();
    FidelityResult out;
    out.records.resize(static_cast<std::size_t>(ns));
    std::vector<double> partial(static_cast<std::size_t>(ns), 0.0);

    parallel_for_index(ns, jobs, [&](int s) {
        const auto& entry = measurements.entries[static_cast<std::size_t>(s)];
        ComplexField u_in = incident_field(entry.source, f.grid);
        ComplexField u_in_s = incident_field(entry.source, measurements.sensors, f.grid.dim);
        ForwardOptions opts = options;
        if (!opts.spill_dir.empty()) opts.spill_dir += "/src_" + std::to_string(s);
        ForwardRecord rec = solve_forward(green, sensor_op, f, u_in, u_in_s, opts);
        double acc = 0.0;
        for (std::size_t i = 0; i < rec.u_hat.values.size(); ++i)
            acc += std::norm(rec.u_hat.values[i] - entry.m.values[i]);
        partial[static_cast<std::size_t>(s)] = 0.5 * acc;
        out.records[static_cast<std::size_t>(s)] = std::move(rec);
    });

    for (double v : partial) out.value += v;  // fixed source order
    return out;
}

namespace {

bool same_snapshot(const ScatteringPotential& a, const ScatteringPotential& b) {
    if (!(a.grid == b.grid) || a.values.size() != b.values.size()) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        if (a.values[i] != b.values[i]) return false;
    return true;
}

/// One backward error-propagation sweep for a single source.
RealField backward_single(const InteriorOperator& green, const SensorOperator& sensor_op,
                          const ScatteringPotential& f, const SourceMeasurement& entry,
                          const ForwardRecord& rec) {
    if (!same_snapshot(rec.f_snapshot, f))
        throw StaleRecordError("data_gradient: record was produced for a different potential");
    if (!rec.history_recorded && rec.k_eff > 0)
        throw InvalidInputError("data_gradient: forward record has no iterate history");

    const SystemOperator A(green, f);
    ComplexField u_in = incident_field(entry.source, f.grid);

    // Residual at the sensors feeds both seeds through G~^H.
    ComplexField e = rec.u_hat;
    for (std::size_t i = 0; i < e.values.size(); ++i) e.values[i] -= entry.m.values[i];
    ComplexField gse = sensor_op.apply_adjoint(e);

    const std::size_t n = f.values.size();
    ComplexField q = gse;
    for (std::size_t i = 0; i < n; ++i) q.values[i] *= std::conj(cdouble(f.values[i]));
    ComplexField r = gse;
    for (std::size_t i = 0; i < n; ++i) r.values[i] *= std::conj(rec.u_final.values[i]);
    ComplexField p = ComplexField::on_grid(f.grid);

    for (int k = rec.k_eff; k >= 1; --k) {
        const double gamma_k = rec.gamma[static_cast<std::size_t>(k - 1)];
        const double mu_k = rec.mu[static_cast<std::size_t>(k - 1)];
        ComplexField y_k = rec.y.get(k - 1);

        ComplexField w_k = rec.adjoint_residuals_cached
                               ? rec.w.get(k - 1)
                               : [&] {
                                     ComplexField ry = A.apply(y_k);
                                     for (std::size_t i = 0; i < n; ++i)
                                         ry.values[i] -= u_in.values[i];
                                     return green.apply(ry, true);
                                 }();

        // S_k q = q - gamma_k A^H (A q)
        ComplexField Sq;
        {
            ComplexField Aq = A.apply(q);
            ComplexField AhAq = A.apply_adjoint(Aq);
            Sq = q;
            for (std::size_t i = 0; i < n; ++i) Sq.values[i] -= gamma_k * AhAq.values[i];
        }

        // T_k q = conj(w_k) . q + conj(y_k) . G^H (A q)
        ComplexField Tq;
        {
            ComplexField Aq = A.apply(q);
            ComplexField GhAq = green.apply(Aq, true);
            Tq = ComplexField::on_grid(f.grid);
            for (std::size_t i = 0; i < n; ++i)
                Tq.values[i] = std::conj(w_k.values[i]) * q.values[i] +
                               std::conj(y_k.values[i]) * GhAq.values[i];
        }

        ComplexField p_next = Sq;
        for (std::size_t i = 0; i < n; ++i) p_next.values[i] *= -mu_k;
        ComplexField q_next = p;
        for (std::size_t i = 0; i < n; ++i) q_next.values[i] += (1.0 + mu_k) * Sq.values[i];
        for (std::size_t i = 0; i < n; ++i) r.values[i] += gamma_k * Tq.values[i];

        p = std::move(p_next);
        q = std::move(q_next);
    }

    RealField grad = RealField::zeros(f.grid);
    for (std::size_t i = 0; i < n; ++i) grad.values[i] = r.values[i].real();
    return grad;
}

}  // namespace

RealField data_gradient(const InteriorOperator& green, const SensorOperator& sensor_op,
                        const ScatteringPotential& f, const MeasurementSet& measurements,
                        const std::vector<ForwardRecord>& records, int jobs) {
    measurements.validate(f.grid);
    if (records.size() != static_cast<std::size_t>(measurements.num_sources()))
        throw InvalidInputError("data_gradient: one record per source required");

    const int ns = measurements.num_sources();
    std::vector<RealField> partial(static_cast<std::size_t>(ns));
    parallel_for_index(ns, jobs, [&](int s) {
        partial[static_cast<std::size_t>(s)] =
            backward_single(green, sensor_op, f, measurements.entries[static_cast<std::size_t>(s)],
                            records[static_cast<std::size_t>(s)]);
    });

    RealField total = RealField::zeros(f.grid);
    for (const RealField& g : partial)  // fixed source order
        for (std::size_t i = 0; i < total.values.size(); ++i) total.values[i] += g.values[i];
    return total;
}

}  // namespace seagle
