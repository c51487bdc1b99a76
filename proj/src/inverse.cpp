#include "seagle/inverse.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "seagle/parallel.hpp"

namespace seagle {

ComplexField forward_born(const SensorOperator& sensor_op, const ComplexField& u_in,
                          const ComplexField& u_in_sensors, const ScatteringPotential& f) {
    require_same_grid(u_in.grid, f.grid, "forward_born");
    ComplexField fu = u_in;
    for (std::size_t i = 0; i < fu.values.size(); ++i) fu.values[i] *= f.values[i];
    ComplexField out = sensor_op.apply(fu);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += u_in_sensors.values[i];
    return out;
}

ComplexField forward_rytov(const SensorOperator& sensor_op, const ComplexField& u_in,
                           const ComplexField& u_in_sensors, const ScatteringPotential& f) {
    require_same_grid(u_in.grid, f.grid, "forward_rytov");
    ComplexField fu = u_in;
    for (std::size_t i = 0; i < fu.values.size(); ++i) fu.values[i] *= f.values[i];
    ComplexField out = sensor_op.apply(fu);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (u_in_sensors.values[i] == cdouble{})
            throw InvalidInputError("forward_rytov: incident field vanishes at a sensor");
        out.values[i] /= u_in_sensors.values[i];
    }
    return out;
}

RytovData rytov_transform(const ComplexField& m, const ComplexField& u_in_sensors,
                          const SensorArray& sensors) {
    if (m.sensor_count != sensors.count() || u_in_sensors.sensor_count != sensors.count())
        throw GeometryError("rytov_transform: sensor count mismatch");
    const int n = sensors.count();
    RytovData out;
    out.phi = ComplexField::at_sensors(n);
    out.mask.assign(static_cast<std::size_t>(n), true);

    std::vector<double> raw_phase(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const cdouble mi = m.values[static_cast<std::size_t>(i)];
        const cdouble ui = u_in_sensors.values[static_cast<std::size_t>(i)];
        if (mi == cdouble{} || ui == cdouble{}) {
            out.mask[static_cast<std::size_t>(i)] = false;
            continue;
        }
        const cdouble ratio = mi / ui;
        out.phi.values[static_cast<std::size_t>(i)].real(std::log(std::abs(ratio)));
        raw_phase[static_cast<std::size_t>(i)] = std::arg(ratio);
    }

    // 1D phase unwrap within each detector segment, in sensor order.
    const double two_pi = 2.0 * std::numbers::pi;
    for (int s = 0; s < sensors.num_segments(); ++s) {
        auto [begin, end] = sensors.segment(s);
        double offset = 0.0;
        double prev = 0.0;
        bool have_prev = false;
        for (int i = begin; i < end; ++i) {
            if (!out.mask[static_cast<std::size_t>(i)]) continue;
            double ph = raw_phase[static_cast<std::size_t>(i)];
            if (have_prev) {
                double d = ph - prev;
                d -= two_pi * std::round(d / two_pi);
                offset += d;
            } else {
                offset = ph;
            }
            out.phi.values[static_cast<std::size_t>(i)].imag(offset);
            prev = ph;
            have_prev = true;
        }
    }
    return out;
}

ComplexField rytov_field(const ComplexField& phi, const ComplexField& u_in_sensors) {
    if (phi.sensor_count != u_in_sensors.sensor_count)
        throw GeometryError("rytov_field: sensor count mismatch");
    ComplexField out = u_in_sensors;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] *= std::exp(phi.values[i]);
    return out;
}

double normalized_error(const ScatteringPotential& estimate, const ScatteringPotential& truth) {
    require_same_grid(estimate.grid, truth.grid, "normalized_error");
    double num = 0.0;
    for (std::size_t i = 0; i < truth.values.size(); ++i) {
        double d = estimate.values[i] - truth.values[i];
        num += d * d;
    }
    double den = norm2sq(truth.values);
    if (den == 0.0) throw InvalidInputError("normalized_error: zero-norm ground truth");
    return num / den;
}

double normalized_data_fit(const ComplexField& predicted, const ComplexField& measured) {
    if (predicted.values.size() != measured.values.size())
        throw InvalidInputError("normalized_data_fit: size mismatch");
    double num = 0.0;
    for (std::size_t i = 0; i < measured.values.size(); ++i)
        num += std::norm(predicted.values[i] - measured.values[i]);
    double den = norm2sq(measured.values);
    if (den == 0.0) throw InvalidInputError("normalized_data_fit: zero-norm measurement");
    return num / den;
}

std::string ReconstructionHistory::to_csv() const {
    std::ostringstream os;
    os << "iter,data_fit,norm_data_fit,norm_error,step,wall_s\n";
    os.precision(17);
    for (const auto& r : rows) {
        os << r.iter << ',' << r.data_fit << ',' << r.norm_data_fit << ',';
        if (r.norm_error >= 0.0)
            os << r.norm_error;
        os << ',' << r.step << ',' << r.wall_s << "\n";
    }
    return os.str();
}

namespace {

/// Per-source incident fields, shared by every outer iteration.
struct SourceContext {
    ComplexField u_in;
    ComplexField u_in_sensors;
    RytovData rytov;  // populated for the Rytov model
};

struct Evaluation {
    double value = 0.0;          // D(f) in the model domain
    double stacked_resid = 0.0;  // sum_s ||u_hat - m||^2 in the model domain
    RealField gradient;
    bool with_gradient = false;
};

class DataTerm {
public:
    DataTerm(const InteriorOperator& green, const SensorOperator& sensor_op,
             const MeasurementSet& ms, const ReconstructionConfig& cfg)
        : green_(green), sensor_op_(sensor_op), ms_(ms), cfg_(cfg) {
        contexts_.resize(static_cast<std::size_t>(ms.num_sources()));
        for (int s = 0; s < ms.num_sources(); ++s) {
            auto& ctx = contexts_[static_cast<std::size_t>(s)];
            const auto& src = ms.entries[static_cast<std::size_t>(s)].source;
            ctx.u_in = incident_field(src, green.grid());
            ctx.u_in_sensors = incident_field(src, ms.sensors, green.grid().dim);
            if (cfg.model == ForwardModel::rytov)
                ctx.rytov = rytov_transform(ms.entries[static_cast<std::size_t>(s)].m,
                                            ctx.u_in_sensors, ms.sensors);
        }
    }

    Evaluation evaluate(const ScatteringPotential& f, bool with_gradient) const {
        switch (cfg_.model) {
            case ForwardModel::seagle: return eval_seagle(f, with_gradient);
            case ForwardModel::born: return eval_linear(f, with_gradient, false);
            case ForwardModel::rytov: return eval_linear(f, with_gradient, true);
        }
        throw InvalidInputError("reconstruct: unknown model");
    }

    /// Power-iteration estimate of the stacked Born operator norm, used as
    /// the default 1/step.
    double born_lipschitz() const {
        RealField v = RealField::zeros(green_.grid());
        std::uint64_t state = 0x9e3779b97f4a7c15ull;
        for (double& x : v.values) {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            x = static_cast<double>((state >> 11) & 0xffffffff) / 4294967296.0 - 0.5;
        }
        double lambda = 0.0;
        for (int it = 0; it < 30; ++it) {
            double nv = norm2(v.values);
            if (nv == 0.0) break;
            for (double& x : v.values) x /= nv;
            RealField next = RealField::zeros(green_.grid());
            for (const auto& ctx : contexts_) {
                ComplexField fu = ctx.u_in;
                for (std::size_t i = 0; i < fu.values.size(); ++i) fu.values[i] *= v.values[i];
                ComplexField bs = sensor_op_.apply(fu);
                ComplexField back = sensor_op_.apply_adjoint(bs);
                for (std::size_t i = 0; i < next.values.size(); ++i)
                    next.values[i] += (std::conj(ctx.u_in.values[i]) * back.values[i]).real();
            }
            lambda = norm2(next.values);
            v = std::move(next);
        }
        return lambda;
    }

private:
    Evaluation eval_seagle(const ScatteringPotential& f, bool with_gradient) const {
        Evaluation ev;
        const int ns = ms_.num_sources();
        std::vector<double> val(static_cast<std::size_t>(ns), 0.0);
        std::vector<double> resid(static_cast<std::size_t>(ns), 0.0);
        std::vector<RealField> grads(static_cast<std::size_t>(ns));

        parallel_for_index(ns, cfg_.jobs, [&](int s) {
            const auto& ctx = contexts_[static_cast<std::size_t>(s)];
            const auto& entry = ms_.entries[static_cast<std::size_t>(s)];
            ForwardOptions opts = cfg_.forward;
            opts.record_history = with_gradient;
            ForwardRecord rec =
                solve_forward(green_, sensor_op_, f, ctx.u_in, ctx.u_in_sensors, opts);
            double acc = 0.0;
            for (std::size_t i = 0; i < rec.u_hat.values.size(); ++i)
                acc += std::norm(rec.u_hat.values[i] - entry.m.values[i]);
            resid[static_cast<std::size_t>(s)] = acc;
            val[static_cast<std::size_t>(s)] = 0.5 * acc;
            if (with_gradient) {
                MeasurementSet single{ms_.sensors, {entry}};
                std::vector<ForwardRecord> recs;
                recs.push_back(std::move(rec));
                grads[static_cast<std::size_t>(s)] =
                    data_gradient(green_, sensor_op_, f, single, recs, 1);
            }
        });

        for (int s = 0; s < ns; ++s) {
            ev.value += val[static_cast<std::size_t>(s)];
            ev.stacked_resid += resid[static_cast<std::size_t>(s)];
        }
        if (with_gradient) {
            ev.gradient = RealField::zeros(f.grid);
            for (const auto& g : grads)
                for (std::size_t i = 0; i < ev.gradient.values.size(); ++i)
                    ev.gradient.values[i] += g.values[i];
            ev.with_gradient = true;
        }
        return ev;
    }

    Evaluation eval_linear(const ScatteringPotential& f, bool with_gradient, bool rytov) const {
        Evaluation ev;
        const int ns = ms_.num_sources();
        std::vector<double> val(static_cast<std::size_t>(ns), 0.0);
        std::vector<double> resid(static_cast<std::size_t>(ns), 0.0);
        std::vector<RealField> grads(static_cast<std::size_t>(ns));

        parallel_for_index(ns, cfg_.jobs, [&](int s) {
            const auto& ctx = contexts_[static_cast<std::size_t>(s)];
            const auto& entry = ms_.entries[static_cast<std::size_t>(s)];

            ComplexField predicted =
                rytov ? forward_rytov(sensor_op_, ctx.u_in, ctx.u_in_sensors, f)
                      : forward_born(sensor_op_, ctx.u_in, ctx.u_in_sensors, f);
            ComplexField residual = predicted;
            const std::size_t msize = residual.values.size();
            for (std::size_t i = 0; i < msize; ++i) {
                if (rytov) {
                    if (!ctx.rytov.mask[i]) {
                        residual.values[i] = cdouble{};
                        continue;
                    }
                    residual.values[i] -= ctx.rytov.phi.values[i];
                } else {
                    residual.values[i] -= entry.m.values[i];
                }
            }
            double acc = norm2sq(residual.values);
            resid[static_cast<std::size_t>(s)] = acc;
            val[static_cast<std::size_t>(s)] = 0.5 * acc;

            if (with_gradient) {
                // Adjoint of f -> G~ diag(u_in) f (scaled by 1/u_in at the
                // sensors for Rytov) applied to the residual.
                ComplexField e = residual;
                if (rytov)
                    for (std::size_t i = 0; i < msize; ++i)
                        e.values[i] /= std::conj(ctx.u_in_sensors.values[i]);
                ComplexField back = sensor_op_.apply_adjoint(e);
                RealField g = RealField::zeros(f.grid);
                for (std::size_t i = 0; i < g.values.size(); ++i)
                    g.values[i] = (std::conj(ctx.u_in.values[i]) * back.values[i]).real();
                grads[static_cast<std::size_t>(s)] = std::move(g);
            }
        });

        for (int s = 0; s < ns; ++s) {
            ev.value += val[static_cast<std::size_t>(s)];
            ev.stacked_resid += resid[static_cast<std::size_t>(s)];
        }
        if (with_gradient) {
            ev.gradient = RealField::zeros(f.grid);
            for (const auto& g : grads)
                for (std::size_t i = 0; i < ev.gradient.values.size(); ++i)
                    ev.gradient.values[i] += g.values[i];
            ev.with_gradient = true;
        }
        return ev;
    }

    const InteriorOperator& green_;
    const SensorOperator& sensor_op_;
    const MeasurementSet& ms_;
    const ReconstructionConfig& cfg_;
    std::vector<SourceContext> contexts_;
};

double measurement_norm_sq(const MeasurementSet& ms, const ReconstructionConfig& cfg, int dim) {
    if (cfg.model != ForwardModel::rytov) return ms.stacked_norm_sq();
    // The Rytov fit lives in the phase domain; normalize against it there.
    double s = 0.0;
    for (int i = 0; i < ms.num_sources(); ++i) {
        ComplexField u_in_s = incident_field(ms.entries[static_cast<std::size_t>(i)].source,
                                             ms.sensors, dim);
        RytovData d = rytov_transform(ms.entries[static_cast<std::size_t>(i)].m, u_in_s,
                                      ms.sensors);
        for (std::size_t j = 0; j < d.phi.values.size(); ++j)
            if (d.mask[j]) s += std::norm(d.phi.values[j]);
    }
    return s;
}

}  // namespace

ReconstructionResult reconstruct(const InteriorOperator& green, const SensorOperator& sensor_op,
                                 const ReconstructionConfig& config,
                                 const MeasurementSet& measurements,
                                 const ScatteringPotential* ground_truth) {
    measurements.validate(green.grid());
    if (config.outer_iters < 1) throw InvalidInputError("reconstruct: outer_iters must be >= 1");
    if (config.tau < 0.0) throw InvalidInputError("reconstruct: tau must be >= 0");

    const DataTerm term(green, sensor_op, measurements, config);
    const double m_norm_sq = measurement_norm_sq(measurements, config, green.grid().dim);

    ScatteringPotential f = config.initial ? *config.initial
                                           : ScatteringPotential::zeros(green.grid());
    require_same_grid(f.grid, green.grid(), "reconstruct");
    ScatteringPotential f_prev = f;

    double step = config.initial_step;
    if (step <= 0.0) {
        double lip = term.born_lipschitz();
        step = lip > 0.0 ? 1.0 / lip : 1.0;
    }

    auto objective_at = [&](const ScatteringPotential& x, double data_value) {
        return config.tau > 0.0
                   ? data_value + config.tau * tv_value(RealField{x.grid, x.values})
                   : data_value;
    };

    ReconstructionHistory history;
    const auto t0 = std::chrono::steady_clock::now();

    auto prox_step = [&](const ScatteringPotential& base, const Evaluation& grad_eval,
                         double trial_step) {
        RealField shifted{base.grid, base.values};
        for (std::size_t i = 0; i < shifted.values.size(); ++i)
            shifted.values[i] -= trial_step * grad_eval.gradient.values[i];
        if (config.tau > 0.0) {
            ProxResult pr = tv_prox(shifted, config.tau * trial_step, config.constraint,
                                    config.prox_iters, config.prox_tol);
            return ScatteringPotential{pr.image.grid, std::move(pr.image.values)};
        }
        RealField clamped = project(shifted, config.constraint);
        return ScatteringPotential{clamped.grid, std::move(clamped.values)};
    };

    auto quadratic_bound = [&](const ScatteringPotential& base, const Evaluation& grad_eval,
                               const ScatteringPotential& trial, double trial_step) {
        double lin = 0.0, dist_sq = 0.0;
        for (std::size_t i = 0; i < trial.values.size(); ++i) {
            double d = trial.values[i] - base.values[i];
            lin += grad_eval.gradient.values[i] * d;
            dist_sq += d * d;
        }
        return grad_eval.value + lin + dist_sq / (2.0 * trial_step);
    };

    // Monotone FISTA: momentum runs on the prox candidates z_k while the
    // reported iterate f_k is the better of (z_k, f_{k-1}) in objective.
    ScatteringPotential z = f;
    double t_prev = 1.0;
    Evaluation at_f0 = term.evaluate(f, false);
    double obj_f = objective_at(f, at_f0.value);
    double fit_f = at_f0.value;
    double resid_f = at_f0.stacked_resid;

    for (int it = 1; it <= config.outer_iters; ++it) {
        const double t_k = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_prev * t_prev));
        ScatteringPotential y = f;
        for (std::size_t i = 0; i < y.values.size(); ++i)
            y.values[i] += (t_prev / t_k) * (z.values[i] - f.values[i]) +
                           ((t_prev - 1.0) / t_k) * (f.values[i] - f_prev.values[i]);

        Evaluation at_y = term.evaluate(y, true);

        bool rule_failed = false;
        ScatteringPotential z_next;
        Evaluation at_z;
        if (config.step_rule == StepRule::fixed) {
            z_next = prox_step(y, at_y, step);
            at_z = term.evaluate(z_next, false);
        } else {
            int halvings = 0;
            for (;;) {
                z_next = prox_step(y, at_y, step);
                at_z = term.evaluate(z_next, false);
                if (at_z.value <= quadratic_bound(y, at_y, z_next, step) * (1.0 + 1e-12)) break;
                if (++halvings > config.backtrack_max) {
                    rule_failed = true;
                    break;
                }
                step *= 0.5;
            }
        }
        const double obj_z = objective_at(z_next, at_z.value);

        f_prev = f;
        if (!config.monotone || obj_z <= obj_f) {
            f = z_next;
            obj_f = obj_z;
            fit_f = at_z.value;
            resid_f = at_z.stacked_resid;
        }
        // else keep f (and its cached objective) for this iteration.
        z = std::move(z_next);
        t_prev = t_k;

        IterationRow row;
        row.iter = it;
        row.data_fit = fit_f;
        row.norm_data_fit = m_norm_sq > 0.0 ? resid_f / m_norm_sq : 0.0;
        if (ground_truth) row.norm_error = normalized_error(f, *ground_truth);
        row.step = step;
        row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.step_rule_failed = rule_failed;
        history.rows.push_back(row);
        if (config.record_iterates) history.iterates.push_back(f);
    }

    return ReconstructionResult{std::move(f), std::move(history)};
}

}  // namespace seagle
