#pragma once

#include <optional>
#include <string>

#include "seagle/green.hpp"

namespace seagle {

/// A = I - G diag(f), the discretized Lippmann-Schwinger system operator.
/// Adjoint consistency with apply_adjoint holds to machine precision; f is
/// conjugated there even though the library keeps it real, so the algebra
/// stays valid if f ever becomes complex.
class SystemOperator {
public:
    SystemOperator(const InteriorOperator& green, const ScatteringPotential& f);

    ComplexField apply(const ComplexField& u) const;
    ComplexField apply_adjoint(const ComplexField& u) const;

    const InteriorOperator& green() const { return green_; }
    const ScatteringPotential& potential() const { return f_; }

private:
    const InteriorOperator& green_;
    const ScatteringPotential& f_;
};

/// Incident field synthesis. Point sources radiate the free-space Green
/// function; plane waves are exp(i k_b <d, x>). Sensor arrays carry no
/// ambient dimension of their own, so it is passed explicitly.
ComplexField incident_field(const SourceSpec& source, const Grid& targets);
ComplexField incident_field(const SourceSpec& source, const SensorArray& targets, int dim);

enum class ForwardStop {
    objective,  // ||A u_k - u_in||^2 <= objective_tol_rel * ||u_in||^2
    gradient,   // ||v||_2 < gradient_tol (the printed stopping rule)
};

struct ForwardOptions {
    int max_iters = 120;
    ForwardStop stop = ForwardStop::objective;
    double objective_tol_rel = 5e-7;
    /// Absolute tolerance on the gradient norm; <= 0 means 5e-7 * ||u_in||.
    double gradient_tol = -1.0;
    /// Keep the y_k iterates (required by the gradient backward pass).
    bool record_history = true;
    /// Also keep G^H (A y_k - u_in), computed for free inside each forward
    /// step; the backward pass then costs exactly 4 interior applications
    /// per iteration.
    bool cache_adjoint_residuals = true;
    /// When nonempty, iterate history spills to this directory instead of
    /// staying in memory.
    std::string spill_dir;
    /// Warm-start override for u_init (default: the incident field). The
    /// record keeps a copy so replays stay exact.
    std::optional<ComplexField> warm_start;
};

/// Ordered sequence of grid fields, in memory or spilled to disk.
class FieldSequence {
public:
    FieldSequence() = default;
    explicit FieldSequence(std::string spill_dir, std::string prefix);

    void push(const ComplexField& f);
    ComplexField get(int k) const;
    int size() const { return count_; }
    bool on_disk() const { return !dir_.empty(); }

private:
    std::vector<ComplexField> mem_;
    std::string dir_;
    std::string prefix_;
    int count_ = 0;
};

/// Everything the gradient backward pass consumes: the iterate history of a
/// forward solve, the converged interior field, and the sensor prediction.
/// k_eff counts completed iterations (those with a recorded gamma); a
/// gradient-rule stop discards the partial iteration it fired in, so all
/// histories stay aligned.
struct ForwardRecord {
    int k_eff = 0;
    std::vector<double> gamma;
    std::vector<double> mu;
    FieldSequence y;  // y_1 .. y_K
    FieldSequence w;  // G^H (A y_k - u_in), when cached
    ComplexField u_final;
    ComplexField u_hat;
    ScatteringPotential f_snapshot;
    std::optional<ComplexField> warm_start;
    double residual_norm = 0.0;  // ||A u_K - u_in||_2, recomputed directly
    bool history_recorded = true;
    bool adjoint_residuals_cached = true;
};

/// Forward solve: Nesterov accelerated gradient descent on
/// 1/2 ||A u - u_in||^2 with exact line search, starting from u_in.
/// Records the full iterate history for the backward pass and finishes with
/// u_hat = u_in(sensors) + G~ diag(f) u_K.
ForwardRecord solve_forward(const InteriorOperator& green, const SensorOperator& sensor_op,
                            const ScatteringPotential& f, const ComplexField& u_in,
                            const ComplexField& u_in_sensors, const ForwardOptions& options);

/// Reruns the recurrences of a recorded solve with gamma_k, mu_k and K held
/// fixed (no line search, no early stop) against a possibly different
/// potential. This frozen-coefficient map is exactly what the backward pass
/// differentiates; with f = f_snapshot it reproduces u_hat bit for bit.
ComplexField replay_forward(const InteriorOperator& green, const SensorOperator& sensor_op,
                            const ForwardRecord& record, const ScatteringPotential& f,
                            const ComplexField& u_in, const ComplexField& u_in_sensors);

}  // namespace seagle
