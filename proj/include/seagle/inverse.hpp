#pragma once

#include <optional>

#include "seagle/gradient.hpp"
#include "seagle/regularization.hpp"

namespace seagle {

enum class ForwardModel { seagle, born, rytov };
enum class StepRule { backtracking, fixed };

struct ReconstructionConfig {
    double tau = 0.0;  // absolute regularization weight
    int outer_iters = 40;
    StepRule step_rule = StepRule::backtracking;
    /// Initial step; <= 0 derives 1/L from a power-iteration estimate of the
    /// Born operator norm.
    double initial_step = -1.0;
    int backtrack_max = 20;
    ConstraintSet constraint;
    ForwardOptions forward;
    ForwardModel model = ForwardModel::seagle;
    std::optional<ScatteringPotential> initial;  // default zero
    int prox_iters = 100;
    double prox_tol = 1e-6;
    /// Restart the momentum when the objective would increase.
    bool monotone = true;
    int jobs = 1;
    /// Keep per-iteration images so history rows can be re-audited.
    bool record_iterates = false;
};

struct IterationRow {
    int iter = 0;
    double data_fit = 0.0;       // model-domain D value at the iterate
    double norm_data_fit = 0.0;  // ||u_hat(f) - m||^2 / ||m||^2, stacked
    double norm_error = -1.0;    // vs ground truth when supplied, else -1
    double step = 0.0;
    double wall_s = 0.0;
    bool step_rule_failed = false;
};

struct ReconstructionHistory {
    std::vector<IterationRow> rows;
    std::vector<ScatteringPotential> iterates;  // when record_iterates

    std::string to_csv() const;
};

struct ReconstructionResult {
    ScatteringPotential image;
    ReconstructionHistory history;
};

/// FISTA outer loop on D(f) + tau TV(f) over the constraint set. The data
/// term D and its gradient come from the selected forward model: the full
/// accelerated solve with backpropagated gradients, or the linearized Born /
/// Rytov models for the baselines.
ReconstructionResult reconstruct(const InteriorOperator& green, const SensorOperator& sensor_op,
                                 const ReconstructionConfig& config,
                                 const MeasurementSet& measurements,
                                 const ScatteringPotential* ground_truth = nullptr);

/// First Born prediction: u_hat = u_in(sensors) + G~ diag(u_in) f.
ComplexField forward_born(const SensorOperator& sensor_op, const ComplexField& u_in,
                          const ComplexField& u_in_sensors, const ScatteringPotential& f);

/// First Rytov prediction of the complex phase perturbation:
/// phi_hat = (G~ diag(u_in) f) / u_in(sensors).
ComplexField forward_rytov(const SensorOperator& sensor_op, const ComplexField& u_in,
                           const ComplexField& u_in_sensors, const ScatteringPotential& f);

struct RytovData {
    ComplexField phi;        // log(m / u_in), phase unwrapped per segment
    std::vector<bool> mask;  // false where the ratio was degenerate
};

/// Measured data mapped into the Rytov domain: log magnitude ratio plus the
/// phase of m/u_in unwrapped along each detector segment in sensor order.
RytovData rytov_transform(const ComplexField& m, const ComplexField& u_in_sensors,
                          const SensorArray& sensors);

/// Total field a Rytov phase prediction implies: u_in . exp(phi).
ComplexField rytov_field(const ComplexField& phi, const ComplexField& u_in_sensors);

/// ||a - b||^2 / ||b||^2 for fields and images.
double normalized_error(const ScatteringPotential& estimate, const ScatteringPotential& truth);
double normalized_data_fit(const ComplexField& predicted, const ComplexField& measured);

}  // namespace seagle
