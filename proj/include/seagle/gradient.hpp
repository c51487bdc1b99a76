#pragma once

#include "seagle/forward.hpp"

namespace seagle {

/// Complex measurements at the sensors, one record per transmitter.
struct SourceMeasurement {
    SourceSpec source;
    ComplexField m;  // sensor field, length M
};

struct MeasurementSet {
    SensorArray sensors;
    std::vector<SourceMeasurement> entries;

    int num_sources() const { return static_cast<int>(entries.size()); }
    void validate(const Grid& domain) const;

    /// Stacked squared norm over all sources, the reference for relative
    /// regularization weights and normalized data fits.
    double stacked_norm_sq() const;
};

struct FidelityResult {
    double value = 0.0;
    std::vector<ForwardRecord> records;
};

/// D(f) = sum over sources of 1/2 || u_hat(f) - m ||^2, with the forward
/// records returned for reuse by the backward pass.
FidelityResult data_fidelity(const InteriorOperator& green, const SensorOperator& sensor_op,
                             const ScatteringPotential& f, const MeasurementSet& measurements,
                             const ForwardOptions& options, int jobs = 1);

/// Exact gradient of the data fidelity via the backward recurrences:
/// starting from q_K = diag(f)^H G~^H (u_hat - m) and
/// r_K = diag(u_K)^H G~^H (u_hat - m), sweep k = K..1 with
///   S_k = I - gamma_k A^H A
///   T_k = diag(G^H (A y_k - u_in))^H + diag(y_k)^H G^H A
///   p_{k-1} = -mu_k S_k q_k
///   q_{k-1} = p_k + (1 + mu_k) S_k q_k
///   r_{k-1} = r_k + gamma_k T_k q_k
/// and return the ordered sum over sources of Re(r_0). S_k and T_k act
/// matrix-free; with cached adjoint residuals each sweep step costs exactly
/// four interior operator applications (two in S_k, two in T_k).
///
/// The records must have been produced at this same f; a mismatch throws
/// StaleRecordError rather than returning a silently wrong gradient.
RealField data_gradient(const InteriorOperator& green, const SensorOperator& sensor_op,
                        const ScatteringPotential& f, const MeasurementSet& measurements,
                        const std::vector<ForwardRecord>& records, int jobs = 1);

}  // namespace seagle
