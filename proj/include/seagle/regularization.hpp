#pragma once

#include "seagle/grid.hpp"

namespace seagle {

/// Physical constraint set F for the reconstruction, applied as a Euclidean
/// projection (elementwise clamp).
struct ConstraintSet {
    enum class Kind { none, non_negative, non_positive, box };

    Kind kind = Kind::none;
    double lo = 0.0, hi = 0.0;  // box bounds

    static ConstraintSet none() { return {}; }
    static ConstraintSet non_negative() { return {Kind::non_negative}; }
    static ConstraintSet non_positive() { return {Kind::non_positive}; }
    static ConstraintSet box(double lo, double hi);

    double clamp(double v) const;
};

RealField project(const RealField& f, const ConstraintSet& constraint);

/// Discrete forward differences along each axis with replicate (Neumann)
/// boundaries: the difference across the far edge is zero, so constants are
/// in the null space. adjoint() is the exact negative divergence.
class GradientOperatorStack {
public:
    explicit GradientOperatorStack(const Grid& grid);

    /// dst[axis] gets D_d f; each component has f.size() entries.
    void apply(const std::vector<double>& f, std::vector<std::vector<double>>& dst) const;

    /// f += sum_d D_d^T p_d.
    void apply_adjoint_accumulate(const std::vector<std::vector<double>>& p,
                                  std::vector<double>& dst) const;

    int num_axes() const { return grid_.dim; }
    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
};

/// Isotropic total variation: sum_n sqrt(sum_d ([D_d f]_n)^2).
double tv_value(const RealField& f);

struct ProxResult {
    RealField image;
    bool converged = true;
    int iterations = 0;
    double dual_residual = 0.0;  // relative dual-gradient norm at exit
};

/// prox_{alpha TV}(g) over the constraint set, computed by fast gradient
/// projection on the dual with the constraint enforced inside each dual
/// step. Non-convergence within inner_iters returns the best iterate with
/// converged = false rather than throwing.
ProxResult tv_prox(const RealField& g, double alpha, const ConstraintSet& constraint,
                   int inner_iters = 100, double inner_tol = 1e-6);

}  // namespace seagle
