#include "seagle/regularization.hpp"

#include <algorithm>
#include <cmath>

namespace seagle {

ConstraintSet ConstraintSet::box(double lo, double hi) {
    if (!(lo <= hi)) throw InvalidInputError("ConstraintSet::box: requires lo <= hi");
    ConstraintSet c;
    c.kind = Kind::box;
    c.lo = lo;
    c.hi = hi;
    return c;
}

double ConstraintSet::clamp(double v) const {
    switch (kind) {
        case Kind::none: return v;
        case Kind::non_negative: return v < 0.0 ? 0.0 : v;
        case Kind::non_positive: return v > 0.0 ? 0.0 : v;
        case Kind::box: return std::min(std::max(v, lo), hi);
    }
    return v;
}

RealField project(const RealField& f, const ConstraintSet& constraint) {
    RealField out = f;
    for (double& v : out.values) v = constraint.clamp(v);
    return out;
}

GradientOperatorStack::GradientOperatorStack(const Grid& grid) : grid_(grid) {}

namespace {

// Strides of the row-major layout per axis.
std::array<std::size_t, 3> strides_of(const Grid& g) {
    std::array<std::size_t, 3> s{1, 1, 1};
    for (int d = g.dim - 2; d >= 0; --d)
        s[d] = s[d + 1] * static_cast<std::size_t>(g.counts[d + 1]);
    return s;
}

}  // namespace

void GradientOperatorStack::apply(const std::vector<double>& f,
                                  std::vector<std::vector<double>>& dst) const {
    const std::size_t n = grid_.num_samples();
    if (f.size() != n) throw InvalidInputError("GradientOperatorStack::apply: size mismatch");
    dst.assign(static_cast<std::size_t>(grid_.dim), std::vector<double>(n, 0.0));
    const auto stride = strides_of(grid_);
    for (int d = 0; d < grid_.dim; ++d) {
        const std::size_t sd = stride[static_cast<std::size_t>(d)];
        const int nd = grid_.counts[d];
        std::vector<double>& out = dst[static_cast<std::size_t>(d)];
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t pos_d = (i / sd) % static_cast<std::size_t>(nd);
            out[i] = (pos_d + 1 < static_cast<std::size_t>(nd)) ? f[i + sd] - f[i] : 0.0;
        }
    }
}

void GradientOperatorStack::apply_adjoint_accumulate(const std::vector<std::vector<double>>& p,
                                                     std::vector<double>& dst) const {
    const std::size_t n = grid_.num_samples();
    if (dst.size() != n)
        throw InvalidInputError("GradientOperatorStack::apply_adjoint_accumulate: size mismatch");
    const auto stride = strides_of(grid_);
    for (int d = 0; d < grid_.dim; ++d) {
        const std::size_t sd = stride[static_cast<std::size_t>(d)];
        const int nd = grid_.counts[d];
        const std::vector<double>& pd = p[static_cast<std::size_t>(d)];
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t pos_d = (i / sd) % static_cast<std::size_t>(nd);
            // (D_d^T p)_i = p_{i - s} - p_i, with one-sided ends.
            double acc = 0.0;
            if (pos_d + 1 < static_cast<std::size_t>(nd)) acc -= pd[i];
            if (pos_d > 0) acc += pd[i - sd];
            dst[i] += acc;
        }
    }
}

double tv_value(const RealField& f) {
    require_finite(f.values, "tv_value");
    GradientOperatorStack D(f.grid);
    std::vector<std::vector<double>> g;
    D.apply(f.values, g);
    const std::size_t n = f.values.size();
    double tv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int d = 0; d < f.grid.dim; ++d) {
            double v = g[static_cast<std::size_t>(d)][i];
            s += v * v;
        }
        tv += std::sqrt(s);
    }
    return tv;
}

ProxResult tv_prox(const RealField& g, double alpha, const ConstraintSet& constraint,
                   int inner_iters, double inner_tol) {
    if (!(alpha > 0.0)) throw InvalidInputError("tv_prox: alpha must be positive");
    require_finite(g.values, "tv_prox");

    const std::size_t n = g.values.size();
    const int dim = g.grid.dim;
    GradientOperatorStack D(g.grid);

    // Fast gradient projection on the dual: maximize over per-pixel dual
    // vectors ||p_n||_2 <= 1 with primal recovery f(p) = P_F(g - alpha D^T p).
    // The dual step 1/(4 dim alpha) covers ||D||^2 <= 4 dim.
    const double step = 1.0 / (4.0 * dim * alpha);

    std::vector<std::vector<double>> p(static_cast<std::size_t>(dim),
                                       std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> s = p;  // extrapolated dual point
    std::vector<std::vector<double>> p_prev = p;

    std::vector<double> f(n);
    std::vector<std::vector<double>> Df;
    double t_prev = 1.0;
    double first_move = -1.0;
    double last_rel = 0.0;
    bool converged = false;
    int iters_done = 0;

    auto recover_primal = [&](const std::vector<std::vector<double>>& dual) {
        for (std::size_t i = 0; i < n; ++i) f[i] = g.values[i];
        std::vector<double> div(n, 0.0);
        D.apply_adjoint_accumulate(dual, div);
        for (std::size_t i = 0; i < n; ++i) f[i] = constraint.clamp(f[i] - alpha * div[i]);
    };

    for (int it = 0; it < inner_iters; ++it) {
        recover_primal(s);
        D.apply(f, Df);

        double move_sq = 0.0;
        for (int d = 0; d < dim; ++d) {
            for (std::size_t i = 0; i < n; ++i) {
                double cand = s[static_cast<std::size_t>(d)][i] +
                              step * Df[static_cast<std::size_t>(d)][i];
                Df[static_cast<std::size_t>(d)][i] = cand;  // reuse as candidate store
            }
        }
        // Project per-pixel dual vectors onto the unit ball.
        for (std::size_t i = 0; i < n; ++i) {
            double mag_sq = 0.0;
            for (int d = 0; d < dim; ++d) {
                double v = Df[static_cast<std::size_t>(d)][i];
                mag_sq += v * v;
            }
            double scale = mag_sq > 1.0 ? 1.0 / std::sqrt(mag_sq) : 1.0;
            for (int d = 0; d < dim; ++d) {
                double next = Df[static_cast<std::size_t>(d)][i] * scale;
                double delta = next - p[static_cast<std::size_t>(d)][i];
                move_sq += delta * delta;
                p_prev[static_cast<std::size_t>(d)][i] = p[static_cast<std::size_t>(d)][i];
                p[static_cast<std::size_t>(d)][i] = next;
            }
        }
        ++iters_done;

        const double move = std::sqrt(move_sq);
        if (first_move < 0.0) first_move = move > 0.0 ? move : 1.0;
        last_rel = move / first_move;
        if (last_rel <= inner_tol || move == 0.0) {
            converged = true;
            break;
        }

        const double t_k = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_prev * t_prev));
        const double beta = (t_prev - 1.0) / t_k;
        for (int d = 0; d < dim; ++d)
            for (std::size_t i = 0; i < n; ++i)
                s[static_cast<std::size_t>(d)][i] =
                    p[static_cast<std::size_t>(d)][i] +
                    beta * (p[static_cast<std::size_t>(d)][i] -
                            p_prev[static_cast<std::size_t>(d)][i]);
        t_prev = t_k;
    }

    recover_primal(p);
    ProxResult out;
    out.image = RealField{g.grid, f};
    out.converged = converged;
    out.iterations = iters_done;
    out.dual_residual = last_rel;
    return out;
}

}  // namespace seagle
