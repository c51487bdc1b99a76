#include <doctest.h>

#include <cmath>

#include "seagle/regularization.hpp"
#include "test_util.hpp"

using namespace seagle;

TEST_CASE("tv of constants is zero, in 2D and 3D") {
    Grid g2 = Grid::centered2d(6, 5, 1.0);
    RealField c2{g2, std::vector<double>(g2.num_samples(), 3.7)};
    CHECK(tv_value(c2) == 0.0);

    Grid g3 = Grid::centered3d(4, 3, 5, 1.0);
    RealField c3{g3, std::vector<double>(g3.num_samples(), -1.2)};
    CHECK(tv_value(c3) == 0.0);
}

TEST_CASE("tv of a unit step") {
    // One forward difference of height 1 per row; replicate boundaries add
    // nothing. Two rows of [0, 1] give exactly 2.
    Grid g = Grid::centered2d(2, 2, 1.0);
    RealField f{g, {0.0, 1.0, 0.0, 1.0}};
    CHECK(tv_value(f) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("tv matches an independent direct computation on random 4x4") {
    Grid g = Grid::centered2d(4, 4, 1.0);
    RealField f{g, test_util::random_reals(16, 77)};

    // Direct nested-loop reference, no operator stack involved.
    double want = 0.0;
    auto at = [&](int r, int c) { return f.values[static_cast<std::size_t>(r * 4 + c)]; };
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            double d0 = (r + 1 < 4) ? at(r + 1, c) - at(r, c) : 0.0;
            double d1 = (c + 1 < 4) ? at(r, c + 1) - at(r, c) : 0.0;
            want += std::sqrt(d0 * d0 + d1 * d1);
        }
    CHECK(tv_value(f) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("tv is translation invariant") {
    Grid g = Grid::centered2d(5, 5, 1.0);
    RealField f{g, test_util::random_reals(25, 3)};
    RealField shifted = f;
    for (double& v : shifted.values) v += 42.0;
    CHECK(tv_value(shifted) == doctest::Approx(tv_value(f)).epsilon(1e-12));
}

TEST_CASE("gradient operator stack: null space and adjoint") {
    Grid g = Grid::centered2d(6, 7, 1.0);
    GradientOperatorStack D(g);
    std::vector<double> constant(g.num_samples(), 2.5);
    std::vector<std::vector<double>> out;
    D.apply(constant, out);
    for (const auto& axis : out)
        for (double v : axis) CHECK(v == 0.0);

    // <D f, p> == <f, D^T p> for random f, p.
    std::vector<double> f = test_util::random_reals(g.num_samples(), 8);
    std::vector<std::vector<double>> p(2);
    p[0] = test_util::random_reals(g.num_samples(), 9);
    p[1] = test_util::random_reals(g.num_samples(), 10);
    D.apply(f, out);
    double lhs = 0.0;
    for (int d = 0; d < 2; ++d)
        for (std::size_t i = 0; i < f.size(); ++i)
            lhs += out[static_cast<std::size_t>(d)][i] * p[static_cast<std::size_t>(d)][i];
    std::vector<double> dtp(g.num_samples(), 0.0);
    D.apply_adjoint_accumulate(p, dtp);
    double rhs = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) rhs += f[i] * dtp[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("projections") {
    Grid g = Grid::centered2d(2, 2, 1.0);
    RealField f{g, {-1.0, 2.0, 0.5, -0.25}};

    RealField nn = project(f, ConstraintSet::non_negative());
    CHECK(nn.values == std::vector<double>{0.0, 2.0, 0.5, 0.0});

    RealField np = project(f, ConstraintSet::non_positive());
    CHECK(np.values == std::vector<double>{-1.0, 0.0, 0.0, -0.25});

    RealField id = project(f, ConstraintSet::none());
    CHECK(id.values == f.values);

    RealField bx = project(f, ConstraintSet::box(-0.5, 0.75));
    CHECK(bx.values == std::vector<double>{-0.5, 0.75, 0.5, -0.25});

    // Idempotence.
    CHECK(project(nn, ConstraintSet::non_negative()).values == nn.values);
    CHECK_THROWS_AS(ConstraintSet::box(1.0, -1.0), InvalidInputError);
}

TEST_CASE("prox: identity at vanishing alpha and on constants") {
    Grid g = Grid::centered2d(4, 4, 1.0);
    RealField f{g, test_util::random_reals(16, 21)};
    ProxResult tiny = tv_prox(f, 1e-15, ConstraintSet::none(), 200, 1e-12);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        CHECK(std::abs(tiny.image.values[i] - f.values[i]) < 1e-10);

    RealField c{g, std::vector<double>(16, 1.23)};
    ProxResult flat = tv_prox(c, 0.8, ConstraintSet::none(), 200, 1e-10);
    for (double v : flat.image.values) CHECK(v == doctest::Approx(1.23).epsilon(1e-12));
}

TEST_CASE("prox decreases the objective and respects constraints") {
    Grid g = Grid::centered2d(32, 32, 1.0);
    RealField f{g, test_util::random_reals(32 * 32, 4)};
    const double alpha = 0.15;

    auto objective = [&](const RealField& x) {
        double quad = 0.0;
        for (std::size_t i = 0; i < x.values.size(); ++i) {
            double d = x.values[i] - f.values[i];
            quad += 0.5 * d * d;
        }
        return quad + alpha * tv_value(x);
    };

    ProxResult pr = tv_prox(f, alpha, ConstraintSet::none(), 3000, 1e-6);
    CHECK(pr.converged);
    CHECK(objective(pr.image) <= objective(f) + 1e-12);

    ProxResult constrained = tv_prox(f, alpha, ConstraintSet::non_negative(), 200, 1e-8);
    for (double v : constrained.image.values) CHECK(v >= 0.0);
}

TEST_CASE("prox is nonexpansive") {
    Grid g = Grid::centered2d(8, 8, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        RealField a{g, test_util::random_reals(64, 30 + static_cast<unsigned>(trial))};
        RealField b{g, test_util::random_reals(64, 60 + static_cast<unsigned>(trial))};
        ProxResult pa = tv_prox(a, 0.3, ConstraintSet::none(), 400, 1e-10);
        ProxResult pb = tv_prox(b, 0.3, ConstraintSet::none(), 400, 1e-10);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            double dp = pa.image.values[i] - pb.image.values[i];
            double dg = a.values[i] - b.values[i];
            num += dp * dp;
            den += dg * dg;
        }
        CHECK(std::sqrt(num) <= std::sqrt(den) * (1.0 + 1e-6));
    }
}

TEST_CASE("prox reports non-convergence without throwing") {
    Grid g = Grid::centered2d(16, 16, 1.0);
    RealField f{g, test_util::random_reals(256, 12)};
    ProxResult pr = tv_prox(f, 0.5, ConstraintSet::none(), 2, 1e-14);
    CHECK(!pr.converged);
    CHECK(pr.iterations == 2);
}

TEST_CASE("prox works on 3D grids") {
    Grid g = Grid::centered3d(6, 5, 4, 1.0);
    RealField f{g, test_util::random_reals(g.num_samples(), 90)};
    const double alpha = 0.25;
    ProxResult pr = tv_prox(f, alpha, ConstraintSet::none(), 2000, 1e-6);
    double quad = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        double d = pr.image.values[i] - f.values[i];
        quad += 0.5 * d * d;
    }
    CHECK(quad + alpha * tv_value(pr.image) <= alpha * tv_value(f) + 1e-12);
    CHECK(tv_value(pr.image) < tv_value(f));
}
