#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "conetube/gluing_variety.hpp"
#include "conetube/holonomy.hpp"

using namespace conetube;

namespace
{

Complex random_offset(std::mt19937_64& g, double radius)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return std::polar(radius * std::sqrt(u(g)), 2.0 * Pi * u(g));
}

/** Singular values of a complex 2x2 matrix, from the eigenvalues of M^* M */
std::pair<double, double> singular_values(Complex a, Complex b, Complex c, Complex d)
{
    const double p = std::norm(a) + std::norm(c);
    const double s = std::norm(b) + std::norm(d);
    const Complex x = std::conj(a) * b + std::conj(c) * d;
    const double tr = p + s, det = p * s - std::norm(x);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return {std::sqrt(tr / 2.0 + disc), std::sqrt(std::max(0.0, tr / 2.0 - disc))};
}

}  // namespace

TEST(GluingResidual, VanishesAtCompleteStructure)
{
    const auto r = gluing_residual(base_shapes());
    EXPECT_LT(std::abs(r[0]), 1e-16);
    EXPECT_LT(std::abs(r[1]), 1e-16);
}

TEST(GluingResidual, NonzeroOffVariety)
{
    auto s = base_shapes();
    s.z1 += 0.1;
    const auto r = gluing_residual(s);
    EXPECT_GT(std::abs(r[0]), 1e-3);
    EXPECT_GT(std::abs(r[1]), 1e-3);
}

TEST(SolveShapes, BaseIsFixed)
{
    const auto s = solve_shapes(base_shape, base_shape);
    for (Complex z : {s.z1, s.z2, s.z3, s.z4}) EXPECT_LT(std::abs(z - base_shape), 1e-15);
}

TEST(SolveShapes, SmallPerturbation)
{
    const auto s = solve_shapes(base_shape + 0.01, base_shape);
    EXPECT_LT(gluing_residual_norm(s), 1e-12);
    for (Complex z : {s.z1, s.z2, s.z3, s.z4}) EXPECT_LT(std::abs(z - base_shape), 0.1);
    EXPECT_EQ(s.z1, base_shape + 0.01);
    EXPECT_EQ(s.z2, base_shape);
}

TEST(SolveShapes, UniqueNearBase)
{
    const Complex u = base_shape + Complex(0.05, -0.03), v = base_shape + Complex(-0.02, 0.04);
    const auto s = solve_shapes(u, v);
    const auto again = refine_shapes({u, v}, s.z3 + Complex(0.01, -0.01), s.z4 - 0.01);
    EXPECT_LT(std::abs(again.z3 - s.z3), 1e-10);
    EXPECT_LT(std::abs(again.z4 - s.z4), 1e-10);
}

TEST(SolveShapes, ResidualOnRandomChartPoints)
{
    std::mt19937_64 g(11);
    for (int i = 0; i < 50; ++i) {
        const auto s = solve_shapes(base_shape + random_offset(g, 0.3), base_shape + random_offset(g, 0.3));
        EXPECT_LT(gluing_residual_norm(s), 1e-12);
    }
}

TEST(SolveShapes, PositivelyOrientedNearBase)
{
    std::mt19937_64 g(12);
    for (int i = 0; i < 50; ++i) {
        const auto s = solve_shapes(base_shape + random_offset(g, 0.1), base_shape + random_offset(g, 0.1));
        for (Complex z : {s.z1, s.z2, s.z3, s.z4}) EXPECT_GT(z.imag(), 0.0);
    }
}

TEST(SolveShapes, RefusesPointsOutsideChart)
{
    EXPECT_THROW(solve_shapes(base_shape + 0.5, base_shape), ChartError);
    ChartOptions tight;
    tight.radius = 0.01;
    EXPECT_THROW(solve_shapes(base_shape + 0.02, base_shape, tight), ChartError);
}

TEST(CuspEigenvalues, MinusOneAtCompleteStructure)
{
    const auto e = cusp_eigenvalues(base_shapes());
    for (Complex v : {e.m1, e.l1, e.m2, e.l2}) EXPECT_LT(std::abs(v + 1.0), 1e-15);
}

TEST(CuspEigenvalues, AlternateFormsAgreeOnVariety)
{
    std::mt19937_64 g(13);
    for (int i = 0; i < 50; ++i) {
        const auto s = solve_shapes(base_shape + random_offset(g, 0.3), base_shape + random_offset(g, 0.3));
        const auto f = eigenvalue_forms(s);
        EXPECT_LT(std::abs(f.primary.m2 - f.alternate.m2), 1e-12);
        EXPECT_LT(f.disagreement(), 1e-12);
    }
}

TEST(CuspEigenvalues, PerturbedPointMovesMeridian)
{
    const auto e = cusp_eigenvalues(solve_shapes(base_shape + 0.02, base_shape + Complex(0.0, 0.01)));
    EXPECT_GT(std::abs(e.m2 + 1.0), 1e-4);
}

TEST(CuspEigenvalues, ContinuedLogsMatchPrincipalNearBase)
{
    const auto vp = evaluate_chart({base_shape + 0.05, base_shape - Complex(0.0, 0.04)});
    const auto& e = vp.eigenvalues();
    const auto& L = vp.log_neg();
    EXPECT_LT(std::abs(L.m1 - std::log(-e.m1)), 1e-14);
    EXPECT_LT(std::abs(L.l2 - std::log(-e.l2)), 1e-14);
}

TEST(EigenvalueJacobian, MatchesFiniteDifferences)
{
    const ChartPoint p{base_shape + Complex(0.04, 0.02), base_shape + Complex(-0.03, 0.05)};
    const auto vp = evaluate_chart(p);
    const auto J = eigenvalue_jacobian(vp.shapes, vp.forms.branches.roots);
    const double h = 1e-6;
    auto eig = [](ChartPoint q) { return cusp_eigenvalues(solve_shapes(q.u, q.v)); };
    const auto up = eig({p.u + h, p.v}), um = eig({p.u - h, p.v});
    const auto vpp = eig({p.u, p.v + h}), vm = eig({p.u, p.v - h});
    EXPECT_LT(std::abs((up.m1 - um.m1) / (2 * h) - J.d_du.m1), 1e-8);
    EXPECT_LT(std::abs((up.l1 - um.l1) / (2 * h) - J.d_du.l1), 1e-8);
    EXPECT_LT(std::abs((vpp.m2 - vm.m2) / (2 * h) - J.d_dv.m2), 1e-8);
    EXPECT_LT(std::abs((vpp.l2 - vm.l2) / (2 * h) - J.d_dv.l2), 1e-8);
}

TEST(EigenvalueJacobian, MeridiansGiveNonsingularChartAtBase)
{
    // finite-difference estimate of d(m1, m2)/d(u, v)
    const double h = 1e-6;
    auto eig = [](Complex u, Complex v) { return cusp_eigenvalues(solve_shapes(u, v)); };
    const auto up = eig(base_shape + h, base_shape), um = eig(base_shape - h, base_shape);
    const auto vp = eig(base_shape, base_shape + h), vm = eig(base_shape, base_shape - h);
    const Complex a = (up.m1 - um.m1) / (2 * h), b = (vp.m1 - vm.m1) / (2 * h);
    const Complex c = (up.m2 - um.m2) / (2 * h), d = (vp.m2 - vm.m2) / (2 * h);
    const auto [smax, smin] = singular_values(a, b, c, d);
    ASSERT_GT(smin, 0.0);
    EXPECT_LT(smax / smin, 1e6);
}

TEST(CrossModule, TraceRelationsHoldForVarietyEigenvalues)
{
    std::mt19937_64 g(14);
    for (int i = 0; i < 50; ++i) {
        const Complex u = base_shape + random_offset(g, 0.3);
        const Complex v = base_shape + 0.02 * std::polar(1.0, 0.7 * i) + random_offset(g, 0.2);
        const auto e = cusp_eigenvalues(solve_shapes(u, v));
        const auto r = cusp_relation_residuals(e.m1, e.l1, e.m2, e.l2);
        EXPECT_LT(std::abs(r[0]), 1e-10);
        EXPECT_LT(std::abs(r[1]), 1e-10);
    }
}
