#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "conetube/gluing_variety.hpp"
#include "conetube/holonomy.hpp"

using namespace conetube;

namespace
{

std::pair<Complex, Complex> random_xy(std::mt19937_64& g, double radius = 0.2)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto off = [&](double rmin) {
        return std::polar(rmin + (radius - rmin) * std::sqrt(u(g)), 2.0 * Pi * u(g));
    };
    return {base_x + off(0.01), base_y + off(0.0)};
}

void expect_matrix(const MobiusMatrix& m, Complex a, Complex b, Complex c, Complex d)
{
    EXPECT_LT(std::abs(m.a - a), 1e-14) << m;
    EXPECT_LT(std::abs(m.b - b), 1e-14) << m;
    EXPECT_LT(std::abs(m.c - c), 1e-14) << m;
    EXPECT_LT(std::abs(m.d - d), 1e-14) << m;
}

}  // namespace

TEST(BuildRepresentation, CompleteStructureMatrices)
{
    const auto r = build_representation(-1.0, Complex(0.0, 2.0));
    expect_matrix(r.A, -1.0, 1.0, 0.0, -1.0);
    expect_matrix(r.B, -1.0, 0.0, Complex(0.0, 2.0), -1.0);
    expect_matrix(r.C, -2.0, Complex(-0.5, -0.5), Complex(1.0, -1.0), 0.0);
}

TEST(BuildRepresentation, DerivedScalarsAtBase)
{
    // x = -1, y = 2i: (x^2 y - x^2 + 1)(x^2 y + (x^2-1)^2) = (2i)(2i) = -4
    const auto r = build_representation(-1.0, Complex(0.0, 2.0));
    EXPECT_LT(std::abs(r.w - Complex(-4.0)), 1e-15);
    EXPECT_LT(std::abs(r.z - Complex(-0.5, -0.5)), 1e-15);
    // z^2 = x^2 (1 - x^2 - y)/w = -2i/-4
    EXPECT_LT(std::abs(r.z * r.z - Complex(0.0, 0.5)), 1e-15);
}

TEST(BuildRepresentation, GroupRelationsAtRandomPoints)
{
    std::mt19937_64 g(21);
    for (int i = 0; i < 100; ++i) {
        const auto [x, y] = random_xy(g);
        const auto r = build_representation(x, y);
        const auto res = group_relation_residuals(r);
        EXPECT_LT(res[0], 1e-11);
        EXPECT_LT(res[1], 1e-11);
        // explicit products as an independent evaluation of the first relation
        EXPECT_LT((r.A * r.C).distance(r.C * r.B), 1e-11);
        EXPECT_LT(std::abs(r.z * r.z - holonomy_z_squared(x, y)), 1e-12);
        for (const auto& M : {r.A, r.B, r.C}) EXPECT_LT(std::abs(M.det() - 1.0), 1e-12);
    }
}

TEST(BuildRepresentation, ZStaysOnContinuedBranch)
{
    const auto r = build_representation(Complex(-1.05, 0.02), Complex(0.05, 2.1));
    EXPECT_LT(std::abs(r.z - base_z), 0.2);
}

TEST(BuildRepresentation, Errors)
{
    EXPECT_THROW(build_representation(0.0, Complex(0.0, 2.0)), DomainError);
    // x = -1, y = 0 makes both factors of w vanish
    EXPECT_THROW(build_representation(-1.0, 0.0), DomainError);
}

TEST(PeripheralMatrices, ParabolicAtBase)
{
    const auto P = peripheral_matrices(build_representation(base_x, base_y));
    EXPECT_LT(std::abs(P.M1.trace() + 2.0), 1e-14);
    EXPECT_LT(std::abs(P.M2.trace() + 2.0), 1e-14);
}

TEST(PeripheralMatrices, LongitudeUpperTriangularAndCommuting)
{
    std::mt19937_64 g(22);
    for (int i = 0; i < 100; ++i) {
        const auto [x, y] = random_xy(g);
        const auto r = build_representation(x, y);
        const auto P = peripheral_matrices(r);
        EXPECT_LT(std::abs(P.L2.c), 1e-11);
        EXPECT_LT((P.M2 * P.L2).distance(P.L2 * P.M2), 1e-10);
        EXPECT_LT(std::abs(P.M2.trace() - (x + 1.0 / x)), 1e-12);
        for (const auto& M : {P.M1, P.L1, P.M2, P.L2}) EXPECT_LT(std::abs(M.det() - 1.0), 1e-12);
    }
}

TEST(L2Eigenvalue, CompleteStructure) { EXPECT_LT(std::abs(l2_eigenvalue(-1.0, Complex(0.0, 2.0)) + 1.0), 1e-15); }

TEST(L2Eigenvalue, TrivialAtYZero)
{
    for (Complex x : {Complex(2.0), Complex(0.3, 0.4), Complex(-1.5, 0.1)}) {
        EXPECT_LT(std::abs(l2_eigenvalue(x, 0.0) - 1.0), 1e-15);
    }
}

TEST(L2Eigenvalue, MatchesLongitudeDiagonal)
{
    std::mt19937_64 g(23);
    for (int i = 0; i < 100; ++i) {
        const auto [x, y] = random_xy(g);
        const auto P = peripheral_matrices(build_representation(x, y));
        const Complex l2 = l2_eigenvalue(x, y);
        EXPECT_LT(std::abs(P.L2.a - l2), 1e-10);
        EXPECT_LT(std::abs(P.L2.d - 1.0 / l2), 1e-10);
    }
}

TEST(L2Eigenvalue, DenominatorZero) { EXPECT_THROW(l2_eigenvalue(0.0, 1.0), DomainError); }

TEST(CommutatorTrace, MinusY)
{
    EXPECT_EQ(commutator_trace_minus2(-1.0, Complex(0.0, 2.0)), Complex(0.0, -2.0));
}

TEST(CommutatorTrace, MatchesMatricesAndEigenvalueForm)
{
    std::mt19937_64 g(24);
    for (int i = 0; i < 100; ++i) {
        const auto [x, y] = random_xy(g);
        const auto r = build_representation(x, y);
        const Complex direct = (r.A * r.C * r.A.inverse() * r.C.inverse()).trace() - 2.0;
        const Complex via_beta = (r.A * r.B.inverse()).trace() - 2.0;
        EXPECT_LT(std::abs(commutator_trace_minus2(x, y) - direct), 1e-10);
        EXPECT_LT(std::abs(via_beta - direct), 1e-10);
        EXPECT_LT(std::abs(commutator_trace_from_eigenvalues(x, l2_eigenvalue(x, y)) + y), 1e-10);
        EXPECT_LT(std::abs(y_from_eigenvalues(x, l2_eigenvalue(x, y)) - y), 1e-10);
    }
}

TEST(CuspRelations, RejectsSingularLocus)
{
    EXPECT_THROW(cusp_relation_residuals(-1.0, -1.0, -1.0, -1.0), ValidationError);
    EXPECT_THROW(cusp_relation_residuals(-1.0, -1.0, Complex(0.0, 1.0), 1.0), ValidationError);
    EXPECT_THROW(cusp_relation_residuals(0.0, -1.0, Complex(-1.1), -1.0), ValidationError);
}

TEST(CuspRelations, InvariantUnderInversion)
{
    const Complex m1{-0.9, 0.2}, l1{-1.2, 0.1}, m2{-1.05, 0.03}, l2{-0.97, -0.08};
    const auto a = cusp_relation_residuals(m1, l1, m2, l2);
    const auto b = cusp_relation_residuals(1.0 / m1, 1.0 / l1, m2, l2);
    EXPECT_LT(std::abs(a[0] - b[0]), 1e-12);
    EXPECT_LT(std::abs(a[1] - b[1]), 1e-12);
}

TEST(CuspRelations, HoldAtGenericVarietyPoint)
{
    const auto e = cusp_eigenvalues(solve_shapes(base_shape + Complex(0.03, 0.01), base_shape + Complex(-0.02, 0.05)));
    const auto r = cusp_relation_residuals(e.m1, e.l1, e.m2, e.l2);
    EXPECT_LT(std::abs(r[0]), 1e-9);
    EXPECT_LT(std::abs(r[1]), 1e-9);
}

TEST(CuspRelations, HoldForHolonomyFamily)
{
    // M1 = C and L1 = A B^-1 A^-1 B; the eigenvalue of L1 is chosen from its
    // trace, so only l1 + 1/l1 enters.
    std::mt19937_64 g(25);
    for (int i = 0; i < 50; ++i) {
        const auto [x, y] = random_xy(g);
        const auto r = build_representation(x, y);
        const auto P = peripheral_matrices(r);
        const Complex tM1 = P.M1.trace(), tL1 = P.L1.trace();
        const Complex m1 = (tM1 + std::sqrt(tM1 * tM1 - 4.0)) / 2.0;
        const Complex l1 = (tL1 + std::sqrt(tL1 * tL1 - 4.0)) / 2.0;
        const auto res = cusp_relation_residuals(m1, l1, x, l2_eigenvalue(x, y));
        EXPECT_LT(std::abs(res[0]), 1e-9);
        EXPECT_LT(std::abs(res[1]), 1e-9);
    }
}
