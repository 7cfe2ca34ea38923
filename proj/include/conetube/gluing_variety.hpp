#pragma once

// Whitehead link complement as four ideal tetrahedra: the solution surface of
// the two edge (gluing) relations near the complete structure, a chart on it
// by (z1, z2), and the cusp eigenvalue maps.

#include <algorithm>
#include <array>
#include <cmath>

#include "conetube/complex_jets.hpp"

namespace conetube
{

struct TetShapes {
    Complex z1, z2, z3, z4;
};

/** @brief Shape (1+i)/2 of the regular ideal octahedron halves */
inline constexpr Complex base_shape{0.5, 0.5};

inline TetShapes base_shapes() { return {base_shape, base_shape, base_shape, base_shape}; }

/** @brief Chart coordinates (u, v) = (z1, z2) */
struct ChartPoint {
    Complex u, v;
};

inline ChartPoint base_chart_point() { return {base_shape, base_shape}; }

/** @brief Max-norm distance of a chart point from the complete structure */
inline double chart_distance(const ChartPoint& p)
{
    return std::max(std::abs(p.u - base_shape), std::abs(p.v - base_shape));
}

struct ChartOptions {
    double radius = 0.35;
    int max_continuation_steps = 16;
    double continuation_step = 0.025;
    int max_newton_iterations = 50;
    Tolerances tol = default_tolerances();
};

/** @brief The two gluing relations; both vanish exactly on the variety */
inline std::array<Complex, 2> gluing_residual(const TetShapes& s)
{
    const Complex w1 = 1.0 - s.z1, w2 = 1.0 - s.z2, w3 = 1.0 - s.z3, w4 = 1.0 - s.z4;
    return {w1 * w4 - w2 * w3, w1 * w2 * w3 * w4 - s.z1 * s.z2 * s.z3 * s.z4};
}

inline double gluing_residual_norm(const TetShapes& s)
{
    auto r = gluing_residual(s);
    return std::max(std::abs(r[0]), std::abs(r[1]));
}

namespace detail
{

struct Mat2 {
    Complex a, b, c, d;
};

inline std::array<Complex, 2> solve2(const Mat2& m, const std::array<Complex, 2>& rhs)
{
    Complex det = m.a * m.d - m.b * m.c;
    if (std::abs(det) < 1e-14 * std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c),
                                           std::abs(m.d), 1e-300})) {
        throw DomainError("singular 2x2 Jacobian");
    }
    return {(m.d * rhs[0] - m.b * rhs[1]) / det, (m.a * rhs[1] - m.c * rhs[0]) / det};
}

/** Jacobian of the gluing residuals with respect to the solved shapes (z3, z4) */
inline Mat2 jacobian_z34(const TetShapes& s)
{
    const Complex w1 = 1.0 - s.z1, w2 = 1.0 - s.z2, w3 = 1.0 - s.z3, w4 = 1.0 - s.z4;
    return {w2, -w1, -w1 * w2 * w4 - s.z1 * s.z2 * s.z4, -w1 * w2 * w3 - s.z1 * s.z2 * s.z3};
}

/** Jacobian of the gluing residuals with respect to the chart shapes (z1, z2) */
inline Mat2 jacobian_z12(const TetShapes& s)
{
    const Complex w1 = 1.0 - s.z1, w2 = 1.0 - s.z2, w3 = 1.0 - s.z3, w4 = 1.0 - s.z4;
    return {-w4, w3, -w2 * w3 * w4 - s.z2 * s.z3 * s.z4, -w1 * w3 * w4 - s.z1 * s.z3 * s.z4};
}

}  // namespace detail

/**
 * @brief Newton solve for (z3, z4) at a chart point, from an explicit seed.
 *
 * No continuation: the seed must already be on the right sheet.
 */
inline TetShapes refine_shapes(const ChartPoint& p, Complex z3_seed, Complex z4_seed,
                               const ChartOptions& opt = {})
{
    TetShapes s{p.u, p.v, z3_seed, z4_seed};
    for (int it = 0; it < opt.max_newton_iterations; ++it) {
        auto r = gluing_residual(s);
        auto dz = detail::solve2(detail::jacobian_z34(s), {-r[0], -r[1]});
        s.z3 += dz[0];
        s.z4 += dz[1];
        if (!is_finite(s.z3) || !is_finite(s.z4)) break;
        if (std::max(std::abs(dz[0]), std::abs(dz[1])) < 1e-15) break;
    }
    if (!is_finite(s.z3) || !is_finite(s.z4) || gluing_residual_norm(s) > opt.tol.newton) {
        throw ConvergenceError("solve_shapes: Newton did not converge");
    }
    return s;
}

/**
 * @brief Point of the gluing variety over chart coordinates (u, v).
 *
 * (z3, z4) are continued from the complete structure along the straight
 * segment in the chart, in at most `max_continuation_steps` Newton solves.
 */
inline TetShapes solve_shapes(Complex u, Complex v, const ChartOptions& opt = {})
{
    const ChartPoint target{u, v};
    const double dist = chart_distance(target);
    if (!(dist <= opt.radius)) {
        throw ChartError("solve_shapes: chart point outside the chart radius");
    }
    int steps = static_cast<int>(std::ceil(dist / opt.continuation_step));
    steps = std::clamp(steps, 1, opt.max_continuation_steps);
    Complex z3 = base_shape, z4 = base_shape;
    TetShapes s = base_shapes();
    for (int k = 1; k <= steps; ++k) {
        const double t = double(k) / steps;
        const ChartPoint p{base_shape + t * (u - base_shape), base_shape + t * (v - base_shape)};
        s = refine_shapes(p, z3, z4, opt);
        z3 = s.z3;
        z4 = s.z4;
    }
    return s;
}

/** @brief d(z3, z4)/d(u, v) on the variety, by implicit differentiation */
struct ShapeDerivatives {
    Complex dz3_du, dz4_du, dz3_dv, dz4_dv;
};

inline ShapeDerivatives shape_derivatives(const TetShapes& s)
{
    const auto j34 = detail::jacobian_z34(s);
    const auto j12 = detail::jacobian_z12(s);
    auto du = detail::solve2(j34, {-j12.a, -j12.c});
    auto dv = detail::solve2(j34, {-j12.b, -j12.d});
    return {du[0], du[1], dv[0], dv[1]};
}

struct CuspEigenvalues {
    Complex m1, l1, m2, l2;
};

inline CuspEigenvalues base_eigenvalues() { return {-1.0, -1.0, -1.0, -1.0}; }

/**
 * @brief The six square roots appearing in the eigenvalue maps.
 *
 * All equal 1 at the complete structure; evaluation elsewhere continues them.
 */
struct SqrtBranches {
    Complex m1 = 1.0;      // sqrt((1-z4)/(1-z2))
    Complex m1_alt = 1.0;  // sqrt((1-z3)/(1-z1))
    Complex l1 = 1.0;      // sqrt(z3 z4/(z1 z2))
    Complex m2 = 1.0;      // sqrt((1-z2)/(1-z1))
    Complex m2_alt = 1.0;  // sqrt((1-z4)/(1-z3))
    Complex l2 = 1.0;      // sqrt(z2 z4/(z1 z3))
};

/**
 * @brief Square roots plus continued logarithms log(-m1), log(-l1),
 * log(-m2), log(-l2), all carried along an evaluation path.
 *
 * The logs are 0 at the complete structure.
 */
struct BranchState {
    SqrtBranches roots;
    CuspEigenvalues log_neg{0.0, 0.0, 0.0, 0.0};
};

/** @brief Both written forms of each eigenvalue, plus the branch data used */
struct EigenvalueForms {
    CuspEigenvalues primary;
    CuspEigenvalues alternate;
    BranchState branches;

    double disagreement() const
    {
        return std::max({std::abs(primary.m1 - alternate.m1), std::abs(primary.l1 - alternate.l1),
                         std::abs(primary.m2 - alternate.m2), std::abs(primary.l2 - alternate.l2)});
    }
};

/** @brief Evaluate eigenvalues with branches continued from `prev` (one step) */
inline EigenvalueForms eigenvalue_forms_near(const TetShapes& s, const BranchState& prev)
{
    const SqrtBranches& previous = prev.roots;
    const Complex w1 = 1.0 - s.z1, w2 = 1.0 - s.z2, w3 = 1.0 - s.z3, w4 = 1.0 - s.z4;
    SqrtBranches r;
    r.m1 = continue_sqrt(w4 / w2, previous.m1);
    r.m1_alt = continue_sqrt(w3 / w1, previous.m1_alt);
    r.l1 = continue_sqrt(s.z3 * s.z4 / (s.z1 * s.z2), previous.l1);
    r.m2 = continue_sqrt(w2 / w1, previous.m2);
    r.m2_alt = continue_sqrt(w4 / w3, previous.m2_alt);
    r.l2 = continue_sqrt(s.z2 * s.z4 / (s.z1 * s.z3), previous.l2);

    EigenvalueForms f;
    f.branches.roots = r;
    f.primary = {-r.m1, -(w4 / w2) * r.l1, -r.m2, -(w2 / w1) * r.l2};
    f.alternate = {-r.m1_alt, -(w3 / w1) * r.l1, -r.m2_alt, -(w4 / w3) * r.l2};
    const CuspEigenvalues& pl = prev.log_neg;
    f.branches.log_neg = {continue_log(-f.primary.m1, pl.m1), continue_log(-f.primary.l1, pl.l1),
                          continue_log(-f.primary.m2, pl.m2), continue_log(-f.primary.l2, pl.l2)};
    return f;
}

/**
 * @brief Eigenvalue forms with square roots continued from the complete
 * structure along the straight segment in shape space.
 */
inline EigenvalueForms eigenvalue_forms(const TetShapes& s, int steps = 16)
{
    const TetShapes b = base_shapes();
    BranchState branches;
    EigenvalueForms f;
    for (int k = 1; k <= steps; ++k) {
        const double t = double(k) / steps;
        TetShapes p{b.z1 + t * (s.z1 - b.z1), b.z2 + t * (s.z2 - b.z2), b.z3 + t * (s.z3 - b.z3),
                    b.z4 + t * (s.z4 - b.z4)};
        f = eigenvalue_forms_near(p, branches);
        branches = f.branches;
    }
    return f;
}

/** @brief Cusp eigenvalues (m1, l1, m2, l2), branches continued from (-1,-1,-1,-1) */
inline CuspEigenvalues cusp_eigenvalues(const TetShapes& s) { return eigenvalue_forms(s).primary; }

/** @brief A solved chart point with its shapes and continued eigenvalue data */
struct VarietyPoint {
    ChartPoint chart;
    TetShapes shapes;
    EigenvalueForms forms;

    const CuspEigenvalues& eigenvalues() const { return forms.primary; }
    const CuspEigenvalues& log_neg() const { return forms.branches.log_neg; }
};

inline VarietyPoint evaluate_chart(const ChartPoint& p, const ChartOptions& opt = {})
{
    VarietyPoint vp;
    vp.chart = p;
    vp.shapes = solve_shapes(p.u, p.v, opt);
    vp.forms = eigenvalue_forms(vp.shapes);
    return vp;
}

/** @brief Derivatives of (m1, l1, m2, l2) with respect to the chart (u, v) */
struct EigenvalueJacobian {
    CuspEigenvalues d_du;
    CuspEigenvalues d_dv;
};

namespace detail
{

using Jet1 = Jet<Complex, 1>;

inline CuspEigenvalues directional_eigen(const TetShapes& s, const SqrtBranches& roots,
                                         const std::array<Complex, 4>& dz)
{
    auto jet = [](Complex value, Complex slope) { return Jet1({value, slope}, JetVar::any); };
    const Jet1 z1 = jet(s.z1, dz[0]), z2 = jet(s.z2, dz[1]), z3 = jet(s.z3, dz[2]),
               z4 = jet(s.z4, dz[3]);
    const Jet1 w1 = 1.0 - z1, w2 = 1.0 - z2, w4 = 1.0 - z4;
    const Jet1 m1 = -jet_sqrt(w4 / w2, roots.m1);
    const Jet1 l1 = -(w4 / w2) * jet_sqrt(z3 * z4 / (z1 * z2), roots.l1);
    const Jet1 m2 = -jet_sqrt(w2 / w1, roots.m2);
    const Jet1 l2 = -(w2 / w1) * jet_sqrt(z2 * z4 / (z1 * z3), roots.l2);
    return {m1[1], l1[1], m2[1], l2[1]};
}

}  // namespace detail

/** @brief Analytic chart Jacobian of the eigenvalue map at a variety point */
inline EigenvalueJacobian eigenvalue_jacobian(const TetShapes& s, const SqrtBranches& roots)
{
    const auto d = shape_derivatives(s);
    return {detail::directional_eigen(s, roots, {1.0, 0.0, d.dz3_du, d.dz4_du}),
            detail::directional_eigen(s, roots, {0.0, 1.0, d.dz3_dv, d.dz4_dv})};
}

}  // namespace conetube
