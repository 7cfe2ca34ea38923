#pragma once

// Explicit two-parameter family of SL(2,C) representations of the Whitehead
// link group, the peripheral words, and the trace relations between cusps.

#include <algorithm>
#include <array>
#include <cmath>

#include "conetube/complex_jets.hpp"
#include "conetube/mobius.hpp"

namespace conetube
{

/** @brief Parameters of the complete structure: x = -1, y = 2i */
inline constexpr Complex base_x{-1.0, 0.0};
inline constexpr Complex base_y{0.0, 2.0};
inline constexpr Complex base_z{-0.5, -0.5};

/**
 * @brief Representation data: A, B, C are the images of the generators
 * alpha, beta, gamma.
 */
struct WhHolonomy {
    Complex x, y, w, z;
    MobiusMatrix A, B, C;
};

inline Complex holonomy_w(Complex x, Complex y)
{
    const Complex x2 = x * x;
    return (x2 * y - x2 + 1.0) * (x2 * y + (x2 - 1.0) * (x2 - 1.0));
}

/** @brief z^2 as a rational function of (x, y) */
inline Complex holonomy_z_squared(Complex x, Complex y)
{
    const Complex x2 = x * x;
    return x2 * (1.0 - x2 - y) / holonomy_w(x, y);
}

/**
 * @brief Build the representation at (x, y).
 *
 * z is continued from -(1+i)/2 along the straight segment from (-1, 2i).
 */
inline WhHolonomy build_representation(Complex x, Complex y, int steps = 16)
{
    if (!is_finite(x) || !is_finite(y)) throw ValidationError("build_representation: non-finite input");
    if (std::abs(x) < 1e-300) throw DomainError("build_representation: x = 0");
    const Complex w = holonomy_w(x, y);
    if (std::abs(w) < 1e-14) throw DomainError("build_representation: w = 0");

    Complex z = base_z;
    for (int k = 1; k <= steps; ++k) {
        const double t = double(k) / steps;
        const Complex xt = base_x + t * (x - base_x), yt = base_y + t * (y - base_y);
        if (std::abs(xt) < 1e-300 || std::abs(holonomy_w(xt, yt)) < 1e-14) {
            throw BranchError("build_representation: continuation path meets w = 0");
        }
        z = continue_sqrt(holonomy_z_squared(xt, yt), z);
    }

    const Complex x2 = x * x;
    const Complex c11 =
        -x * (x2 * y * y + x2 * (x2 - 3.0) * y - (x2 - 1.0) * (x2 - 1.0)) / (z * w);
    WhHolonomy rep;
    rep.x = x;
    rep.y = y;
    rep.w = w;
    rep.z = z;
    rep.A = {x, 1.0, 0.0, 1.0 / x};
    rep.B = {x, 0.0, y, 1.0 / x};
    rep.C = {c11, z, z * y, z * (1.0 - x2) / x};
    return rep;
}

/** @brief Entrywise residuals of AC = CB and CABA^-1 = AB^-1ABA^-1C */
inline std::array<double, 2> group_relation_residuals(const WhHolonomy& r)
{
    const auto& A = r.A;
    const auto& B = r.B;
    const auto& C = r.C;
    const double rel1 = (A * C).distance(C * B);
    const double rel2 =
        (C * A * B * A.inverse()).distance(A * B.inverse() * A * B * A.inverse() * C);
    return {rel1, rel2};
}

struct PeripheralMatrices {
    MobiusMatrix M1, L1, M2, L2;
};

inline PeripheralMatrices peripheral_matrices(const WhHolonomy& r)
{
    const auto& A = r.A;
    const auto& B = r.B;
    const auto& C = r.C;
    return {C, A * B.inverse() * A.inverse() * B, A,
            C * A.inverse() * C.inverse() * A * B.inverse() * A};
}

/** @brief Eigenvalue of the second longitude, the (1,1) entry of L2 */
inline Complex l2_eigenvalue(Complex x, Complex y)
{
    const Complex x2 = x * x;
    const Complex den = -1.0 + x2 + y;
    if (std::abs(den) < 1e-300) throw DomainError("l2_eigenvalue: -1 + x^2 + y = 0");
    return (-1.0 + x2 - x2 * y) / den;
}

/** @brief tr(A C A^-1 C^-1) - 2, which equals -y */
inline Complex commutator_trace_minus2(Complex /*x*/, Complex y) { return -y; }

/** @brief The same commutator quantity written in the second-cusp eigenvalues */
inline Complex commutator_trace_from_eigenvalues(Complex m2, Complex l2)
{
    const Complex den = l2 + m2 * m2;
    if (std::abs(den) < 1e-300) throw DomainError("commutator trace: l2 + m2^2 = 0");
    return -(m2 * m2 - 1.0) * (1.0 - l2) / den;
}

/** @brief Inverse of (x, y) -> (m2, l2) = (x, l2_eigenvalue(x, y)) for y */
inline Complex y_from_eigenvalues(Complex m2, Complex l2)
{
    return -commutator_trace_from_eigenvalues(m2, l2);
}

/**
 * @brief Residuals of the two relations expressing (m1+1/m1)^2 and l1+1/l1
 * through (m2, l2).
 *
 * Rejects the singular locus (m2^2 = 1, l2 + m2^2 = 0, zero eigenvalues),
 * which contains the complete structure itself.
 */
inline std::array<Complex, 2> cusp_relation_residuals(Complex m1, Complex l1, Complex m2, Complex l2,
                                                      const Tolerances& tol = default_tolerances())
{
    const Complex m2s = m2 * m2;
    const double eps = tol.identity;
    if (std::abs(m2s - 1.0) <= eps) throw ValidationError("cusp relations: m2^2 = 1");
    if (std::abs(l2 + m2s) <= eps) throw ValidationError("cusp relations: l2 + m2^2 = 0");
    if (std::abs(l2) <= eps || std::abs(m1) <= eps || std::abs(l1) <= eps || std::abs(m2) <= eps) {
        throw ValidationError("cusp relations: zero eigenvalue");
    }
    const Complex m4 = m2s * m2s, m6 = m4 * m2s, m8 = m4 * m4;
    const Complex lm = l2 + m2s;
    const Complex tm = m1 + 1.0 / m1;
    const Complex rhs1 = (1.0 + l2) * (1.0 + l2) * (m4 - l2) / (l2 * lm * (m2s - 1.0));
    const Complex rhs2 = (l2 * l2 * (1.0 + m4) + l2 * (-1.0 + 2.0 * m2s + 2.0 * m4 + 2.0 * m6 - m8) +
                          m4 + m8) /
                         (m2s * lm * lm);
    return {tm * tm - rhs1, (l1 + 1.0 / l1) - rhs2};
}

}  // namespace conetube
