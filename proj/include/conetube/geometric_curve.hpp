#pragma once

// Taylor coefficients of a geometric curve l(m) = l0 + a1 D + (a2/2) D^2 +
// (a3/6) D^3, D = m - m0, from an explicit A-polynomial or from samples of a
// parameterized curve.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "conetube/complex_jets.hpp"

namespace conetube
{

struct GeometricCurve {
    int m0 = -1;
    int l0 = -1;
    Complex a1, a2, a3;
    bool involution_symmetric = false;
    /** "polynomial" or "sampled" */
    std::string method;

    /** @brief l - l0 as a jet in D = m - m0 (order-4 term unknown, set to 0) */
    ComplexJet series(JetVar var = JetVar::m) const
    {
        return ComplexJet({0.0, a1, a2 / 2.0, a3 / 6.0, 0.0}, var);
    }
};

/** @brief a2 + m0 a1 - l0 a1^2; zero for curves invariant under (l,m) -> (1/l,1/m) */
inline Complex involution_defect(const GeometricCurve& c)
{
    return c.a2 + double(c.m0) * c.a1 - double(c.l0) * c.a1 * c.a1;
}

/** @brief Checks base signs and that a1 is not real */
inline void validate_curve(const GeometricCurve& c, double imag_floor = 1e-12)
{
    if ((c.m0 != 1 && c.m0 != -1) || (c.l0 != 1 && c.l0 != -1)) {
        throw ValidationError("geometric curve base point must be (+-1, +-1)");
    }
    if (!is_finite(c.a1) || !is_finite(c.a2) || !is_finite(c.a3)) {
        throw ValidationError("geometric curve coefficients must be finite");
    }
    if (std::abs(c.a1.imag()) <= imag_floor) {
        throw ValidationError("geometric curve: a1 must have nonzero imaginary part");
    }
}

template <class T, int N>
Jet<T, N> jet_pow(const Jet<T, N>& f, int n)
{
    Jet<T, N> r(T{1}, f.var());
    for (int k = 0; k < n; ++k) r = r * f;
    return r;
}

/** @brief Polynomial in (l, m) stored as (degree in l, degree in m) -> coefficient */
class BivariatePolynomial
{
public:
    using Key = std::pair<int, int>;

    BivariatePolynomial() = default;

    BivariatePolynomial& add(int dl, int dm, Complex c)
    {
        if (dl < 0 || dm < 0) throw ValidationError("polynomial degrees must be non-negative");
        if (!is_finite(c)) throw ValidationError("polynomial coefficient must be finite");
        terms_[{dl, dm}] += c;
        return *this;
    }

    const std::map<Key, Complex>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    double scale() const
    {
        double s = 0.0;
        for (const auto& [k, c] : terms_) s = std::max(s, std::abs(c));
        return s;
    }

    Complex operator()(Complex l, Complex m) const
    {
        Complex acc{0.0, 0.0};
        for (const auto& [k, c] : terms_) acc += c * std::pow(l, k.first) * std::pow(m, k.second);
        return acc;
    }

    template <int N>
    Jet<Complex, N> operator()(const Jet<Complex, N>& l, const Jet<Complex, N>& m) const
    {
        Jet<Complex, N> acc(Complex{0.0, 0.0}, Jet<Complex, N>::merge_var(l.var(), m.var()));
        for (const auto& [k, c] : terms_) acc += c * (jet_pow(l, k.first) * jet_pow(m, k.second));
        return acc;
    }

    /** @brief Partial derivative in l (wrt = 0) or m (wrt = 1) */
    BivariatePolynomial derivative(int wrt) const
    {
        BivariatePolynomial d;
        for (const auto& [k, c] : terms_) {
            const int e = wrt == 0 ? k.first : k.second;
            if (e == 0) continue;
            d.add(wrt == 0 ? k.first - 1 : k.first, wrt == 0 ? k.second : k.second - 1, c * double(e));
        }
        return d;
    }

    /** @brief -l + l^2 + 4 l m^2 + m^4 - l m^4 */
    static BivariatePolynomial whitehead()
    {
        BivariatePolynomial p;
        p.add(1, 0, -1.0).add(2, 0, 1.0).add(1, 2, 4.0).add(0, 4, 1.0).add(1, 4, -1.0);
        return p;
    }

    /** @brief l m^8 - l m^6 - (l^2 + 2l + 1) m^4 - l m^2 + l */
    static BivariatePolynomial figure_eight()
    {
        BivariatePolynomial p;
        p.add(1, 8, 1.0).add(1, 6, -1.0).add(2, 4, -1.0).add(1, 4, -2.0).add(0, 4, -1.0);
        p.add(1, 2, -1.0).add(1, 0, 1.0);
        return p;
    }

private:
    std::map<Key, Complex> terms_;
};

/** @brief Largest coefficient, orders 0..3, of A(l(m), m) around the base */
inline double substitution_residual(const BivariatePolynomial& A, const GeometricCurve& c)
{
    const ComplexJet d = ComplexJet::variable(JetVar::m);
    const ComplexJet m = d + Complex(c.m0);
    const ComplexJet l = c.series() + Complex(c.l0);
    const ComplexJet r = A(l, m);
    double res = 0.0;
    for (int k = 0; k <= 3; ++k) res = std::max(res, std::abs(r[k]));
    return res;
}

struct PolynomialExpansionOptions {
    /** Root test at the base, relative to the largest coefficient */
    double root_tol = 1e-10;
    /** Accepted relative distance between the slope and the hint */
    double hint_radius = 0.5;
};

/**
 * @brief Local branch l(m) of A = 0 through (l0, m0) with slope near the hint.
 *
 * Regular points use implicit differentiation; at a point where both first
 * partials vanish the two candidate slopes solve the quadratic tangent cone.
 */
inline GeometricCurve expand_from_polynomial(const BivariatePolynomial& A, int m0, int l0,
                                             Complex a1_hint,
                                             const PolynomialExpansionOptions& opt = {})
{
    if ((m0 != 1 && m0 != -1) || (l0 != 1 && l0 != -1)) {
        throw ValidationError("expand_from_polynomial: base point must be (+-1, +-1)");
    }
    if (A.empty()) throw ValidationError("expand_from_polynomial: empty polynomial");
    const double scale = A.scale();
    const double zero = opt.root_tol * scale;
    const Complex L0(l0), M0(m0);
    if (std::abs(A(L0, M0)) > zero) {
        throw ValidationError("expand_from_polynomial: base point is not a root");
    }
    const auto Al = A.derivative(0), Am = A.derivative(1);
    const Complex al = Al(L0, M0), am = Am(L0, M0);

    Complex a1;
    int lead = 1;  // order in D at which b_n first appears
    if (std::abs(al) > zero) {
        a1 = -am / al;
    }
    else if (std::abs(am) > zero) {
        throw BranchError("expand_from_polynomial: vertical tangent, no branch l(m)");
    }
    else {
        const Complex all = Al.derivative(0)(L0, M0);
        const Complex alm = Al.derivative(1)(L0, M0);
        const Complex amm = Am.derivative(1)(L0, M0);
        if (std::abs(all) <= zero) {
            throw BranchError("expand_from_polynomial: degenerate tangent cone");
        }
        const Complex disc = std::sqrt(alm * alm - all * amm);
        if (std::abs(disc) <= zero) {
            throw BranchError("expand_from_polynomial: tangent cone has a double root");
        }
        const Complex r1 = (-alm + disc) / all, r2 = (-alm - disc) / all;
        a1 = std::abs(r1 - a1_hint) <= std::abs(r2 - a1_hint) ? r1 : r2;
        lead = 2;
    }
    if (std::abs(a1 - a1_hint) > opt.hint_radius * std::max(std::abs(a1_hint), 1e-300)) {
        throw BranchError("expand_from_polynomial: no branch matches the slope hint");
    }

    // b_n (coefficient of D^n) enters the order n + lead - 1 coefficient affinely.
    std::array<Complex, MaxJetOrder + 1> b{};
    b[1] = a1;
    const ComplexJet m = ComplexJet::variable(JetVar::m) + M0;
    auto coefficient = [&](int n, Complex trial) {
        auto bb = b;
        bb[n] = trial;
        const ComplexJet l = ComplexJet(bb, JetVar::m) + L0;
        return A(l, m)[n + lead - 1];
    };
    for (int n = 2; n <= 3; ++n) {
        const Complex c0 = coefficient(n, 0.0), c1 = coefficient(n, 1.0);
        if (std::abs(c1 - c0) <= zero) {
            throw BranchError("expand_from_polynomial: branch slope defect");
        }
        b[n] = -c0 / (c1 - c0);
    }

    GeometricCurve curve;
    curve.m0 = m0;
    curve.l0 = l0;
    curve.a1 = a1;
    curve.a2 = 2.0 * b[2];
    curve.a3 = 6.0 * b[3];
    curve.method = "polynomial";
    curve.involution_symmetric = std::abs(involution_defect(curve)) < 1e-9;
    return curve;
}

/**
 * @brief Local parameterization s -> (m(s), l(s)) of a curve.
 *
 * Must be reentrant: expand_from_samples may call it from several threads.
 */
using CurveSampler = std::function<std::pair<Complex, Complex>(Complex)>;

struct StencilOptions {
    std::array<double, 3> steps{1e-2, 5e-3, 2.5e-3};
    /** Rotation of the four-point stencil in the s-plane */
    double rotation = 0.0;
    /** Successive Richardson estimates must agree to this, relatively */
    double accept = 1e-6;
    /** sampler(0) must match the base point to this */
    double base_tol = 1e-10;
};

namespace detail
{

/** Taylor coefficients 0..3 of f from the stencil s_k = h e^{i phi} i^k */
inline std::array<Complex, 4> stencil_coefficients(const std::array<Complex, 4>& values,
                                                   Complex step)
{
    static constexpr std::array<Complex, 4> turn{Complex{1, 0}, Complex{0, 1}, Complex{-1, 0},
                                                 Complex{0, -1}};
    std::array<Complex, 4> c{};
    for (int n = 0; n < 4; ++n) {
        Complex acc{0.0, 0.0};
        for (int k = 0; k < 4; ++k) acc += values[k] * std::pow(step * turn[k], -n);
        c[n] = acc / 4.0;
    }
    return c;
}

}  // namespace detail

/**
 * @brief a-coefficients of a sampled curve.
 *
 * Taylor coefficients of m(s), l(s) come from four-point circular stencils at
 * three radii with one Richardson step (error h^4 -> h^8); l(m) follows by
 * reversion of m(s) and composition.
 */
inline GeometricCurve expand_from_samples(const CurveSampler& sampler, int m0, int l0,
                                          const StencilOptions& opt = {})
{
    if ((m0 != 1 && m0 != -1) || (l0 != 1 && l0 != -1)) {
        throw ValidationError("expand_from_samples: base point must be (+-1, +-1)");
    }
    const auto [ms0, ls0] = sampler(0.0);
    if (std::abs(ms0 - double(m0)) > opt.base_tol || std::abs(ls0 - double(l0)) > opt.base_tol) {
        throw ValidationError("expand_from_samples: sampler(0) is not the base point");
    }

    static constexpr std::array<Complex, 4> turn{Complex{1, 0}, Complex{0, 1}, Complex{-1, 0},
                                                 Complex{0, -1}};
    const Complex phase = std::polar(1.0, opt.rotation);
    std::array<std::array<Complex, 4>, 3> cm{}, cl{};
    for (int j = 0; j < 3; ++j) {
        const Complex step = opt.steps[j] * phase;
        std::array<Complex, 4> mv{}, lv{};
        for (int k = 0; k < 4; ++k) {
            auto [m, l] = sampler(step * turn[k]);
            mv[k] = m;
            lv[k] = l;
        }
        cm[j] = detail::stencil_coefficients(mv, step);
        cl[j] = detail::stencil_coefficients(lv, step);
    }

    auto richardson = [&](const std::array<std::array<Complex, 4>, 3>& c, int n) {
        const double r1 = std::pow(opt.steps[0] / opt.steps[1], 4);
        const double r2 = std::pow(opt.steps[1] / opt.steps[2], 4);
        const Complex e1 = (r1 * c[1][n] - c[0][n]) / (r1 - 1.0);
        const Complex e2 = (r2 * c[2][n] - c[1][n]) / (r2 - 1.0);
        if (std::abs(e1 - e2) > opt.accept * std::max(1.0, std::abs(e2))) {
            throw ConvergenceError("expand_from_samples: Richardson estimates disagree");
        }
        return e2;
    };

    ComplexJet dm(Complex{0.0, 0.0}, JetVar::s), dl(Complex{0.0, 0.0}, JetVar::s);
    for (int n = 1; n <= 3; ++n) {
        dm[n] = richardson(cm, n);
        dl[n] = richardson(cl, n);
    }
    const ComplexJet s_of_m = jet_reversion(dm, JetVar::m, 1e-14, 1e-6);
    const ComplexJet l_of_m = compose(dl, s_of_m);

    GeometricCurve curve;
    curve.m0 = m0;
    curve.l0 = l0;
    curve.a1 = l_of_m[1];
    curve.a2 = 2.0 * l_of_m[2];
    curve.a3 = 6.0 * l_of_m[3];
    curve.method = "sampled";
    curve.involution_symmetric = std::abs(involution_defect(curve)) < 1e-6;
    return curve;
}

}  // namespace conetube
