#pragma once

// Cone-angle Dehn filling on the Whitehead link complement: closed-form
// theta-expansions of (m, l), numerical solution of the filling relations on
// the gluing-variety chart, and sampled curves of filled manifolds.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <future>
#include <memory>
#include <numeric>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "conetube/complex_jets.hpp"
#include "conetube/geometric_curve.hpp"
#include "conetube/gluing_variety.hpp"

namespace conetube
{

/** @brief Coprime (p, q) with dual (r, s), p s - q r = 1 */
struct Slope {
    long p = 1, q = 0, r = 0, s = 1;

    static Slope make(long p, long q)
    {
        if (p == 0 && q == 0) throw ValidationError("slope (0, 0) is not allowed");
        if (std::gcd(p, q) != 1) throw ValidationError("slope not coprime");
        // p x + q y = +-1 by the extended Euclidean algorithm
        long old_r = p, rr = q, old_x = 1, x = 0, old_y = 0, y = 1;
        while (rr != 0) {
            const long k = old_r / rr;
            old_r = std::exchange(rr, old_r - k * rr);
            old_x = std::exchange(x, old_x - k * x);
            old_y = std::exchange(y, old_y - k * y);
        }
        if (old_r < 0) {
            old_x = -old_x;
            old_y = -old_y;
        }
        Slope sl;
        sl.p = p;
        sl.q = q;
        sl.s = old_x;
        sl.r = -old_y;
        return sl;
    }

    friend bool operator==(const Slope& a, const Slope& b) { return a.p == b.p && a.q == b.q; }
    friend bool operator<(const Slope& a, const Slope& b)
    {
        return a.p != b.p ? a.p < b.p : a.q < b.q;
    }
};

/** @brief Every coprime (p, q) with |p| + |q| <= n, one of each +- pair (q > 0 or q = 0, p = 1) */
inline std::vector<Slope> coprime_slopes(int n)
{
    std::vector<Slope> out;
    for (long q = 0; q <= n; ++q) {
        for (long p = -n; p <= n; ++p) {
            if (std::labs(p) + q > n || (p == 0 && q == 0)) continue;
            if (q == 0 && p != 1) continue;
            if (std::gcd(p, q) != 1) continue;
            out.push_back(Slope::make(p, q));
        }
    }
    return out;
}

using ThetaJet = Jet<Complex, 3>;

/** @brief m, l and r log(-m) + s log(-l) as jets in theta */
struct ConeExpansion {
    Slope slope;
    ThetaJet m_jet;
    ThetaJet l_jet;
    ThetaJet log_combo_jet;
};

/**
 * @brief Closed-form theta-expansion for a curve through (-1, -1) invariant
 * under the involution (a2 = a1 - a1^2).
 */
inline ConeExpansion cone_expansion(const GeometricCurve& c, const Slope& sl,
                                    double involution_tol = 1e-9)
{
    validate_curve(c);
    if (c.m0 != -1 || c.l0 != -1) {
        throw ValidationError("cone_expansion: base point must be (-1, -1)");
    }
    if (std::abs(involution_defect(c)) > involution_tol) {
        throw ValidationError("cone_expansion: curve is not involution-symmetric");
    }
    const double p = double(sl.p), q = double(sl.q), r = double(sl.r), s = double(sl.s);
    const Complex a1 = c.a1, a3 = c.a3;
    const Complex P = p + a1 * q;
    const Complex P2 = P * P, P4 = P2 * P2;
    const Complex a1s = a1 * a1, a1c = a1s * a1;

    ConeExpansion e;
    e.slope = sl;
    e.m_jet = ThetaJet({-1.0, -I / (2.0 * P), 1.0 / (8.0 * P2),
                        I * (p + (3.0 * a1 - 3.0 * a1s + a1c - a3) * q) / (48.0 * P4)},
                       JetVar::theta);
    e.l_jet = ThetaJet({-1.0, -a1 * I / (2.0 * P), a1s / (8.0 * P2),
                        I * ((-2.0 * a1 + 3.0 * a1s + a3) * p + a1s * a1s * q) / (48.0 * P4)},
                       JetVar::theta);
    e.log_combo_jet =
        ThetaJet({0.0, I * (r + a1 * s) / (2.0 * P), 0.0,
                  I * (2.0 * a1 - 3.0 * a1s + a1c - a3) * (p * s - q * r) / (48.0 * P4)},
                 JetVar::theta);
    return e;
}

/**
 * @brief m(theta), l(theta) solved order by order from
 * p log(m/m0) + q log(l/l0) = i theta/2 and l = l(m); any base signs, no
 * symmetry assumed.
 */
inline ConeExpansion cone_expansion_general(const GeometricCurve& c, const Slope& sl)
{
    validate_curve(c);
    const double p = double(sl.p), q = double(sl.q);
    const Complex m0(c.m0), l0(c.l0);
    const Complex D = p / m0 + q * c.a1 / l0;
    if (std::abs(D) < 1e-14) throw DomainError("cone_expansion_general: p + a1 q = 0");
    const ThetaJet curve = c.series(JetVar::theta).truncate<3>();

    ThetaJet delta(Complex{0.0, 0.0}, JetVar::theta);
    auto lhs = [&](const ThetaJet& d) {
        const ThetaJet m = d + m0;
        const ThetaJet l = compose(curve, d) + l0;
        return p * jet_log(m / m0, 0.0) + q * jet_log(l / l0, 0.0);
    };
    const std::array<Complex, 4> target{0.0, I / 2.0, 0.0, 0.0};
    for (int n = 1; n <= 3; ++n) {
        delta[n] = 0.0;
        delta[n] = (target[n] - lhs(delta)[n]) / D;
    }

    const double r = double(sl.r), s = double(sl.s);
    ConeExpansion e;
    e.slope = sl;
    e.m_jet = delta + m0;
    e.l_jet = compose(curve, delta) + l0;
    e.log_combo_jet = r * jet_log(e.m_jet / m0, 0.0) + s * jet_log(e.l_jet / l0, 0.0);
    return e;
}

/**
 * @brief Derivatives d^k m/dtheta^k and d^k l/dtheta^k at 0 (k = 1, 2, 3) from
 * the general closed formulas (base (-1, -1), no symmetry assumed).
 */
struct ConeDerivatives {
    std::array<Complex, 3> m, l;
};

inline ConeDerivatives cone_derivatives_general(const GeometricCurve& c, const Slope& sl)
{
    const double p = double(sl.p), q = double(sl.q);
    const Complex a1 = c.a1, a2 = c.a2, a3 = c.a3;
    const Complex P = p + a1 * q;
    const Complex P3 = P * P * P, P5 = P3 * P * P;
    const Complex a1s = a1 * a1, a1c = a1s * a1, a14 = a1s * a1s;
    ConeDerivatives d;
    d.m[0] = -I / (2.0 * P);
    d.l[0] = -a1 * I / (2.0 * P);
    d.m[1] = (p + (a1s + a2) * q) / (4.0 * P3);
    d.l[1] = ((a1 - a2) * p + a1c * q) / (4.0 * P3);
    d.m[2] = I *
             (p * p + (6.0 * a1s - 2.0 * a1c + 6.0 * a2 - 2.0 * a1 - 3.0 * a1 * a2 - a3) * p * q +
              (a14 + 3.0 * a1s * a2 + 3.0 * a2 * a2 - a1 * a3) * q * q) /
             (8.0 * P5);
    d.l[2] = I *
             ((a1 - 3.0 * a2 + a3) * p * p +
              (6.0 * a1c - 2.0 * a14 - 2.0 * a1s - 6.0 * a1s * a2 - 3.0 * a2 * a2 + 3.0 * a1 * a2 +
               a1 * a3) *
                  p * q +
              a14 * a1 * q * q) /
             (8.0 * P5);
    return d;
}

struct SurgeryOptions {
    ChartOptions chart;
    double theta_max = 0.5;
    double dtheta = 0.01;
    double min_dtheta = 1e-4;
    /** Steps of the continuation that switches on the first-cusp filling */
    int base_steps = 32;
    int max_newton_iterations = 40;
    /** Largest accepted Newton step in the chart, max-norm */
    double max_step = 0.05;
    /** Residual bound of the filling relations */
    double residual_tol = 1e-12;
    /** Smallest |p1| + |q1| accepted by the filled sampler */
    long min_filling = 8;
};

/** @brief The two equations solved on the chart */
struct FillingTarget {
    /** nullopt: first cusp complete (m1 = -1) */
    std::optional<Slope> slope1;
    /** First cusp: p1 log(-m1) + q1 log(-l1) = fraction * pi i */
    double first_fraction = 1.0;
    /** Second cusp either pinned (m2 = -1 + s) or at cone angle theta */
    bool pinned = false;
    Slope slope2;
    double theta = 0.0;
    Complex s{0.0, 0.0};
};

inline std::array<Complex, 2> filling_residual(const VarietyPoint& vp, const FillingTarget& t)
{
    const auto& e = vp.eigenvalues();
    const auto& L = vp.log_neg();
    std::array<Complex, 2> F;
    if (!t.slope1) {
        F[0] = e.m1 + 1.0;
    }
    else {
        F[0] = double(t.slope1->p) * L.m1 + double(t.slope1->q) * L.l1 - t.first_fraction * Pi * I;
    }
    if (t.pinned) {
        F[1] = e.m2 - (-1.0 + t.s);
    }
    else {
        F[1] = double(t.slope2.p) * L.m2 + double(t.slope2.q) * L.l2 - I * t.theta / 2.0;
    }
    return F;
}

namespace detail
{

inline double max_abs(const std::array<Complex, 2>& f)
{
    return std::max(std::abs(f[0]), std::abs(f[1]));
}

inline Mat2 filling_jacobian(const VarietyPoint& vp, const FillingTarget& t)
{
    const auto J = eigenvalue_jacobian(vp.shapes, vp.forms.branches.roots);
    const auto& e = vp.eigenvalues();
    Mat2 m;
    if (!t.slope1) {
        m.a = J.d_du.m1;
        m.b = J.d_dv.m1;
    }
    else {
        const double p = double(t.slope1->p), q = double(t.slope1->q);
        m.a = p * J.d_du.m1 / e.m1 + q * J.d_du.l1 / e.l1;
        m.b = p * J.d_dv.m1 / e.m1 + q * J.d_dv.l1 / e.l1;
    }
    if (t.pinned) {
        m.c = J.d_du.m2;
        m.d = J.d_dv.m2;
    }
    else {
        const double p = double(t.slope2.p), q = double(t.slope2.q);
        m.c = p * J.d_du.m2 / e.m2 + q * J.d_du.l2 / e.l2;
        m.d = p * J.d_dv.m2 / e.m2 + q * J.d_dv.l2 / e.l2;
    }
    return m;
}

}  // namespace detail

/** @brief Newton on the chart for a filling target, from a seed chart point */
inline VarietyPoint solve_filling(const FillingTarget& t, const ChartPoint& seed,
                                  const SurgeryOptions& opt = {})
{
    ChartPoint x = seed;
    VarietyPoint vp = evaluate_chart(x, opt.chart);
    for (int it = 0; it < opt.max_newton_iterations; ++it) {
        const auto F = filling_residual(vp, t);
        if (detail::max_abs(F) <= 0.1 * opt.residual_tol) return vp;
        auto dx = detail::solve2(detail::filling_jacobian(vp, t), {-F[0], -F[1]});
        const double len = std::max(std::abs(dx[0]), std::abs(dx[1]));
        if (!std::isfinite(len)) break;
        if (len > opt.max_step) {
            dx[0] *= opt.max_step / len;
            dx[1] *= opt.max_step / len;
        }
        x = {x.u + dx[0], x.v + dx[1]};
        vp = evaluate_chart(x, opt.chart);
        if (len < 1e-15) break;
    }
    if (!(detail::max_abs(filling_residual(vp, t)) <= opt.residual_tol)) {
        throw ConvergenceError("solve_filling: Newton did not converge");
    }
    return vp;
}

/** @brief A solved cone structure and its filling residuals */
struct ConeStructure {
    double theta = 0.0;
    VarietyPoint point;
    std::array<Complex, 2> residual{};
};

using PathObserver = std::function<void(const ConeStructure&)>;

/**
 * @brief Structure with first cusp complete (m1 = m2 = l2 = -1 start) or
 * filled, second cusp pinned at m2 = -1: the theta = 0 point.
 */
inline VarietyPoint filled_base_point(const std::optional<Slope>& slope1,
                                      const SurgeryOptions& opt = {})
{
    if (!slope1) return evaluate_chart(base_chart_point(), opt.chart);
    FillingTarget t;
    t.slope1 = slope1;
    t.pinned = true;
    ChartPoint x = base_chart_point();
    VarietyPoint vp;
    for (int k = 1; k <= opt.base_steps; ++k) {
        t.first_fraction = double(k) / opt.base_steps;
        vp = solve_filling(t, x, opt);
        x = vp.chart;
    }
    return vp;
}

/**
 * @brief Cone structure: first cusp complete or filled, second cusp at cone
 * angle theta along slope2. Continued in theta from 0 with step halving.
 */
inline ConeStructure solve_cone_structure(const std::optional<Slope>& slope1, const Slope& slope2,
                                          double theta, const SurgeryOptions& opt = {},
                                          const PathObserver& observer = {})
{
    if (!(theta >= 0.0 && theta <= opt.theta_max)) {
        throw ValidationError("solve_cone_structure: theta outside [0, theta_max]");
    }
    FillingTarget t;
    t.slope1 = slope1;
    t.slope2 = slope2;
    VarietyPoint vp = filled_base_point(slope1, opt);
    auto report = [&](double th) {
        ConeStructure cs{th, vp, filling_residual(vp, t)};
        if (observer) observer(cs);
        return cs;
    };
    t.theta = 0.0;
    report(0.0);
    double current = 0.0, step = opt.dtheta;
    while (current < theta) {
        const double next = std::min(theta, current + step);
        t.theta = next;
        try {
            vp = solve_filling(t, vp.chart, opt);
        }
        catch (const ComputationError&) {
            step /= 2.0;
            if (step < opt.min_dtheta) {
                throw ConvergenceError("solve_cone_structure: theta step fell below minimum");
            }
            continue;
        }
        current = next;
        report(current);
    }
    t.theta = theta;
    return ConeStructure{theta, vp, filling_residual(vp, t)};
}

/**
 * @brief Reentrant sampler s -> (m2, l2) along the curve of structures with
 * the first cusp filled (or complete) and m2 = -1 + s.
 */
class FilledCurveSampler
{
public:
    FilledCurveSampler(std::optional<Slope> slope1, const SurgeryOptions& opt = {})
        : slope1_{slope1}, opt_{opt}
    {
        if (slope1_ && std::labs(slope1_->p) + std::labs(slope1_->q) < opt_.min_filling) {
            throw ValidationError("filled_curve_sampler: |p1| + |q1| below the configured minimum");
        }
        base_ = filled_base_point(slope1_, opt_);
    }

    const VarietyPoint& base_point() const { return base_; }
    const std::optional<Slope>& slope1() const { return slope1_; }

    VarietyPoint solve(Complex s) const
    {
        if (s == Complex{0.0, 0.0}) return base_;
        FillingTarget t;
        t.slope1 = slope1_;
        t.pinned = true;
        t.s = s;
        return solve_filling(t, base_.chart, opt_);
    }

    std::pair<Complex, Complex> operator()(Complex s) const
    {
        const auto vp = solve(s);
        return {-1.0 + s, vp.eigenvalues().l2};
    }

private:
    std::optional<Slope> slope1_;
    SurgeryOptions opt_;
    VarietyPoint base_;
};

inline CurveSampler filled_curve_sampler(std::optional<Slope> slope1, const SurgeryOptions& opt = {})
{
    auto sampler = std::make_shared<const FilledCurveSampler>(slope1, opt);
    return [sampler](Complex s) { return (*sampler)(s); };
}

/** @brief Geometric curve of the second cusp, first cusp filled by slope1 or complete */
inline GeometricCurve filled_curve(std::optional<Slope> slope1, const SurgeryOptions& opt = {},
                                   const StencilOptions& stencil = {})
{
    return expand_from_samples(filled_curve_sampler(slope1, opt), -1, -1, stencil);
}

/** @brief The curve of W with both cusps complete, from its A-polynomial */
inline GeometricCurve whitehead_curve()
{
    return expand_from_polynomial(BivariatePolynomial::whitehead(), -1, -1, Complex{2.0, 2.0});
}

struct ConvergenceRow {
    /** nullopt: the unfilled limit */
    std::optional<Slope> slope1;
    bool ok = false;
    std::string error;
    GeometricCurve curve;
    std::array<double, 3> errors{};
    double involution_defect = 0.0;
    bool involution_ok = false;
};

/**
 * @brief One row per first-cusp filling with |a_i - a_i(limit)|. Rows run
 * concurrently; failures are stored in the row. Row order follows the input.
 */
inline std::vector<ConvergenceRow> convergence_table(const std::vector<std::optional<Slope>>& slopes,
                                                     const SurgeryOptions& opt = {},
                                                     const StencilOptions& stencil = {},
                                                     bool parallel = true)
{
    const GeometricCurve limit = whitehead_curve();
    auto row = [&](std::optional<Slope> sl) {
        ConvergenceRow r;
        r.slope1 = sl;
        try {
            r.curve = filled_curve(sl, opt, stencil);
            r.errors = {std::abs(r.curve.a1 - limit.a1), std::abs(r.curve.a2 - limit.a2),
                        std::abs(r.curve.a3 - limit.a3)};
            r.involution_defect = std::abs(involution_defect(r.curve));
            r.involution_ok = r.involution_defect < 1e-6;
            r.ok = true;
        }
        catch (const Error& e) {
            r.error = e.what();
        }
        return r;
    };
    std::vector<ConvergenceRow> rows;
    if (!parallel) {
        for (const auto& sl : slopes) rows.push_back(row(sl));
        return rows;
    }
    std::vector<std::future<ConvergenceRow>> jobs;
    for (const auto& sl : slopes) jobs.push_back(std::async(std::launch::async, row, sl));
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

}  // namespace conetube
