#pragma once

// Maximal tube around the singular core: geodesic distances via cross-ratios,
// tube radius from traces, core length, normalized meridian length and its
// expansion mu_hat^2 = k0 + k1 theta^2 + O(theta^4).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "conetube/complex_jets.hpp"
#include "conetube/dehn_surgery.hpp"
#include "conetube/geometric_curve.hpp"
#include "conetube/holonomy.hpp"
#include "conetube/mobius.hpp"

namespace conetube
{

/**
 * @brief [w1, w2; w3, w4] = (w1-w3)(w2-w4)/((w1-w4)(w2-w3)).
 *
 * A factor containing infinity is dropped. The lines (w1, w2) and (w3, w4)
 * must be nondegenerate and share no endpoint.
 */
inline Complex cross_ratio(const ExtendedComplex& w1, const ExtendedComplex& w2,
                           const ExtendedComplex& w3, const ExtendedComplex& w4)
{
    if (w1 == w2 || w3 == w4) throw ValidationError("cross_ratio: degenerate line");
    if (w1 == w3 || w1 == w4 || w2 == w3 || w2 == w4) {
        throw ValidationError("cross_ratio: coincident endpoints across the two lines");
    }
    auto factor = [](const ExtendedComplex& a, const ExtendedComplex& b) {
        if (a.infinite || b.infinite) return Complex{1.0, 0.0};
        return a.value - b.value;
    };
    const Complex num = factor(w1, w3) * factor(w2, w4);
    const Complex den = factor(w1, w4) * factor(w2, w3);
    if (den == Complex{0.0, 0.0} || num == Complex{0.0, 0.0}) {
        throw ValidationError("cross_ratio: coincident endpoints across the two lines");
    }
    return num / den;
}

/** @brief Hyperbolic distance between the geodesics (w1, w2) and (w3, w4) in upper half-space */
inline double line_distance(const ExtendedComplex& w1, const ExtendedComplex& w2,
                            const ExtendedComplex& w3, const ExtendedComplex& w4)
{
    const Complex cr = cross_ratio(w1, w2, w3, w4);
    const double gap = std::abs(1.0 - cr);
    if (gap < 1e-300) throw ValidationError("line_distance: cross-ratio equals 1");
    const double ch = (1.0 + std::abs(cr)) / gap;
    return std::acosh(std::max(1.0, ch));
}

/**
 * @brief cosh 2R = |bc| + |bc + 1| with bc = -tc/(tr^2 - 4).
 *
 * tc is tr of the commutator of the peripheral element and the tie class,
 * minus 2; tr is the trace of the peripheral element.
 */
inline double tube_cosh2R(Complex tc, Complex tr)
{
    const Complex d = tr * tr - 4.0;
    if (std::abs(d) < 1e-300) throw DomainError("tube_cosh2R: parabolic peripheral element");
    const Complex bc = -tc / d;
    return std::abs(bc) + std::abs(bc + 1.0);
}

/** @brief (|tc| + |tr^2 - (tc + 2) - 2|)/|tr^2 - 4|, the trace-only form */
inline double tube_cosh2R_trace_form(Complex tc, Complex tr)
{
    const Complex d = tr * tr - 4.0;
    if (std::abs(d) < 1e-300) throw DomainError("tube_cosh2R: parabolic peripheral element");
    return (std::abs(tc) + std::abs(tr * tr - (tc + 2.0) - 2.0)) / std::abs(d);
}

inline double radius_from_cosh2R(double cosh2R) { return 0.5 * std::acosh(std::max(1.0, cosh2R)); }

/**
 * @brief Half the distance between the axis of A and its image under C^-1,
 * after moving the finite fixed point of A to 0.
 */
inline double tube_radius_from_axes(const WhHolonomy& rep)
{
    const Complex x = rep.x;
    const Complex fix = x / (1.0 - x * x);
    const MobiusMatrix T{1.0, -fix, 0.0, 1.0};
    const MobiusMatrix g = T * rep.C * T.inverse();
    if (std::abs(g.a) < 1e-300 || std::abs(g.c) < 1e-300) {
        throw DomainError("tube_radius_from_axes: image axis passes through infinity");
    }
    return 0.5 * line_distance(ExtendedComplex(0.0), ExtendedComplex::infinity(),
                               ExtendedComplex(-g.b / g.a), ExtendedComplex(-g.d / g.c));
}

/** @brief t = 2 |Re(r log(-m2) + s log(-l2))| from continued logs */
inline double core_length_from_logs(Complex log_neg_m2, Complex log_neg_l2, const Slope& slope2)
{
    return 2.0 * std::abs((double(slope2.r) * log_neg_m2 + double(slope2.s) * log_neg_l2).real());
}

/** @brief Core length with logs on the sheet through log(1) = 0, for (m2, l2) near (-1, -1) */
inline double core_length(Complex m2, Complex l2, const Slope& slope2)
{
    if (std::abs(m2) < 1e-300 || std::abs(l2) < 1e-300) {
        throw BranchError("core_length: zero eigenvalue");
    }
    return core_length_from_logs(continue_log(-m2, 0.0), continue_log(-l2, 0.0), slope2);
}

struct TubeMeasurement {
    double theta = 0.0;
    double R = 0.0;
    double t = 0.0;
    double mu = 0.0;
    double mu_hat_sq = 0.0;
    double cosh2R = 1.0;

    /** @brief mu_hat^2 against mu^2/(boundary torus area) */
    double area_identity_residual() const
    {
        const double area = theta * t * std::sinh(R) * std::cosh(R);
        return std::abs(mu_hat_sq - mu * mu / area);
    }
};

inline TubeMeasurement make_measurement(double theta, double cosh2R, double t)
{
    if (!(theta > 0.0)) throw ValidationError("tube measurement: theta must be positive");
    if (!(t > 0.0)) throw DomainError("tube measurement: core length is zero (cusp)");
    TubeMeasurement m;
    m.theta = theta;
    m.cosh2R = cosh2R;
    m.R = radius_from_cosh2R(cosh2R);
    if (!(m.R > 0.0)) throw DomainError("tube measurement: degenerate tube (R = 0)");
    m.t = t;
    m.mu = theta * std::sinh(m.R);
    m.mu_hat_sq = theta * std::tanh(m.R) / t;
    return m;
}

/** @brief Measurement of a solved cone structure; the second cusp carries the cone */
inline TubeMeasurement measure_tube(const ConeStructure& cs, const Slope& slope2)
{
    const auto& e = cs.point.eigenvalues();
    const auto& L = cs.point.log_neg();
    const Complex tc = commutator_trace_from_eigenvalues(e.m2, e.l2);
    const Complex tr = e.m2 + 1.0 / e.m2;
    return make_measurement(cs.theta, tube_cosh2R(tc, tr), core_length_from_logs(L.m2, L.l2, slope2));
}

inline TubeMeasurement mu_hat_squared_numeric(const std::optional<Slope>& slope1,
                                              const Slope& slope2, double theta,
                                              const SurgeryOptions& opt = {})
{
    if (!(theta > 0.0)) throw ValidationError("mu_hat_squared_numeric: theta must be positive");
    return measure_tube(solve_cone_structure(slope1, slope2, theta, opt), slope2);
}

/** @brief Holonomy representation of a solved cone structure, x = m2 */
inline WhHolonomy representation_of(const ConeStructure& cs)
{
    const auto& e = cs.point.eigenvalues();
    return build_representation(e.m2, y_from_eigenvalues(e.m2, e.l2));
}

struct KExpansion {
    double k0 = 0.0;
    double k1 = 0.0;
    Slope slope2;
    /** "closed-form" or "numeric-jet" */
    std::string source;
    /** theta^1 coefficient of the jet pipeline; zero by symmetry */
    double odd_term = 0.0;
};

/**
 * @brief (k0, k1) by expanding mu_hat^2 = theta tanh(R)/t in theta with jets.
 *
 * Vanishing leading powers are factored before any modulus: m - 1/m, m^2 - 1,
 * l + m^2 and the core length all vanish to first order.
 */
inline KExpansion k_expansion_closed_form(const GeometricCurve& curve, const Slope& slope2,
                                          double involution_tol = 1e-9)
{
    using J3 = Jet<Complex, 3>;
    using J2 = Jet<Complex, 2>;
    using R2 = Jet<double, 2>;
    const ConeExpansion e = cone_expansion(curve, slope2, involution_tol);
    const J3& m = e.m_jet;
    const J3& l = e.l_jet;

    const J2 h = (m - 1.0 / m).factor_power<1>(1e-12);
    const J2 g = h * h;  // (tr^2 - 4)/theta^2
    const J2 A = (m * m - 1.0).factor_power<1>(1e-12);
    const J2 B = (l + m * m).factor_power<1>(1e-12);
    const J2 tc = -(A * (1.0 - l.truncate<2>()) / B);
    const J2 beta = -(tc / g);  // theta^2 * bc

    J2 beta_shift = beta;
    beta_shift[2] += 1.0;
    const R2 S = real_modulus_jet<0>(beta, 1e-12) + real_modulus_jet<0>(beta_shift, 1e-12);
    R2 num = S, den = S;
    num[2] -= 1.0;
    den[2] += 1.0;
    const R2 ratio = num / den;
    if (!(ratio[0] > 0.0)) throw DomainError("k_expansion: tanh^2 R has no positive limit");
    const R2 tanhR = jet_sqrt(ratio, std::sqrt(ratio[0]));

    const J3 combo = double(slope2.r) * jet_log(-m, 0.0) + double(slope2.s) * jet_log(-l, 0.0);
    R2 tau = (2.0 * real_part(combo)).factor_power<1>(1e-12);  // t/theta
    if (std::abs(tau[0]) < 1e-14) throw DomainError("k_expansion: core length vanishes to second order");
    if (tau[0] < 0.0) tau = -tau;

    const R2 mu2 = tanhR / tau;
    KExpansion k;
    k.k0 = mu2[0];
    k.k1 = mu2[2];
    k.odd_term = mu2[1];
    k.slope2 = slope2;
    k.source = "numeric-jet";
    return k;
}

/** @brief Rational function x -> k1 for the both-cusps-complete curve, x = p/q */
inline double k1_rational(double x)
{
    const double n = -x * x * x * x - 8.0 * x * x * x - 48.0 * x * x - 128.0 * x - 128.0;
    const double d = x * x + 4.0 * x + 8.0;
    return n / (12.0 * d * d);
}

/** @brief Closed-form (k0, k1) of the both-cusps-complete curve */
inline KExpansion whitehead_k_formula(const Slope& sl)
{
    const double p = double(sl.p), q = double(sl.q);
    const double n2 = p * p + 4.0 * p * q + 8.0 * q * q;
    KExpansion k;
    k.k0 = n2 / 2.0;
    k.k1 = (-p * p * p * p - 8.0 * p * p * p * q - 48.0 * p * p * q * q - 128.0 * p * q * q * q -
            128.0 * q * q * q * q) /
           (12.0 * n2 * n2);
    k.slope2 = sl;
    k.source = "closed-form";
    return k;
}

namespace detail
{

/** Gaussian elimination with partial pivoting on a small dense system */
template <std::size_t N>
std::array<double, N> solve_dense(std::array<std::array<double, N>, N> a, std::array<double, N> b)
{
    for (std::size_t c = 0; c < N; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < N; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        }
        if (std::abs(a[piv][c]) < 1e-300) throw DomainError("singular linear system");
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < N; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < N; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::array<double, N> x{};
    for (std::size_t i = N; i-- > 0;) {
        double acc = b[i];
        for (std::size_t k = i + 1; k < N; ++k) acc -= a[i][k] * x[k];
        x[i] = acc / a[i][i];
    }
    return x;
}

}  // namespace detail

/**
 * @brief B0..B4 with k1 = (B0 p^4 + B1 p^3 q + ... + B4 q^4)/|p + a1 q|^4,
 * recovered from the jet pipeline at five slopes.
 */
struct BCoefficients {
    std::array<double, 5> B{};
    /** Disagreement of the quartic at a sixth slope */
    double check_residual = 0.0;
};

inline BCoefficients b_coefficients(const GeometricCurve& curve, double involution_tol = 1e-9)
{
    const std::array<Slope, 5> fit{Slope::make(1, 0), Slope::make(0, 1), Slope::make(1, 1),
                                   Slope::make(-1, 1), Slope::make(2, 1)};
    auto quartic_row = [](const Slope& s) {
        std::array<double, 5> row{};
        for (int j = 0; j < 5; ++j) row[j] = std::pow(double(s.p), 4 - j) * std::pow(double(s.q), j);
        return row;
    };
    auto scaled_k1 = [&](const Slope& s) {
        const double P = std::norm(double(s.p) + curve.a1 * double(s.q));
        return k_expansion_closed_form(curve, s, involution_tol).k1 * P * P;
    };
    std::array<std::array<double, 5>, 5> a{};
    std::array<double, 5> rhs{};
    for (int i = 0; i < 5; ++i) {
        a[i] = quartic_row(fit[i]);
        rhs[i] = scaled_k1(fit[i]);
    }
    BCoefficients out;
    out.B = detail::solve_dense(a, rhs);
    const Slope probe = Slope::make(3, 2);
    const auto row = quartic_row(probe);
    double predicted = 0.0;
    for (int j = 0; j < 5; ++j) predicted += out.B[j] * row[j];
    out.check_residual = std::abs(predicted - scaled_k1(probe));
    return out;
}

struct RangeResult {
    double min = 0.0;
    double max = 0.0;
    double argmin = 0.0;
    double argmax = 0.0;
    long evaluations = 0;
};

/**
 * @brief Extremes of k1_rational over a uniform grid on [-1e4, 1e4], the
 * limit at infinity, and the critical points bracketed by the grid.
 */
inline RangeResult k1_range_check(long samples, double half_width = 1e4)
{
    if (samples < 1000) throw ValidationError("k1_range_check: need at least 1000 samples");
    // sign of f' is the sign of N'D - N D' with f = N/D
    auto slope_sign = [](double x) {
        const double n = -x * x * x * x - 8.0 * x * x * x - 48.0 * x * x - 128.0 * x - 128.0;
        const double dn = -4.0 * x * x * x - 24.0 * x * x - 96.0 * x - 128.0;
        const double q = x * x + 4.0 * x + 8.0;
        const double d = q * q;
        const double dd = 2.0 * q * (2.0 * x + 4.0);
        return dn * d - n * dd;
    };
    RangeResult res;
    res.min = res.max = -1.0 / 12.0;
    res.argmin = res.argmax = std::numeric_limits<double>::infinity();
    auto take = [&](double x) {
        const double f = k1_rational(x);
        ++res.evaluations;
        if (f < res.min) {
            res.min = f;
            res.argmin = x;
        }
        if (f > res.max) {
            res.max = f;
            res.argmax = x;
        }
    };
    const double h = 2.0 * half_width / double(samples - 1);
    double prev_x = -half_width, prev_s = slope_sign(prev_x);
    take(prev_x);
    for (long i = 1; i < samples; ++i) {
        const double x = -half_width + double(i) * h;
        const double s = slope_sign(x);
        take(x);
        if ((prev_s < 0.0) != (s < 0.0)) {
            double lo = prev_x, hi = x, slo = prev_s;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double sm = slope_sign(mid);
                if ((sm < 0.0) == (slo < 0.0)) {
                    lo = mid;
                    slo = sm;
                }
                else {
                    hi = mid;
                }
            }
            take(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_s = s;
    }
    return res;
}

struct MonotonicityReport {
    Slope slope2;
    double k1 = 0.0;
    bool mu_hat_decreasing = false;
    bool sum_increasing = false;
};

inline MonotonicityReport monotonicity_from_k1(const Slope& slope2, double k1)
{
    return {slope2, k1, k1 < 0.0, k1 + 1.0 > 0.0};
}

inline MonotonicityReport monotonicity_report(const GeometricCurve& curve, const Slope& slope2,
                                              double involution_tol = 1e-9)
{
    return monotonicity_from_k1(slope2, k_expansion_closed_form(curve, slope2, involution_tol).k1);
}

/**
 * @brief Least-squares fit of values by c0 + c1 theta^2 + ... + c_{n-1}
 * theta^{2(n-1)}, in the scaled variable (theta/theta_max)^2.
 */
template <std::size_t Terms>
std::array<double, Terms> fit_even_polynomial(const std::vector<double>& thetas,
                                              const std::vector<double>& values)
{
    if (thetas.size() != values.size() || thetas.size() < Terms) {
        throw ValidationError("fit_even_polynomial: need at least as many samples as terms");
    }
    double scale = 0.0;
    for (double t : thetas) scale = std::max(scale, std::abs(t));
    if (!(scale > 0.0)) throw ValidationError("fit_even_polynomial: all thetas are zero");
    std::array<std::array<double, Terms>, Terms> ata{};
    std::array<double, Terms> atb{};
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double u = (thetas[i] / scale) * (thetas[i] / scale);
        std::array<double, Terms> row{};
        double pw = 1.0;
        for (std::size_t j = 0; j < Terms; ++j, pw *= u) row[j] = pw;
        for (std::size_t a = 0; a < Terms; ++a) {
            atb[a] += row[a] * values[i];
            for (std::size_t b = 0; b < Terms; ++b) ata[a][b] += row[a] * row[b];
        }
    }
    auto c = detail::solve_dense(ata, atb);
    double factor = 1.0;
    for (std::size_t j = 0; j < Terms; ++j) {
        c[j] /= factor;
        factor *= scale * scale;
    }
    return c;
}

}  // namespace conetube
