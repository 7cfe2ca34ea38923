#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <type_traits>

#include "conetube/error.hpp"

namespace conetube
{

using Complex = std::complex<double>;

inline constexpr Complex I{0.0, 1.0};
inline constexpr double Pi = std::numbers::pi;

/**
 * @brief Numerical tolerances shared by every module.
 *
 * One instance is threaded through the public operations; the CLI builds it
 * from --tol or CONETUBE_TOL.
 */
struct Tolerances {
    /** Residual bound for algebraic identities */
    double identity = 1e-12;
    /** Newton stops once the residual norm drops below this */
    double newton = 1e-13;
};

inline const Tolerances& default_tolerances()
{
    static const Tolerances tol{};
    return tol;
}

inline bool is_finite(const Complex& z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}
inline bool is_finite(double x) { return std::isfinite(x); }

inline double magnitude(const Complex& z) { return std::abs(z); }
inline double magnitude(double x) { return std::abs(x); }

/**
 * @brief Log continued from a neighbouring value.
 *
 * Picks Log(w) + 2*pi*i*k with k chosen so the result is nearest to
 * `previous`. Never silently returns the principal branch.
 */
inline Complex continue_log(const Complex& w, const Complex& previous)
{
    if (w == Complex{0.0, 0.0} || !is_finite(w)) {
        throw BranchError("continue_log: argument is zero or not finite");
    }
    Complex principal = std::log(w);
    double turns = std::round((previous.imag() - principal.imag()) / (2.0 * Pi));
    return principal + Complex{0.0, 2.0 * Pi * turns};
}

/**
 * @brief Square root continued from a neighbouring root.
 *
 * Chooses the sign of sqrt(w) nearest to `previous`; throws when the step is
 * too large to decide (relative jump of 0.5 or more).
 */
inline Complex continue_sqrt(const Complex& w, const Complex& previous)
{
    if (!is_finite(w)) {
        throw BranchError("continue_sqrt: argument is not finite");
    }
    Complex root = std::sqrt(w);
    if (std::abs(root - previous) > std::abs(root + previous)) {
        root = -root;
    }
    if (std::abs(root - previous) >= 0.5 * std::abs(previous)) {
        throw BranchError("continue_sqrt: branch jump along path");
    }
    return root;
}

/** @brief Variable a jet is expanded in. `any` marks constants. */
enum class JetVar : unsigned char { any, theta, s, m, u, v };

inline const char* to_string(JetVar var)
{
    switch (var) {
        case JetVar::any: return "any";
        case JetVar::theta: return "theta";
        case JetVar::s: return "s";
        case JetVar::m: return "m";
        case JetVar::u: return "u";
        case JetVar::v: return "v";
    }
    return "?";
}

inline constexpr int MaxJetOrder = 4;

/**
 * @brief Truncated power series c0 + c1 t + ... + cN t^N.
 *
 * Arithmetic truncates exactly at `Order`. Coefficients are either Complex or
 * double. Jets of different variables do not mix, except with constants
 * (JetVar::any).
 */
template <class T, int Order>
class Jet
{
    static_assert(Order >= 0 && Order <= MaxJetOrder, "jet order must be in [0, 4]");
    static_assert(std::is_same_v<T, Complex> || std::is_same_v<T, double>);

public:
    using value_type = T;
    static constexpr int order = Order;
    static constexpr int size = Order + 1;

    Jet() { coeffs_.fill(T{0}); }

    explicit Jet(T constant, JetVar var = JetVar::any) : var_{var}
    {
        coeffs_.fill(T{0});
        coeffs_[0] = constant;
    }

    Jet(std::array<T, size> coeffs, JetVar var) : coeffs_{coeffs}, var_{var}
    {
        for (const auto& c : coeffs_) {
            if (!is_finite(c)) {
                throw DomainError("jet coefficient is not finite");
            }
        }
    }

    /** @brief The jet t (identity) in the given variable */
    static Jet variable(JetVar var)
    {
        static_assert(Order >= 1);
        Jet j(T{0}, var);
        j.coeffs_[1] = T{1};
        return j;
    }

    T& operator[](int k) { return coeffs_.at(k); }
    const T& operator[](int k) const { return coeffs_.at(k); }

    const std::array<T, size>& coeffs() const { return coeffs_; }
    JetVar var() const { return var_; }

    T constant() const { return coeffs_[0]; }

    /** @brief Horner evaluation of the truncated polynomial */
    T evaluate(T t) const
    {
        T acc = coeffs_[Order];
        for (int k = Order - 1; k >= 0; --k) {
            acc = acc * t + coeffs_[k];
        }
        return acc;
    }

    /** @brief Drop coefficients above `Lower` */
    template <int Lower>
    Jet<T, Lower> truncate() const
    {
        static_assert(Lower <= Order);
        std::array<T, Lower + 1> c{};
        std::copy_n(coeffs_.begin(), Lower + 1, c.begin());
        return Jet<T, Lower>(c, var_);
    }

    /**
     * @brief Divide by t^K when the first K coefficients vanish.
     *
     * The result is valid through order Order-K. Throws if a leading
     * coefficient exceeds `zero_tol` relative to the largest coefficient.
     */
    template <int K>
    Jet<T, Order - K> factor_power(double zero_tol = 1e-12) const
    {
        static_assert(K >= 0 && K <= Order);
        double scale = 0.0;
        for (const auto& c : coeffs_) scale = std::max(scale, magnitude(c));
        for (int k = 0; k < K; ++k) {
            if (magnitude(coeffs_[k]) > zero_tol * std::max(scale, 1.0)) {
                throw DomainError("factor_power: leading coefficient does not vanish");
            }
        }
        std::array<T, Order - K + 1> c{};
        for (int k = 0; k <= Order - K; ++k) c[k] = coeffs_[k + K];
        return Jet<T, Order - K>(c, var_);
    }

    /** @brief Largest coefficient magnitude */
    double max_abs() const
    {
        double m = 0.0;
        for (const auto& c : coeffs_) m = std::max(m, magnitude(c));
        return m;
    }

    Jet& operator+=(const Jet& o)
    {
        var_ = merge_var(var_, o.var_);
        for (int k = 0; k <= Order; ++k) coeffs_[k] += o.coeffs_[k];
        return *this;
    }
    Jet& operator-=(const Jet& o)
    {
        var_ = merge_var(var_, o.var_);
        for (int k = 0; k <= Order; ++k) coeffs_[k] -= o.coeffs_[k];
        return *this;
    }
    Jet& operator*=(T scalar)
    {
        for (auto& c : coeffs_) c *= scalar;
        return *this;
    }
    Jet& operator+=(T scalar)
    {
        coeffs_[0] += scalar;
        return *this;
    }
    Jet& operator-=(T scalar)
    {
        coeffs_[0] -= scalar;
        return *this;
    }

    Jet operator-() const
    {
        Jet r = *this;
        for (auto& c : r.coeffs_) c = -c;
        return r;
    }

    static JetVar merge_var(JetVar a, JetVar b)
    {
        if (a == JetVar::any) return b;
        if (b == JetVar::any || a == b) return a;
        throw ValidationError(std::string("jet variable mismatch: ") + to_string(a) +
                              " vs " + to_string(b));
    }

private:
    std::array<T, size> coeffs_;
    JetVar var_ = JetVar::any;
};

using ComplexJet = Jet<Complex, MaxJetOrder>;
using RealJet = Jet<double, MaxJetOrder>;

template <class T, int N>
Jet<T, N> operator+(Jet<T, N> a, const Jet<T, N>& b)
{
    return a += b;
}
template <class T, int N>
Jet<T, N> operator-(Jet<T, N> a, const Jet<T, N>& b)
{
    return a -= b;
}
template <class T, int N>
Jet<T, N> operator+(Jet<T, N> a, std::type_identity_t<T> s)
{
    return a += s;
}
template <class T, int N>
Jet<T, N> operator+(std::type_identity_t<T> s, Jet<T, N> a)
{
    return a += s;
}
template <class T, int N>
Jet<T, N> operator-(Jet<T, N> a, std::type_identity_t<T> s)
{
    return a -= s;
}
template <class T, int N>
Jet<T, N> operator-(std::type_identity_t<T> s, const Jet<T, N>& a)
{
    return (-a) += s;
}
template <class T, int N>
Jet<T, N> operator*(Jet<T, N> a, std::type_identity_t<T> s)
{
    return a *= s;
}
template <class T, int N>
Jet<T, N> operator*(std::type_identity_t<T> s, Jet<T, N> a)
{
    return a *= s;
}

/** @brief Truncated Cauchy product */
template <class T, int N>
Jet<T, N> jet_mul(const Jet<T, N>& f, const Jet<T, N>& g)
{
    std::array<T, N + 1> c{};
    for (int n = 0; n <= N; ++n) {
        T acc{0};
        for (int k = 0; k <= n; ++k) acc += f[k] * g[n - k];
        c[n] = acc;
    }
    return Jet<T, N>(c, Jet<T, N>::merge_var(f.var(), g.var()));
}

template <class T, int N>
Jet<T, N> operator*(const Jet<T, N>& f, const Jet<T, N>& g)
{
    return jet_mul(f, g);
}

template <class T, int N>
Jet<T, N> reciprocal(const Jet<T, N>& f)
{
    if (f[0] == T{0}) {
        throw DomainError("reciprocal: constant term is zero");
    }
    std::array<T, N + 1> h{};
    h[0] = T{1} / f[0];
    for (int n = 1; n <= N; ++n) {
        T acc{0};
        for (int k = 1; k <= n; ++k) acc += f[k] * h[n - k];
        h[n] = -acc / f[0];
    }
    return Jet<T, N>(h, f.var());
}

template <class T, int N>
Jet<T, N> operator/(const Jet<T, N>& f, const Jet<T, N>& g)
{
    return jet_mul(f, reciprocal(g));
}

template <class T, int N>
Jet<T, N> operator/(const Jet<T, N>& f, std::type_identity_t<T> s)
{
    return f * (T{1} / s);
}

template <class T, int N>
Jet<T, N> operator/(std::type_identity_t<T> s, const Jet<T, N>& g)
{
    return reciprocal(g) * s;
}

/**
 * @brief Square root with an explicitly chosen constant term.
 *
 * `branch_of_c0` must square to f[0]; it selects the sheet.
 */
template <class T, int N>
Jet<T, N> jet_sqrt(const Jet<T, N>& f, std::type_identity_t<T> branch_of_c0, double tol = 1e-10)
{
    if (f[0] == T{0}) {
        throw DomainError("jet_sqrt: constant term is zero (ramified)");
    }
    if (magnitude(branch_of_c0 * branch_of_c0 - f[0]) > tol * std::max(1.0, magnitude(f[0]))) {
        throw BranchError("jet_sqrt: supplied branch does not square to the constant term");
    }
    std::array<T, N + 1> g{};
    g[0] = branch_of_c0;
    for (int n = 1; n <= N; ++n) {
        T acc{0};
        for (int k = 1; k < n; ++k) acc += g[k] * g[n - k];
        g[n] = (f[n] - acc) / (T{2} * g[0]);
    }
    return Jet<T, N>(g, f.var());
}

/** @brief Logarithm around a supplied value of log(f[0]) */
template <int N>
Jet<Complex, N> jet_log(const Jet<Complex, N>& f, Complex log_of_c0, double tol = 1e-10)
{
    if (f[0] == Complex{0.0, 0.0}) {
        throw DomainError("jet_log: constant term is zero");
    }
    if (std::abs(std::exp(log_of_c0) - f[0]) > tol * std::max(1.0, std::abs(f[0]))) {
        throw BranchError("jet_log: supplied log does not exponentiate to the constant term");
    }
    std::array<Complex, N + 1> L{};
    L[0] = log_of_c0;
    for (int n = 1; n <= N; ++n) {
        Complex acc{0.0, 0.0};
        for (int k = 1; k < n; ++k) acc += double(k) * L[k] * f[n - k];
        L[n] = (f[n] - acc / double(n)) / f[0];
    }
    return Jet<Complex, N>(L, f.var());
}

template <class T, int N>
Jet<T, N> jet_exp(const Jet<T, N>& f)
{
    std::array<T, N + 1> E{};
    E[0] = std::exp(f[0]);
    for (int n = 1; n <= N; ++n) {
        T acc{0};
        for (int k = 1; k <= n; ++k) acc += T(double(k)) * f[k] * E[n - k];
        E[n] = acc / T(double(n));
    }
    return Jet<T, N>(E, f.var());
}

/** @brief f(g(t)) for g with zero constant term; result lives in g's variable */
template <class T, int N>
Jet<T, N> compose(const Jet<T, N>& f, const Jet<T, N>& g, double zero_tol = 1e-14)
{
    if (magnitude(g[0]) > zero_tol) {
        throw DomainError("compose: inner jet has nonzero constant term");
    }
    Jet<T, N> inner = g;
    inner[0] = T{0};
    Jet<T, N> acc(f[N], g.var());
    for (int k = N - 1; k >= 0; --k) {
        acc = jet_mul(acc, inner);
        acc[0] += f[k];
    }
    return acc;
}

/**
 * @brief Compositional inverse h with h(g(t)) = t.
 *
 * `result_var` names the variable of h (the values of g).
 */
template <class T, int N>
Jet<T, N> jet_reversion(const Jet<T, N>& g, JetVar result_var = JetVar::any,
                        double zero_tol = 1e-14, double min_linear = 1e-12)
{
    static_assert(N >= 1);
    if (magnitude(g[0]) > zero_tol) {
        throw DomainError("jet_reversion: constant term is not zero");
    }
    if (magnitude(g[1]) < min_linear) {
        throw DomainError("jet_reversion: linear term vanishes");
    }
    Jet<T, N> inner = g;
    inner[0] = T{0};
    Jet<T, N> h(T{0}, result_var);
    h[1] = T{1} / g[1];
    T g1_power = g[1];
    for (int n = 2; n <= N; ++n) {
        g1_power *= g[1];
        h[n] = -compose(h, inner)[n] / g1_power;
    }
    return h;
}

template <int N>
Jet<Complex, N> conj(const Jet<Complex, N>& f)
{
    std::array<Complex, N + 1> c{};
    for (int k = 0; k <= N; ++k) c[k] = std::conj(f[k]);
    return Jet<Complex, N>(c, f.var());
}

template <int N>
Jet<double, N> real_part(const Jet<Complex, N>& f)
{
    std::array<double, N + 1> c{};
    for (int k = 0; k <= N; ++k) c[k] = f[k].real();
    return Jet<double, N>(c, f.var());
}

template <int N>
Jet<double, N> imag_part(const Jet<Complex, N>& f)
{
    std::array<double, N + 1> c{};
    for (int k = 0; k <= N; ++k) c[k] = f[k].imag();
    return Jet<double, N>(c, f.var());
}

template <int N>
Jet<Complex, N> to_complex(const Jet<double, N>& f)
{
    std::array<Complex, N + 1> c{};
    for (int k = 0; k <= N; ++k) c[k] = f[k];
    return Jet<Complex, N>(c, f.var());
}

/**
 * @brief |f| as a real jet in a real variable t > 0.
 *
 * The caller declares that f = t^K * g with g[0] != 0; the result is
 * t^K * sqrt(g * conj(g)), valid through the order of f.
 */
template <int K, class T, int N>
Jet<double, N> real_modulus_jet(const Jet<T, N>& f, double zero_tol = 1e-12)
{
    static_assert(K >= 0 && K <= N);
    auto g = f.template factor_power<K>(zero_tol);
    if (magnitude(g[0]) <= zero_tol * std::max(1.0, g.max_abs())) {
        throw DomainError("real_modulus_jet: declared leading power is wrong (g0 = 0)");
    }
    Jet<double, N - K> squared;
    if constexpr (std::is_same_v<T, Complex>) {
        squared = real_part(jet_mul(g, conj(g)));
    }
    else {
        squared = jet_mul(g, g);
    }
    auto modulus = jet_sqrt(squared, magnitude(g[0]));
    std::array<double, N + 1> c{};
    for (int k = 0; k <= N - K; ++k) c[k + K] = modulus[k];
    return Jet<double, N>(c, f.var());
}

}  // namespace conetube
