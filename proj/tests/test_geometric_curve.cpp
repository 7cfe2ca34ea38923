#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "conetube/dehn_surgery.hpp"
#include "conetube/geometric_curve.hpp"
#include "conetube/polynomial_io.hpp"

using namespace conetube;

namespace
{

const double sqrt3 = std::sqrt(3.0);

/** Root of A(., m) near seed by scalar Newton, independent of the jet code */
Complex newton_l(const BivariatePolynomial& A, Complex m, Complex seed)
{
    const auto Al = A.derivative(0);
    Complex l = seed;
    for (int it = 0; it < 100; ++it) {
        const Complex step = A(l, m) / Al(l, m);
        l -= step;
        if (std::abs(step) < 1e-16) break;
    }
    return l;
}

Complex series_value(const GeometricCurve& c, Complex d)
{
    return double(c.l0) + c.a1 * d + c.a2 / 2.0 * d * d + c.a3 / 6.0 * d * d * d;
}

}  // namespace

TEST(PolynomialCurve, WhiteheadCoefficients)
{
    const auto c = whitehead_curve();
    EXPECT_LT(std::abs(c.a1 - Complex(2.0, 2.0)), 1e-14);
    EXPECT_LT(std::abs(c.a2 - Complex(2.0, -6.0)), 1e-13);
    EXPECT_LT(std::abs(c.a3 - Complex(-12.0, 0.0)), 1e-12);
    EXPECT_TRUE(c.involution_symmetric);
    EXPECT_EQ(c.method, "polynomial");
    EXPECT_LT(substitution_residual(BivariatePolynomial::whitehead(), c), 1e-12);
}

TEST(PolynomialCurve, LinearMixedTermDoesNotVanishAtBase)
{
    // -l + l^2 + 4 l m + m^4 - l m^4 takes the value 8 at (-1, -1)
    BivariatePolynomial p;
    p.add(1, 0, -1.0).add(2, 0, 1.0).add(1, 1, 4.0).add(0, 4, 1.0).add(1, 4, -1.0);
    EXPECT_NEAR(std::abs(p(-1.0, -1.0)), 8.0, 1e-15);
    EXPECT_THROW(expand_from_polynomial(p, -1, -1, Complex(2.0, 2.0)), ValidationError);
}

TEST(PolynomialCurve, FigureEightBothBranches)
{
    const auto A = BivariatePolynomial::figure_eight();
    const auto up = expand_from_polynomial(A, -1, -1, Complex(0.0, 2.0 * sqrt3));
    EXPECT_LT(std::abs(up.a1 - Complex(0.0, 2.0 * sqrt3)), 1e-12);
    EXPECT_LT(std::abs(up.a2 - Complex(12.0, 2.0 * sqrt3)), 1e-11);
    EXPECT_LT(std::abs(up.a3 - Complex(36.0, -4.0 * sqrt3)), 1e-10);
    EXPECT_LT(substitution_residual(A, up), 1e-10);

    const auto down = expand_from_polynomial(A, -1, -1, Complex(0.0, -2.0 * sqrt3));
    EXPECT_LT(std::abs(down.a1 - std::conj(up.a1)), 1e-12);
    EXPECT_LT(std::abs(down.a2 - std::conj(up.a2)), 1e-11);
    EXPECT_LT(std::abs(down.a3 - std::conj(up.a3)), 1e-10);
}

TEST(PolynomialCurve, TruncationErrorIsFourthOrder)
{
    struct Case {
        BivariatePolynomial A;
        GeometricCurve c;
    };
    const auto f8 = BivariatePolynomial::figure_eight();
    for (const auto& [A, c] : {Case{BivariatePolynomial::whitehead(), whitehead_curve()},
                               Case{f8, expand_from_polynomial(f8, -1, -1, Complex(0.0, 3.5))}}) {
        const Complex dir = std::polar(1.0, 0.3);
        double prev = 0.0;
        for (double delta : {4e-3, 2e-3, 1e-3}) {
            const Complex d = delta * dir;
            const Complex exact = newton_l(A, -1.0 + d, series_value(c, d));
            const double err = std::abs(exact - series_value(c, d));
            EXPECT_LT(err, 1e3 * std::pow(delta, 4));
            if (prev > 0.0) {
                EXPECT_NEAR(prev / err, 16.0, 2.0);
            }
            prev = err;
        }
    }
}

TEST(PolynomialCurve, Errors)
{
    const auto W = BivariatePolynomial::whitehead();
    EXPECT_THROW(expand_from_polynomial(W, -1, -1, Complex(-5.0, 0.0)), BranchError);
    EXPECT_THROW(expand_from_polynomial(W, 2, -1, Complex(2.0, 2.0)), ValidationError);
    EXPECT_THROW(expand_from_polynomial(BivariatePolynomial{}, -1, -1, 1.0), ValidationError);
    // (l+1)^2 - (m+1)^3 has a cusp at the base
    BivariatePolynomial cusp;
    cusp.add(2, 0, 1.0).add(1, 0, 2.0).add(0, 0, 1.0);
    cusp.add(0, 3, -1.0).add(0, 2, -3.0).add(0, 1, -3.0).add(0, 0, -1.0);
    EXPECT_THROW(expand_from_polynomial(cusp, -1, -1, 1.0), BranchError);
    // m + 1: vertical tangent
    BivariatePolynomial vertical;
    vertical.add(0, 1, 1.0).add(0, 0, 1.0);
    EXPECT_THROW(expand_from_polynomial(vertical, -1, -1, 1.0), BranchError);
}

TEST(InvolutionDefect, Examples)
{
    GeometricCurve c;
    c.a1 = Complex(2.0, 2.0);
    c.a2 = Complex(2.0, -6.0);
    EXPECT_LT(std::abs(involution_defect(c)), 1e-15);
    c.a2 = 0.0;
    EXPECT_LT(std::abs(involution_defect(c) - Complex(-2.0, 6.0)), 1e-15);
    c.a1 = Complex(0.0, 2.0 * sqrt3);
    c.a2 = Complex(12.0, 2.0 * sqrt3);
    EXPECT_LT(std::abs(involution_defect(c)), 1e-13);
}

TEST(SampledCurve, RecoversSyntheticCurve)
{
    // exact curve l = -1 + a1 D + a2/2 D^2 + a3/6 D^3 + D^4 under m = -1 + s + 0.3 s^2
    const Complex a1{1.0, 3.0}, a2{-2.0, 1.0}, a3{4.0, -0.5};
    CurveSampler f = [=](Complex s) {
        const Complex d = s + 0.3 * s * s;
        return std::pair{-1.0 + d, -1.0 + a1 * d + a2 / 2.0 * d * d + a3 / 6.0 * d * d * d + d * d * d * d};
    };
    const auto c = expand_from_samples(f, -1, -1);
    EXPECT_LT(std::abs(c.a1 - a1), 1e-9);
    EXPECT_LT(std::abs(c.a2 - a2), 1e-8);
    EXPECT_LT(std::abs(c.a3 - a3), 1e-7);
    EXPECT_EQ(c.method, "sampled");
}

TEST(SampledCurve, InvariantUnderReparameterization)
{
    const Complex a1{2.0, 2.0}, a2{2.0, -6.0}, a3{-12.0, 0.0};
    auto curve = [=](Complex d) {
        return std::pair{-1.0 + d, -1.0 + a1 * d + a2 / 2.0 * d * d + a3 / 6.0 * d * d * d};
    };
    const Complex scale = std::polar(1.3, 0.2);
    const auto c1 = expand_from_samples([&](Complex s) { return curve(s); }, -1, -1);
    const auto c2 = expand_from_samples([&](Complex s) { return curve(2.0 * s); }, -1, -1);
    const auto c3 = expand_from_samples([&](Complex s) { return curve(scale * s); }, -1, -1);
    for (const auto& c : {c2, c3}) {
        EXPECT_LT(std::abs(c.a1 - c1.a1), 1e-9);
        EXPECT_LT(std::abs(c.a2 - c1.a2), 1e-8);
        EXPECT_LT(std::abs(c.a3 - c1.a3), 1e-7);
    }
}

TEST(SampledCurve, UnfilledVarietyMatchesPolynomial)
{
    const auto sampled = filled_curve(std::nullopt);
    const auto exact = whitehead_curve();
    EXPECT_LT(std::abs(sampled.a1 - exact.a1), 1e-6);
    EXPECT_LT(std::abs(sampled.a2 - exact.a2), 1e-6);
    EXPECT_LT(std::abs(sampled.a3 - exact.a3), 1e-6);
    EXPECT_TRUE(sampled.involution_symmetric);
}

TEST(SampledCurve, DegenerateParameterization)
{
    CurveSampler f = [](Complex s) { return std::pair{-1.0 + s * s, -1.0 + s}; };
    EXPECT_THROW(expand_from_samples(f, -1, -1), DomainError);
    CurveSampler off = [](Complex s) { return std::pair{-0.5 + s, -1.0 + s}; };
    EXPECT_THROW(expand_from_samples(off, -1, -1), ValidationError);
}

TEST(SampledCurve, NonSmoothSamplerIsRejected)
{
    // conj(s) feeds 1/h^2 into the cubic stencil coefficient
    CurveSampler f = [](Complex s) { return std::pair{-1.0 + s, -1.0 + s + std::conj(s)}; };
    EXPECT_THROW(expand_from_samples(f, -1, -1), ConvergenceError);
}

TEST(PolynomialJson, RoundTrip)
{
    for (const auto& p : {BivariatePolynomial::whitehead(), BivariatePolynomial::figure_eight()}) {
        const auto q = polynomial_from_json(nlohmann::json::parse(polynomial_to_json(p).dump()));
        EXPECT_EQ(q.terms(), p.terms());
    }
}

TEST(PolynomialJson, FixturesMatchBuiltins)
{
    const std::string dir = CONETUBE_DATA_DIR;
    EXPECT_EQ(load_polynomial(dir + "/whitehead.json").terms(), BivariatePolynomial::whitehead().terms());
    EXPECT_EQ(load_polynomial(dir + "/figure_eight.json").terms(),
              BivariatePolynomial::figure_eight().terms());
}

TEST(PolynomialJson, MalformedInput)
{
    EXPECT_THROW(polynomial_from_json(nlohmann::json::parse(R"({"terms": []})")), ValidationError);
    EXPECT_THROW(polynomial_from_json(nlohmann::json::parse(R"([1, 2])")), ValidationError);
    EXPECT_THROW(polynomial_from_json(nlohmann::json::parse(R"({"terms": [{"dl": 1.5, "dm": 0, "re": 1}]})")),
                 ValidationError);
    EXPECT_THROW(polynomial_from_json(nlohmann::json::parse(R"({"terms": [{"dl": -1, "dm": 0, "re": 1}]})")),
                 ValidationError);
    const std::string path = ::testing::TempDir() + "/bad_polynomial.json";
    std::ofstream(path) << "{\"terms\": [";
    EXPECT_THROW(load_polynomial(path), ValidationError);
    EXPECT_THROW(load_polynomial(path + ".missing"), ValidationError);
}
