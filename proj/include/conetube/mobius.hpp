#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include "conetube/complex_jets.hpp"

namespace conetube
{

/** @brief A point of the Riemann sphere: a finite complex value or infinity */
struct ExtendedComplex {
    Complex value{0.0, 0.0};
    bool infinite = false;

    ExtendedComplex() = default;
    ExtendedComplex(Complex z) : value{z} {}
    ExtendedComplex(double x) : value{x, 0.0} {}

    static ExtendedComplex infinity()
    {
        ExtendedComplex w;
        w.infinite = true;
        return w;
    }

    friend bool operator==(const ExtendedComplex& a, const ExtendedComplex& b)
    {
        if (a.infinite || b.infinite) return a.infinite == b.infinite;
        return a.value == b.value;
    }
};

/** @brief 2x2 complex matrix, used as an element of SL(2,C) */
struct MobiusMatrix {
    Complex a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};

    static MobiusMatrix identity() { return {}; }

    Complex det() const { return a * d - b * c; }
    Complex trace() const { return a + d; }

    /** @brief Inverse, assuming det = 1 */
    MobiusMatrix inverse() const { return {d, -b, -c, a}; }

    /** @brief Action z -> (a z + b)/(c z + d) on the Riemann sphere */
    ExtendedComplex apply(const ExtendedComplex& w) const
    {
        if (w.infinite) {
            if (c == Complex{0.0, 0.0}) return ExtendedComplex::infinity();
            return ExtendedComplex(a / c);
        }
        Complex den = c * w.value + d;
        if (den == Complex{0.0, 0.0}) return ExtendedComplex::infinity();
        return ExtendedComplex((a * w.value + b) / den);
    }

    /** @brief Integer power; negative exponents use the SL(2) inverse */
    MobiusMatrix pow(int n) const
    {
        MobiusMatrix base = n < 0 ? inverse() : *this;
        MobiusMatrix result = identity();
        for (int k = std::abs(n); k > 0; --k) result = result * base;
        return result;
    }

    /** @brief Largest entrywise modulus of the difference */
    double distance(const MobiusMatrix& o) const
    {
        return std::max({std::abs(a - o.a), std::abs(b - o.b), std::abs(c - o.c),
                         std::abs(d - o.d)});
    }

    friend MobiusMatrix operator*(const MobiusMatrix& x, const MobiusMatrix& y)
    {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
                x.c * y.b + x.d * y.d};
    }

    friend std::ostream& operator<<(std::ostream& os, const MobiusMatrix& m)
    {
        return os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
    }
};

}  // namespace conetube
