#pragma once

// Structural invariant suite: gluing residuals, group relations, the
// commutator-trace identity and the cusp trace relations at seeded random
// points near the complete structure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "conetube/gluing_variety.hpp"
#include "conetube/holonomy.hpp"

namespace conetube
{

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;
    double threshold = 0.0;
    long samples = 0;
    std::string detail;
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    bool all_passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    }
    long passed_count() const
    {
        return std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    }
};

struct SuiteOptions {
    Tolerances tol = default_tolerances();
    std::uint64_t seed = 20240917;
    int samples = 100;
    /** Chart points are drawn with each coordinate in a disc of this radius */
    double chart_radius = 0.3;
    /** (x, y) are drawn in discs of this radius around (-1, 2i) */
    double holonomy_radius = 0.2;
    /** Excluded disc around the complete structure, where the relations are singular */
    double min_offset = 0.01;
};

namespace detail
{

inline Complex random_in_disc(std::mt19937_64& rng, double rmin, double rmax)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = std::sqrt(rmin * rmin + (rmax * rmax - rmin * rmin) * u(rng));
    return std::polar(r, 2.0 * Pi * u(rng));
}

class CheckAccumulator
{
public:
    CheckAccumulator(std::string name, double threshold)
    {
        r_.name = std::move(name);
        r_.threshold = threshold;
    }

    void add(double value)
    {
        ++r_.samples;
        if (!(value <= r_.worst) || !std::isfinite(value)) r_.worst = value;
    }
    void fail(const std::string& why)
    {
        ++r_.samples;
        failed_ = true;
        if (r_.detail.empty()) r_.detail = why;
    }
    CheckResult done()
    {
        r_.passed = !failed_ && std::isfinite(r_.worst) && r_.worst < r_.threshold;
        return r_;
    }

private:
    CheckResult r_;
    bool failed_ = false;
};

}  // namespace detail

inline VerificationReport run_structural_suite(const SuiteOptions& opt = {})
{
    std::mt19937_64 rng(opt.seed);
    const double eps = opt.tol.identity;
    VerificationReport report;

    detail::CheckAccumulator gluing("gluing residual on chart points", eps);
    detail::CheckAccumulator forms("alternate eigenvalue forms agree", eps);
    detail::CheckAccumulator cusp("cusp trace relations on variety points", 1000.0 * eps);
    for (int i = 0; i < opt.samples; ++i) {
        const Complex u = base_shape + detail::random_in_disc(rng, 0.0, opt.chart_radius);
        const Complex v = base_shape + detail::random_in_disc(rng, opt.min_offset, opt.chart_radius);
        try {
            const auto vp = evaluate_chart({u, v});
            gluing.add(gluing_residual_norm(vp.shapes));
            forms.add(vp.forms.disagreement());
            const auto& e = vp.eigenvalues();
            const auto r = cusp_relation_residuals(e.m1, e.l1, e.m2, e.l2, opt.tol);
            cusp.add(std::max(std::abs(r[0]), std::abs(r[1])));
        }
        catch (const Error& err) {
            gluing.fail(err.what());
            forms.fail(err.what());
            cusp.fail(err.what());
        }
    }

    detail::CheckAccumulator relations("holonomy group relations", 10.0 * eps);
    detail::CheckAccumulator dets("determinants of generators and peripheral words", eps);
    detail::CheckAccumulator comm("commutator trace identity", 100.0 * eps);
    detail::CheckAccumulator l2diag("longitude diagonal matches l2", 100.0 * eps);
    for (int i = 0; i < opt.samples; ++i) {
        const Complex x = base_x + detail::random_in_disc(rng, opt.min_offset, opt.holonomy_radius);
        const Complex y = base_y + detail::random_in_disc(rng, 0.0, opt.holonomy_radius);
        try {
            const auto rep = build_representation(x, y);
            const auto g = group_relation_residuals(rep);
            relations.add(std::max(g[0], g[1]));
            const auto P = peripheral_matrices(rep);
            double worst_det = 0.0;
            for (const auto& M : {rep.A, rep.B, rep.C, P.M1, P.L1, P.M2, P.L2}) {
                worst_det = std::max(worst_det, std::abs(M.det() - 1.0));
            }
            dets.add(worst_det);
            const Complex tc = commutator_trace_minus2(x, y);
            const Complex from_matrices = (rep.A * rep.C * rep.A.inverse() * rep.C.inverse()).trace() - 2.0;
            const Complex l2 = l2_eigenvalue(x, y);
            comm.add(std::max(std::abs(tc - from_matrices),
                              std::abs(tc - commutator_trace_from_eigenvalues(x, l2))));
            l2diag.add(std::max({std::abs(P.L2.a - l2), std::abs(P.L2.d - 1.0 / l2), std::abs(P.L2.c)}));
        }
        catch (const Error& err) {
            relations.fail(err.what());
            dets.fail(err.what());
            comm.fail(err.what());
            l2diag.fail(err.what());
        }
    }

    for (auto* c : {&gluing, &forms, &relations, &dets, &comm, &l2diag, &cusp}) {
        report.checks.push_back(c->done());
    }
    return report;
}

}  // namespace conetube
