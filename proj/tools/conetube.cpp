// Command-line front end: tables of a-coefficients, k-coefficients, tube
// measurements and convergence runs as JSON or CSV, plus the invariant suite.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "conetube/conetube.hpp"

namespace
{

using conetube::Complex;
using conetube::Slope;
using nlohmann::json;

using Cell = std::variant<std::monostate, std::string, long, double, Complex, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct Output {
    json doc = json::object();
    Table table;
    int exit_code = 0;
};

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json cell_json(const Cell& c)
{
    return std::visit(
        [](const auto& v) -> json {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::monostate>) return nullptr;
            else if constexpr (std::is_same_v<V, Complex>) return complex_json(v);
            else return v;
        },
        c);
}

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string to_csv(const Table& t)
{
    std::vector<bool> is_complex(t.columns.size(), false);
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size() && i < is_complex.size(); ++i) {
            if (std::holds_alternative<Complex>(row[i])) is_complex[i] = true;
        }
    }
    std::ostringstream os;
    std::vector<std::string> header;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (is_complex[i]) {
            header.push_back(t.columns[i] + "_re");
            header.push_back(t.columns[i] + "_im");
        }
        else {
            header.push_back(t.columns[i]);
        }
    }
    auto line = [&](const std::vector<std::string>& f) {
        for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << csv_field(f[i]);
        os << "\r\n";
    };
    line(header);
    for (const auto& row : t.rows) {
        std::vector<std::string> f;
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            const Cell& c = i < row.size() ? row[i] : Cell{};
            if (is_complex[i]) {
                if (auto z = std::get_if<Complex>(&c)) {
                    f.push_back(format_double(z->real()));
                    f.push_back(format_double(z->imag()));
                }
                else {
                    f.push_back("");
                    f.push_back("");
                }
                continue;
            }
            f.push_back(std::visit(
                [](const auto& v) -> std::string {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, std::monostate>) return "";
                    else if constexpr (std::is_same_v<V, std::string>) return v;
                    else if constexpr (std::is_same_v<V, bool>) return v ? "true" : "false";
                    else if constexpr (std::is_same_v<V, double>) return format_double(v);
                    else if constexpr (std::is_same_v<V, long>) return std::to_string(v);
                    else return "";
                },
                c));
        }
        line(f);
    }
    return os.str();
}

std::string to_json_text(const std::string& command, const Output& out)
{
    json doc = out.doc;
    doc["command"] = command;
    json rows = json::array();
    for (const auto& row : out.table.rows) {
        json r = json::object();
        for (std::size_t i = 0; i < out.table.columns.size() && i < row.size(); ++i) {
            r[out.table.columns[i]] = cell_json(row[i]);
        }
        rows.push_back(r);
    }
    doc["rows"] = rows;
    return doc.dump(2) + "\n";
}

json slope_json(const Slope& s) { return {{"p", s.p}, {"q", s.q}, {"r", s.r}, {"s", s.s}}; }

json curve_json(const conetube::GeometricCurve& c)
{
    return {{"m0", c.m0},
            {"l0", c.l0},
            {"a1", complex_json(c.a1)},
            {"a2", complex_json(c.a2)},
            {"a3", complex_json(c.a3)},
            {"involution_defect", std::abs(conetube::involution_defect(c))},
            {"method", c.method}};
}

struct Common {
    std::string format = "json";
    std::optional<double> tol;
    std::string output;
};

struct FirstCusp {
    std::optional<long> p1, q1;
    bool unfilled = false;

    std::optional<Slope> resolve() const
    {
        if (unfilled && (p1 || q1)) {
            throw conetube::ValidationError("--unfilled conflicts with --p1/--q1");
        }
        if (p1.has_value() != q1.has_value()) {
            throw conetube::ValidationError("--p1 and --q1 must be given together");
        }
        if (!p1) return std::nullopt;
        return Slope::make(*p1, *q1);
    }
};

void add_first_cusp(CLI::App* cmd, FirstCusp& fc)
{
    cmd->add_option("--p1", fc.p1, "First-cusp filling slope p");
    cmd->add_option("--q1", fc.q1, "First-cusp filling slope q");
    cmd->add_flag("--unfilled", fc.unfilled, "Leave the first cusp complete (default)");
}

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--tol", c.tol,
                    "Identity tolerance (default 1e-12; falls back to CONETUBE_TOL)");
    cmd->add_option("--output", c.output, "Write output to this file instead of stdout");
}

conetube::Tolerances resolve_tolerances(const Common& c)
{
    conetube::Tolerances tol;
    std::optional<double> value = c.tol;
    if (!value) {
        if (const char* env = std::getenv("CONETUBE_TOL")) {
            char* end = nullptr;
            const double v = std::strtod(env, &end);
            if (end == env || *end != '\0') {
                throw conetube::ValidationError("CONETUBE_TOL is not a number");
            }
            value = v;
        }
    }
    if (value) {
        if (!(*value > 0.0) || !std::isfinite(*value)) {
            throw conetube::ValidationError("tolerance must be positive and finite");
        }
        tol.identity = *value;
    }
    return tol;
}

std::string slope_label(const std::optional<Slope>& s)
{
    return s ? "(" + std::to_string(s->p) + "," + std::to_string(s->q) + ")" : "unfilled";
}

conetube::GeometricCurve first_cusp_curve(const std::optional<Slope>& s1)
{
    return s1 ? conetube::filled_curve(s1) : conetube::whitehead_curve();
}

Output cmd_base(const conetube::Tolerances& tol)
{
    using namespace conetube;
    Output out;
    const TetShapes z = base_shapes();
    const auto res = gluing_residual(z);
    const auto eig = cusp_eigenvalues(z);
    const auto rep = build_representation(base_x, base_y);
    const auto rel = group_relation_residuals(rep);

    json zs = json::array();
    for (Complex v : {z.z1, z.z2, z.z3, z.z4}) zs.push_back(complex_json(v));
    auto mat = [](const MobiusMatrix& m) {
        return json::array({json::array({complex_json(m.a), complex_json(m.b)}),
                            json::array({complex_json(m.c), complex_json(m.d)})});
    };
    const double worst = std::max({std::abs(res[0]), std::abs(res[1]), rel[0], rel[1]});
    out.doc["z"] = zs;
    out.doc["residuals"] = json::array({complex_json(res[0]), complex_json(res[1])});
    out.doc["eigenvalues"] = {{"m1", complex_json(eig.m1)},
                              {"l1", complex_json(eig.l1)},
                              {"m2", complex_json(eig.m2)},
                              {"l2", complex_json(eig.l2)}};
    out.doc["holonomy"] = {{"x", complex_json(rep.x)}, {"y", complex_json(rep.y)},
                           {"w", complex_json(rep.w)}, {"z", complex_json(rep.z)},
                           {"A", mat(rep.A)},         {"B", mat(rep.B)},
                           {"C", mat(rep.C)}};
    out.doc["group_relation_residuals"] = {rel[0], rel[1]};
    out.doc["tol"] = tol.identity;
    out.doc["within_tol"] = worst <= tol.identity;

    out.table.columns = {"quantity", "value"};
    auto row = [&](std::string name, Cell v) { out.table.rows.push_back({std::move(name), v}); };
    row("z1", z.z1);
    row("z2", z.z2);
    row("z3", z.z3);
    row("z4", z.z4);
    row("gluing_residual_1", res[0]);
    row("gluing_residual_2", res[1]);
    row("m1", eig.m1);
    row("l1", eig.l1);
    row("m2", eig.m2);
    row("l2", eig.l2);
    for (auto [name, m] : {std::pair{"A", rep.A}, std::pair{"B", rep.B}, std::pair{"C", rep.C}}) {
        row(std::string(name) + "11", m.a);
        row(std::string(name) + "12", m.b);
        row(std::string(name) + "21", m.c);
        row(std::string(name) + "22", m.d);
    }
    row("group_relation_1", Complex(rel[0]));
    row("group_relation_2", Complex(rel[1]));
    return out;
}

struct PolynomialArgs {
    std::string path;
    double hint_re = 2.0, hint_im = 2.0;
    int m0 = -1, l0 = -1;
};

Output cmd_acoeffs(const std::optional<Slope>& s1, const PolynomialArgs& poly)
{
    using namespace conetube;
    Output out;
    GeometricCurve c;
    double residual = 0.0;
    bool has_residual = false;
    if (!poly.path.empty()) {
        const auto A = load_polynomial(poly.path);
        c = expand_from_polynomial(A, poly.m0, poly.l0, Complex{poly.hint_re, poly.hint_im});
        residual = substitution_residual(A, c);
        has_residual = true;
    }
    else if (!s1) {
        c = whitehead_curve();
        residual = substitution_residual(BivariatePolynomial::whitehead(), c);
        has_residual = true;
    }
    else {
        c = filled_curve(s1);
    }
    out.doc["slope1"] = s1 ? slope_json(*s1) : json("unfilled");
    out.doc["curve"] = curve_json(c);
    if (has_residual) out.doc["substitution_residual"] = residual;

    out.table.columns = {"slope1", "a1", "a2", "a3", "involution_defect", "method", "substitution_residual"};
    out.table.rows.push_back({slope_label(s1), c.a1, c.a2, c.a3, std::abs(involution_defect(c)),
                              c.method, has_residual ? Cell(residual) : Cell{}});
    return out;
}

Output cmd_kcoeffs(const std::optional<Slope>& s1, const Slope& s2)
{
    using namespace conetube;
    Output out;
    const auto curve = first_cusp_curve(s1);
    const auto jet = k_expansion_closed_form(curve, s2, s1 ? 1e-6 : 1e-9);
    std::optional<KExpansion> formula;
    if (!s1) formula = whitehead_k_formula(s2);
    const bool agree = formula && std::abs(formula->k0 - jet.k0) < 1e-8 &&
                       std::abs(formula->k1 - jet.k1) < 1e-8;

    out.doc["slope1"] = s1 ? slope_json(*s1) : json("unfilled");
    out.doc["slope2"] = slope_json(s2);
    out.doc["numeric_jet"] = {{"k0", jet.k0}, {"k1", jet.k1}};
    out.doc["closed_form"] = formula ? json{{"k0", formula->k0}, {"k1", formula->k1}} : json(nullptr);
    out.doc["agree"] = formula ? json(agree) : json(nullptr);

    out.table.columns = {"slope1", "p2", "q2", "r2", "s2", "source", "k0", "k1"};
    out.table.rows.push_back({slope_label(s1), s2.p, s2.q, s2.r, s2.s, jet.source, jet.k0, jet.k1});
    if (formula) {
        out.table.rows.push_back(
            {slope_label(s1), s2.p, s2.q, s2.r, s2.s, formula->source, formula->k0, formula->k1});
    }
    return out;
}

Output cmd_k1scan(const std::optional<Slope>& s1, int max_sum, long samples)
{
    using namespace conetube;
    if (max_sum < 1) throw ValidationError("--max must be at least 1");
    Output out;
    const auto curve = first_cusp_curve(s1);
    const double lo = -1.0 / 6.0 - 1e-9, hi = -1.0 / 12.0 + 1e-9;
    out.table.columns = {"p2", "q2", "k0", "k1", "in_range", "mu_hat_decreasing", "sum_increasing"};
    long in_range = 0, count = 0;
    for (const auto& s2 : coprime_slopes(max_sum)) {
        const auto k = k_expansion_closed_form(curve, s2, s1 ? 1e-6 : 1e-9);
        const bool ok = k.k1 >= lo && k.k1 <= hi;
        const auto m = monotonicity_from_k1(s2, k.k1);
        in_range += ok;
        ++count;
        out.table.rows.push_back({s2.p, s2.q, k.k0, k.k1, ok, m.mu_hat_decreasing, m.sum_increasing});
    }
    out.doc["slope1"] = s1 ? slope_json(*s1) : json("unfilled");
    out.doc["interval"] = {lo, hi};
    out.doc["in_range"] = in_range;
    out.doc["count"] = count;
    if (!s1) {
        const auto r = k1_range_check(samples);
        out.doc["range_check"] = {{"min", r.min}, {"max", r.max}, {"samples", samples}};
    }
    return out;
}

Output cmd_converge(const std::vector<long>& ns, long q1, bool serial)
{
    using namespace conetube;
    std::vector<std::optional<Slope>> slopes;
    for (long n : ns) slopes.push_back(Slope::make(n, q1));
    slopes.push_back(std::nullopt);
    const auto rows = convergence_table(slopes, {}, {}, !serial);
    Output out;
    out.table.columns = {"p1", "q1", "a1", "a2", "a3", "err_a1", "err_a2", "err_a3",
                         "involution_defect", "ok", "error"};
    bool all_ok = true;
    for (const auto& r : rows) {
        std::vector<Cell> row;
        row.push_back(r.slope1 ? Cell(r.slope1->p) : Cell{});
        row.push_back(r.slope1 ? Cell(r.slope1->q) : Cell{});
        if (r.ok) {
            for (Complex a : {r.curve.a1, r.curve.a2, r.curve.a3}) row.push_back(a);
            for (double e : r.errors) row.push_back(e);
            row.push_back(r.involution_defect);
        }
        else {
            row.insert(row.end(), 7, Cell{});
        }
        row.push_back(r.ok);
        row.push_back(r.error);
        all_ok = all_ok && r.ok;
        out.table.rows.push_back(row);
    }
    out.doc["limit"] = curve_json(whitehead_curve());
    out.exit_code = all_ok ? 0 : 2;
    return out;
}

Output cmd_tube(const std::optional<Slope>& s1, const Slope& s2, const std::vector<double>& thetas)
{
    using namespace conetube;
    Output out;
    out.table.columns = {"theta", "R", "t", "mu", "mu_hat_sq", "cosh2R", "area_identity_residual",
                         "radius_from_axes"};
    for (double th : thetas) {
        const auto cs = solve_cone_structure(s1, s2, th);
        const auto m = measure_tube(cs, s2);
        const double axes = tube_radius_from_axes(representation_of(cs));
        out.table.rows.push_back({m.theta, m.R, m.t, m.mu, m.mu_hat_sq, m.cosh2R,
                                  m.area_identity_residual(), axes});
    }
    out.doc["slope1"] = s1 ? slope_json(*s1) : json("unfilled");
    out.doc["slope2"] = slope_json(s2);
    return out;
}

Output cmd_verify(const conetube::Tolerances& tol, std::uint64_t seed, int samples)
{
    using namespace conetube;
    SuiteOptions opt;
    opt.tol = tol;
    opt.seed = seed;
    opt.samples = samples;
    const auto report = run_structural_suite(opt);
    Output out;
    out.table.columns = {"check", "passed", "worst", "threshold", "samples", "detail"};
    for (const auto& c : report.checks) {
        out.table.rows.push_back({c.name, c.passed, c.worst, c.threshold, c.samples, c.detail});
    }
    out.doc["passed"] = report.passed_count();
    out.doc["total"] = static_cast<long>(report.checks.size());
    out.doc["all_passed"] = report.all_passed();
    out.exit_code = report.all_passed() ? 0 : 2;
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cone-manifold deformations of the Whitehead link complement"};
    app.require_subcommand(1);

    Common common;
    FirstCusp fc;
    long p2 = 1, q2 = 0;
    auto add_second = [&](CLI::App* cmd) {
        cmd->add_option("--p2", p2, "Second-cusp slope p")->capture_default_str();
        cmd->add_option("--q2", q2, "Second-cusp slope q")->capture_default_str();
    };

    auto* base = app.add_subcommand("base", "Complete structure: shapes, holonomy, eigenvalues");
    add_common(base, common);

    PolynomialArgs poly;
    auto* acoeffs = app.add_subcommand("acoeffs", "Geometric-curve coefficients a1, a2, a3");
    add_common(acoeffs, common);
    add_first_cusp(acoeffs, fc);
    acoeffs->add_option("--polynomial", poly.path, "A-polynomial JSON file to expand instead");
    acoeffs->add_option("--hint-re", poly.hint_re, "Slope hint, real part")->capture_default_str();
    acoeffs->add_option("--hint-im", poly.hint_im, "Slope hint, imaginary part")->capture_default_str();
    acoeffs->add_option("--m0", poly.m0, "Base meridian eigenvalue (+-1)")->capture_default_str();
    acoeffs->add_option("--l0", poly.l0, "Base longitude eigenvalue (+-1)")->capture_default_str();

    auto* kcoeffs = app.add_subcommand("kcoeffs", "k0, k1 of mu_hat^2 = k0 + k1 theta^2");
    add_common(kcoeffs, common);
    add_first_cusp(kcoeffs, fc);
    add_second(kcoeffs);

    int max_sum = 10;
    long samples = 1000000;
    auto* k1scan = app.add_subcommand("k1scan", "k1 over coprime (p2, q2) with |p2| + |q2| <= max");
    add_common(k1scan, common);
    add_first_cusp(k1scan, fc);
    k1scan->add_option("--max", max_sum, "Largest |p2| + |q2|")->capture_default_str();
    k1scan->add_option("--samples", samples, "Grid size of the range check")->capture_default_str();

    std::vector<long> ns{8, 16, 32, 64};
    long q1_family = 1;
    bool serial = false;
    auto* converge = app.add_subcommand("converge", "a-coefficients of fillings (n, q1) against the limit");
    add_common(converge, common);
    converge->add_option("--n", ns, "Values of p1")->delimiter(',')->capture_default_str();
    converge->add_option("--q1", q1_family, "q1 of the family")->capture_default_str();
    converge->add_flag("--serial", serial, "Compute rows one after another");

    std::vector<double> thetas{0.1};
    auto* tube = app.add_subcommand("tube", "Tube measurement at given cone angles");
    add_common(tube, common);
    add_first_cusp(tube, fc);
    add_second(tube);
    tube->add_option("--theta", thetas, "Cone angle(s), radians")->delimiter(',')->capture_default_str();

    std::uint64_t seed = 20240917;
    int verify_samples = 100;
    auto* verify = app.add_subcommand("verify", "Structural invariant suite");
    add_common(verify, common);
    verify->add_option("--seed", seed, "Random seed")->capture_default_str();
    verify->add_option("--samples", verify_samples, "Points per check")->capture_default_str();

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    Output out;
    try {
        const auto tol = resolve_tolerances(common);
        if (cmd == base) out = cmd_base(tol);
        else if (cmd == acoeffs) out = cmd_acoeffs(fc.resolve(), poly);
        else if (cmd == kcoeffs) out = cmd_kcoeffs(fc.resolve(), Slope::make(p2, q2));
        else if (cmd == k1scan) out = cmd_k1scan(fc.resolve(), max_sum, samples);
        else if (cmd == converge) out = cmd_converge(ns, q1_family, serial);
        else if (cmd == tube) out = cmd_tube(fc.resolve(), Slope::make(p2, q2), thetas);
        else if (cmd == verify) out = cmd_verify(tol, seed, verify_samples);
    }
    catch (const conetube::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    catch (const conetube::ComputationError& e) {
        std::cerr << "computation failed: " << e.what() << "\n";
        return 2;
    }

    const std::string text = common.format == "csv" ? to_csv(out.table) : to_json_text(name, out);
    if (common.output.empty()) {
        std::cout << text;
    }
    else {
        std::ofstream f(common.output, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write " << common.output << "\n";
            return 3;
        }
        f << text;
    }
    return out.exit_code;
}
