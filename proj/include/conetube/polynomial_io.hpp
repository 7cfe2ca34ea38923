#pragma once

// JSON term format for A-polynomials:
// {"terms": [{"dl": 1, "dm": 0, "re": -1.0, "im": 0.0}, ...]}

#include <fstream>
#include <string>

#include "json.hpp"

#include "conetube/geometric_curve.hpp"

namespace conetube
{

inline BivariatePolynomial polynomial_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array()) {
        throw ValidationError("polynomial JSON must be an object with a \"terms\" array");
    }
    BivariatePolynomial p;
    for (const auto& t : j["terms"]) {
        if (!t.is_object() || !t.contains("dl") || !t.contains("dm") || !t.contains("re")) {
            throw ValidationError("polynomial term needs dl, dm and re");
        }
        if (!t["dl"].is_number_integer() || !t["dm"].is_number_integer()) {
            throw ValidationError("polynomial degrees must be integers");
        }
        const double im = t.contains("im") ? t["im"].get<double>() : 0.0;
        p.add(t["dl"].get<int>(), t["dm"].get<int>(), Complex{t["re"].get<double>(), im});
    }
    if (p.empty()) throw ValidationError("polynomial has no terms");
    return p;
}

inline nlohmann::json polynomial_to_json(const BivariatePolynomial& p)
{
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [k, c] : p.terms()) {
        terms.push_back({{"dl", k.first}, {"dm", k.second}, {"re", c.real()}, {"im", c.imag()}});
    }
    return {{"terms", terms}};
}

inline BivariatePolynomial load_polynomial(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open polynomial file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    }
    catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed polynomial JSON: ") + e.what());
    }
    return polynomial_from_json(j);
}

}  // namespace conetube
