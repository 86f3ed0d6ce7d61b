#include "rigidlab/potential.hpp"

#include "rigidlab/errors.hpp"

#include <cmath>

namespace rigidlab {

ScalarField trig_field(TrigPoly p, int axis) {
    return [p = std::move(p), axis](const Vec& x) { return p(x[axis]); };
}

ScalarField geometric_potential(const ExpandingMap& f) {
    return [f](const Vec& x) { return -f.log_abs_jacobian(x); };
}

ScalarField log_jacobian_field(const ExpandingMap& f) {
    return [f](const Vec& x) { return f.log_abs_jacobian(x); };
}

namespace {
void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in potential description");
    }
}
}  // namespace

ScalarField potential_from_json(const nlohmann::json& j, const ExpandingMap& f) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("potential description needs 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") {
        check_keys(j, {"kind"});
        return [](const Vec&) { return 0.0; };
    }
    if (kind == "constant") {
        check_keys(j, {"kind", "value"});
        const double v = j.at("value").get<double>();
        return [v](const Vec&) { return v; };
    }
    if (kind == "geometric") {
        check_keys(j, {"kind"});
        return geometric_potential(f);
    }
    if (kind == "trig") {
        check_keys(j, {"kind", "axis", "cos_coeffs", "sin_coeffs", "constant"});
        int axis = 0;
        if (j.contains("axis")) {
            const auto a = j.at("axis").get<std::string>();
            if (a == "x") axis = 0;
            else if (a == "y") axis = 1;
            else throw ConfigError("potential axis must be 'x' or 'y'");
        }
        if (axis >= f.dim()) throw ConfigError("potential axis exceeds map dimension");
        return trig_field(TrigPoly::from_json(j), axis);
    }
    if (kind == "sum") {
        check_keys(j, {"kind", "terms"});
        std::vector<ScalarField> terms;
        for (const auto& t : j.at("terms")) terms.push_back(potential_from_json(t, f));
        return [terms](const Vec& x) {
            double s = 0.0;
            for (const auto& t : terms) s += t(x);
            return s;
        };
    }
    throw ConfigError("unknown potential kind '" + kind + "'");
}

}  // namespace rigidlab
