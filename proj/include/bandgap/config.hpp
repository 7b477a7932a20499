#pragma once

// Experiment configuration: strict JSON parsing with explicit defaults.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bandgap/error.hpp"

namespace bandgap {

enum class Experiment { bands, convergence, limit2d, figure3, certificate, curvature, isoperimetric, minmax_selftest };
enum class GeometryKind { dumbbell, cylinder_linked, flat_cylinder, conformal };
enum class OutputFormat { csv, json };

inline constexpr std::pair<Experiment, std::string_view> experiment_names[] = {
    {Experiment::bands, "bands"},           {Experiment::convergence, "convergence"},
    {Experiment::limit2d, "limit2d"},       {Experiment::figure3, "figure3"},
    {Experiment::certificate, "certificate"}, {Experiment::curvature, "curvature"},
    {Experiment::isoperimetric, "isoperimetric"}, {Experiment::minmax_selftest, "minmax-selftest"},
};

inline constexpr std::pair<GeometryKind, std::string_view> geometry_names[] = {
    {GeometryKind::dumbbell, "dumbbell"},
    {GeometryKind::cylinder_linked, "cylinder-linked"},
    {GeometryKind::flat_cylinder, "flat-cylinder"},
    {GeometryKind::conformal, "conformal"},
};

template <typename E, std::size_t N>
std::string_view enum_name(E value, const std::pair<E, std::string_view> (&table)[N]) {
    for (const auto& [v, name] : table)
        if (v == value) return name;
    return "?";
}

inline std::string_view to_string(Experiment e) { return enum_name(e, experiment_names); }
inline std::string_view to_string(GeometryKind g) { return enum_name(g, geometry_names); }
inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

inline std::optional<Experiment> parse_experiment(std::string_view name) {
    for (const auto& [v, n] : experiment_names)
        if (n == name) return v;
    return std::nullopt;
}

struct ExperimentConfig {
    Experiment experiment = Experiment::bands;

    std::optional<GeometryKind> geometry;
    std::optional<int> d;
    std::optional<double> epsilon;
    std::vector<double> epsilons;
    std::optional<double> L, r, a, b;

    int T = 33;
    int k_max = 8;
    double lambda_max = 40.0;
    std::optional<int> m;  ///< gap count asked of the certificate
    double nu = 2.0;
    std::uint64_t seed = 1;
    int instances = 200;

    std::optional<double> h_body;
    double collar_factor = 16.0;

    std::optional<std::string> path;  ///< output directory
    OutputFormat format = OutputFormat::csv;
    int precision = 12;

    bool operator==(const ExperimentConfig&) const = default;

    /// epsilons if given, else the single epsilon.
    std::vector<double> epsilon_list() const {
        if (!epsilons.empty()) return epsilons;
        if (epsilon) return {*epsilon};
        return {};
    }
};

namespace detail {

using nlohmann::json;

class ConfigReader {
public:
    explicit ConfigReader(const json& doc) : doc_(doc) {}

    template <typename T>
    std::optional<T> get(const std::string& key) {
        return get_at<T>(doc_, key, key);
    }

    template <typename T>
    std::optional<T> get_at(const json& obj, const std::string& key, const std::string& path) {
        if (!obj.contains(key)) return std::nullopt;
        const json& v = obj.at(key);
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) fail(path, "expected a number");
            return v.get<double>();
        } else if constexpr (std::is_same_v<T, int>) {
            if (!v.is_number_integer()) fail(path, "expected an integer");
            const auto x = v.get<long long>();
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(path, "out of range");
            return static_cast<int>(x);
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
                fail(path, "expected a nonnegative integer");
            return v.get<std::uint64_t>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) fail(path, "expected a string");
            return v.get<std::string>();
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
            if (!v.is_array()) fail(path, "expected an array of numbers");
            std::vector<double> out;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!v[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
                out.push_back(v[i].get<double>());
            }
            return out;
        }
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& message) {
        throw ConfigError("config field '" + path + "': " + message);
    }

private:
    const json& doc_;
};

inline void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& prefix) {
    for (const auto& [key, value] : obj.items())
        if (!known.contains(key)) throw ConfigError("config field '" + prefix + key + "': unknown field");
}

} // namespace detail

/// Validates ranges and completeness; throws ConfigError naming the field.
inline void validate(const ExperimentConfig& c) {
    using detail::ConfigReader;
    auto range = [](bool ok, const std::string& field, const std::string& rule) {
        if (!ok) ConfigReader::fail(field, rule);
    };
    std::vector<std::string> missing;
    auto need = [&](bool present, const char* field) {
        if (!present) missing.push_back(field);
    };
    auto finish_missing = [&] {
        if (missing.empty()) return;
        std::string list;
        for (const auto& f : missing) list += (list.empty() ? "" : ", ") + f;
        throw ConfigError("missing required field(s) for experiment '" + std::string(to_string(c.experiment)) +
                          "': " + list);
    };

    range(c.T >= 2, "T", "must be >= 2");
    range(c.k_max >= 1, "k_max", "must be >= 1");
    range(c.lambda_max > 0.0, "lambda_max", "must be > 0");
    range(c.collar_factor >= 16.0, "mesh.collar_factor", "must be >= 16");
    range(!c.h_body || *c.h_body > 0.0, "mesh.h_body", "must be > 0");
    range(c.precision >= 1 && c.precision <= 17, "output.precision", "must lie in [1, 17]");
    range(c.instances >= 1, "instances", "must be >= 1");
    range(c.nu > 1.0, "nu", "must be > 1");
    if (c.d) range(*c.d >= 2, "d", "must be >= 2");

    const bool geometric = c.experiment == Experiment::bands || c.experiment == Experiment::convergence ||
                           c.experiment == Experiment::curvature || c.experiment == Experiment::isoperimetric;
    const bool planar = c.experiment == Experiment::limit2d || c.experiment == Experiment::figure3 ||
                        c.experiment == Experiment::certificate;

    if (planar) {
        need(c.L.has_value(), "L");
        need(c.r.has_value(), "r");
        if (c.experiment == Experiment::certificate) need(c.m.has_value(), "m");
        finish_missing();
        if (c.experiment == Experiment::certificate) {
            range(*c.L > 0.0, "L", "must be > 0");
            range(*c.m >= 1, "m", "must be >= 1");
        } else {
            range(*c.L > 0.0 && *c.L < 1.0, "L", "must lie in (0, 1)");
            range(c.T >= 9, "T", "must be >= 9");
        }
        range(*c.r > 0.0, "r", "must be > 0");
        return;
    }
    if (!geometric) return;

    need(c.geometry.has_value(), "geometry");
    need(c.d.has_value(), "d");
    const bool family = c.experiment == Experiment::convergence;
    if (family)
        need(!c.epsilons.empty(), "epsilons");
    else if (c.geometry != GeometryKind::flat_cylinder)
        need(c.epsilon.has_value() || !c.epsilons.empty(), "epsilon");
    if (c.geometry == GeometryKind::cylinder_linked) need(c.L.has_value(), "L");
    if (c.geometry == GeometryKind::flat_cylinder) {
        need(c.r.has_value(), "r");
        need(c.L.has_value(), "L");
    }
    if (c.geometry == GeometryKind::conformal) {
        need(c.r.has_value(), "r");
        need(c.a.has_value(), "a");
        need(c.b.has_value(), "b");
    }
    finish_missing();

    const auto g = *c.geometry;
    const int d = *c.d;
    if (family) {
        range(c.epsilons.size() >= 2, "epsilons", "needs at least 2 values");
        range(g != GeometryKind::flat_cylinder, "geometry", "convergence needs a shrinking family, not flat-cylinder");
        if (g == GeometryKind::conformal) range(d >= 3, "d", "conformal convergence has a product limit only for d >= 3");
        for (std::size_t i = 0; i + 1 < c.epsilons.size(); ++i)
            range(c.epsilons[i + 1] < c.epsilons[i], "epsilons", "must be strictly descending");
    }
    if (c.experiment == Experiment::isoperimetric)
        range(g != GeometryKind::conformal, "geometry", "isoperimetric bound needs a profile cell");

    std::vector<double> eps = c.epsilon_list();
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const std::string field = c.epsilons.empty() ? "epsilon" : "epsilons[" + std::to_string(i) + "]";
        const double e = eps[i];
        switch (g) {
        case GeometryKind::dumbbell:
        case GeometryKind::cylinder_linked:
            range(e > 0.0 && e < 0.25, field, "must lie in (0, 0.25)");
            break;
        case GeometryKind::conformal:
            range(e > 0.0 && e <= 1.0, field, "must lie in (0, 1]");
            break;
        case GeometryKind::flat_cylinder:
            break;
        }
    }
    if (g == GeometryKind::cylinder_linked) range(*c.L >= 0.0, "L", "must be >= 0");
    if (g == GeometryKind::flat_cylinder) {
        range(*c.r > 0.0, "r", "must be > 0");
        range(*c.L > 0.0, "L", "must be > 0 (cell length)");
    }
    if (g == GeometryKind::conformal) {
        range(*c.r > 0.0, "r", "must be > 0");
        range(*c.a > 0.0 && *c.a < *c.b && *c.b < 1.0, "a", "need 0 < a < b < 1");
        for (double e : eps)
            if (e < 1.0) range(std::pow(e, d) < std::min(*c.a, 1.0 - *c.b), c.epsilons.empty() ? "epsilon" : "epsilons",
                  "transition zone eps^d must be < min(a, 1 - b)");
    }
}

/// JSON object with every field that is set, defaults included.
inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["experiment"] = std::string(to_string(c.experiment));
    if (c.geometry) j["geometry"] = std::string(to_string(*c.geometry));
    if (c.d) j["d"] = *c.d;
    if (c.epsilon) j["epsilon"] = *c.epsilon;
    if (!c.epsilons.empty()) j["epsilons"] = c.epsilons;
    if (c.L) j["L"] = *c.L;
    if (c.r) j["r"] = *c.r;
    if (c.a) j["a"] = *c.a;
    if (c.b) j["b"] = *c.b;
    j["T"] = c.T;
    j["k_max"] = c.k_max;
    j["lambda_max"] = c.lambda_max;
    if (c.m) j["m"] = *c.m;
    j["nu"] = c.nu;
    j["seed"] = c.seed;
    j["instances"] = c.instances;
    nlohmann::json mesh;
    if (c.h_body) mesh["h_body"] = *c.h_body;
    mesh["collar_factor"] = c.collar_factor;
    j["mesh"] = mesh;
    nlohmann::json out;
    if (c.path) out["path"] = *c.path;
    out["format"] = std::string(to_string(c.format));
    out["precision"] = c.precision;
    j["output"] = out;
    return j;
}

inline std::string emit_config(const ExperimentConfig& c) { return to_json(c).dump(); }

/// Parses a JSON document. `fallback` supplies the experiment when the
/// document has none (the CLI subcommand).
inline ExperimentConfig parse_config(std::string_view text, std::optional<Experiment> fallback = std::nullopt) {
    using detail::ConfigReader;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    detail::reject_unknown(doc,
                           {"experiment", "geometry", "d", "epsilon", "epsilons", "L", "r", "a", "b", "T", "k_max",
                            "lambda_max", "m", "nu", "seed", "instances", "mesh", "output"},
                           "");
    ConfigReader in(doc);
    ExperimentConfig c;

    const auto name = in.get<std::string>("experiment");
    if (name) {
        const auto e = parse_experiment(*name);
        if (!e) ConfigReader::fail("experiment", "unknown experiment '" + *name + "'");
        if (fallback && *e != *fallback)
            ConfigReader::fail("experiment", "config is for '" + *name + "' but '" +
                                                 std::string(to_string(*fallback)) + "' was requested");
        c.experiment = *e;
    } else if (fallback) {
        c.experiment = *fallback;
    } else {
        throw ConfigError("missing required field(s): experiment");
    }

    if (const auto g = in.get<std::string>("geometry")) {
        bool found = false;
        for (const auto& [v, n] : geometry_names)
            if (n == *g) {
                c.geometry = v;
                found = true;
            }
        if (!found) ConfigReader::fail("geometry", "unknown geometry '" + *g + "'");
    }
    c.d = in.get<int>("d");
    c.epsilon = in.get<double>("epsilon");
    c.epsilons = in.get<std::vector<double>>("epsilons").value_or(std::vector<double>{});
    c.L = in.get<double>("L");
    c.r = in.get<double>("r");
    c.a = in.get<double>("a");
    c.b = in.get<double>("b");
    const bool planar = c.experiment == Experiment::limit2d || c.experiment == Experiment::figure3;
    c.T = in.get<int>("T").value_or(planar ? 65 : 33);
    c.k_max = in.get<int>("k_max").value_or(8);
    c.lambda_max = in.get<double>("lambda_max").value_or(40.0);
    c.m = in.get<int>("m");
    c.nu = in.get<double>("nu").value_or(2.0);
    c.seed = in.get<std::uint64_t>("seed").value_or(1);
    c.instances = in.get<int>("instances").value_or(200);

    if (doc.contains("mesh")) {
        const auto& mesh = doc.at("mesh");
        if (!mesh.is_object()) ConfigReader::fail("mesh", "expected an object");
        detail::reject_unknown(mesh, {"h_body", "collar_factor"}, "mesh.");
        c.h_body = in.get_at<double>(mesh, "h_body", "mesh.h_body");
        c.collar_factor = in.get_at<double>(mesh, "collar_factor", "mesh.collar_factor").value_or(16.0);
    }
    if (doc.contains("output")) {
        const auto& out = doc.at("output");
        if (!out.is_object()) ConfigReader::fail("output", "expected an object");
        detail::reject_unknown(out, {"path", "format", "precision"}, "output.");
        c.path = in.get_at<std::string>(out, "path", "output.path");
        if (const auto f = in.get_at<std::string>(out, "format", "output.format")) {
            if (*f == "csv")
                c.format = OutputFormat::csv;
            else if (*f == "json")
                c.format = OutputFormat::json;
            else
                ConfigReader::fail("output.format", "must be 'csv' or 'json'");
        }
        c.precision = in.get_at<int>(out, "precision", "output.precision").value_or(12);
    }
    validate(c);
    return c;
}

} // namespace bandgap
