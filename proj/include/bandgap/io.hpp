#pragma once

// Serialization: cells as JSON, result tables as CSV or JSON with a
// provenance header (tool version and full config).

#include <cstdio>
#include <fstream>
#include <filesystem>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bandgap/config.hpp"
#include "bandgap/error.hpp"
#include "bandgap/geometry.hpp"

#ifndef BANDGAP_VERSION
#define BANDGAP_VERSION "0.0.0"
#endif

namespace bandgap {

inline constexpr const char* tool_version = BANDGAP_VERSION;

// ---------------------------------------------------------------------------
// Cells

inline nlohmann::json to_json(const ProfileCell& cell) {
    return {{"type", "profile"},
            {"kind", std::string(to_string(cell.kind))},
            {"dimension", cell.dimension},
            {"length", cell.length},
            {"epsilon", cell.epsilon},
            {"collar_width", cell.collar_width},
            {"grid", cell.grid},
            {"profile", cell.profile}};
}

inline nlohmann::json to_json(const ConformalCell& cell) {
    return {{"type", "conformal"},
            {"dimension", cell.dimension},
            {"radius", cell.radius},
            {"a", cell.a},
            {"b", cell.b},
            {"epsilon", cell.epsilon},
            {"grid", cell.grid},
            {"factor", cell.factor}};
}

inline ProfileCell profile_cell_from_json(const nlohmann::json& j) {
    try {
        ProfileCell cell;
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "dumbbell") cell.kind = CellKind::dumbbell;
        else if (kind == "cylinder-linked") cell.kind = CellKind::cylinder_linked;
        else if (kind == "flat-cylinder") cell.kind = CellKind::flat_cylinder;
        else if (kind == "custom") cell.kind = CellKind::custom;
        else throw DomainError("unknown cell kind '" + kind + "'");
        cell.dimension = j.at("dimension").get<int>();
        cell.length = j.at("length").get<double>();
        cell.epsilon = j.at("epsilon").get<double>();
        cell.collar_width = j.at("collar_width").get<double>();
        cell.grid = j.at("grid").get<std::vector<double>>();
        cell.profile = j.at("profile").get<std::vector<double>>();
        validate(cell);
        return cell;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed profile cell: ") + e.what());
    }
}

inline ConformalCell conformal_cell_from_json(const nlohmann::json& j) {
    try {
        ConformalCell cell;
        cell.dimension = j.at("dimension").get<int>();
        cell.radius = j.at("radius").get<double>();
        cell.a = j.at("a").get<double>();
        cell.b = j.at("b").get<double>();
        cell.epsilon = j.at("epsilon").get<double>();
        cell.grid = j.at("grid").get<std::vector<double>>();
        cell.factor = j.at("factor").get<std::vector<double>>();
        validate(cell);
        return cell;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed conformal cell: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Tables

using TableValue = std::variant<double, long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<TableValue>> rows;

    void add(std::vector<TableValue> row) {
        if (row.size() != columns.size()) throw DomainError("table row width does not match the header");
        rows.push_back(std::move(row));
    }
};

inline std::string format_number(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

inline std::string header_line(const ExperimentConfig& config) {
    return std::string("# bandgap ") + tool_version + " config: " + emit_config(config);
}

inline nlohmann::json meta(const ExperimentConfig& config) {
    return {{"tool", "bandgap"}, {"version", tool_version}, {"config", to_json(config)}};
}

inline void write_csv(std::ostream& os, const Table& t, const ExperimentConfig& config) {
    os << header_line(config) << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>) os << format_number(v, config.precision);
                    else os << v;
                },
                row[i]);
        }
        os << '\n';
    }
}

inline nlohmann::json table_json(const Table& t) {
    auto rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i)
            std::visit([&](const auto& v) { obj[t.columns[i]] = v; }, row[i]);
        rows.push_back(obj);
    }
    return rows;
}

inline void write_json(std::ostream& os, nlohmann::json body, const ExperimentConfig& config) {
    nlohmann::json doc = {{"meta", meta(config)}};
    for (auto& [key, value] : body.items()) doc[key] = value;
    os << doc.dump(2) << '\n';
}

/// Writes a table named `stem` in the configured format; returns the path.
inline std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem, const Table& t,
                                         const ExperimentConfig& config) {
    const bool csv = config.format == OutputFormat::csv;
    const auto path = dir / (stem + (csv ? ".csv" : ".json"));
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    if (csv) write_csv(os, t, config);
    else write_json(os, {{"columns", t.columns}, {"rows", table_json(t)}}, config);
    if (!os) throw std::runtime_error("write to " + path.string() + " failed");
    return path;
}

inline std::filesystem::path write_document(const std::filesystem::path& dir, const std::string& stem,
                                            const nlohmann::json& body, const ExperimentConfig& config) {
    const auto path = dir / (stem + ".json");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_json(os, body, config);
    if (!os) throw std::runtime_error("write to " + path.string() + " failed");
    return path;
}

} // namespace bandgap
