#pragma once

// Config-driven experiments: builds cells, runs the modules, writes files.

#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "bandgap/analytic.hpp"
#include "bandgap/config.hpp"
#include "bandgap/floquet.hpp"
#include "bandgap/geometry.hpp"
#include "bandgap/io.hpp"
#include "bandgap/minmax.hpp"
#include "bandgap/reduction.hpp"

namespace bandgap {

struct RunOptions {
    std::filesystem::path out_dir = ".";
    unsigned threads = 0;  ///< 0: hardware concurrency
};

struct RunResult {
    std::vector<std::filesystem::path> files;
};

inline MeshSpec mesh_of(const ExperimentConfig& c) { return {c.h_body, c.collar_factor}; }

/// The configured cell at a given epsilon (ignored for flat cylinders).
inline Cell make_cell(const ExperimentConfig& c, double eps) {
    const auto mesh = mesh_of(c);
    switch (*c.geometry) {
    case GeometryKind::dumbbell: return dumbbell_cell(*c.d, eps, mesh);
    case GeometryKind::cylinder_linked: return cylinder_linked_cell(*c.d, eps, *c.L, mesh);
    case GeometryKind::flat_cylinder: return flat_cylinder_cell(*c.d, *c.r, *c.L, mesh);
    case GeometryKind::conformal: return conformal_cell(*c.d, *c.r, *c.a, *c.b, eps, mesh);
    }
    throw ConfigError("unsupported geometry");
}

namespace detail {

inline std::vector<double> sweep_epsilons(const ExperimentConfig& c) {
    if (c.geometry == GeometryKind::flat_cylinder) return {c.r.value_or(0.0)};
    return c.epsilon_list();
}

inline nlohmann::json intervals_json(const std::vector<Interval>& gaps) {
    auto out = nlohmann::json::array();
    for (const auto& g : gaps) out.push_back({{"a", g.lo}, {"b", g.hi}});
    return out;
}

inline void run_bands(const ExperimentConfig& c, const RunOptions& o, unsigned threads, RunResult& res) {
    const auto eps = sweep_epsilons(c);
    const Cell cell = make_cell(c, eps.front());
    const auto sweep = band_sweep(cell, ThetaGrid::half_zone(c.T), c.lambda_max, c.k_max, {threads});
    Table t{{"theta", "k", "lambda", "mode_label"}, {}};
    for (std::size_t j = 0; j < sweep.thetas.size(); ++j)
        for (const auto& f : sweep.functions)
            t.add({sweep.thetas[j], static_cast<long>(f.index), f.values[j], "l=" + std::to_string(f.degrees[j])});
    res.files.push_back(write_table(o.out_dir, "bands", t, c));

    const auto gaps = detect_gaps(sweep.bands, c.lambda_max);
    auto bands = nlohmann::json::array();
    for (const auto& b : sweep.bands) bands.push_back({{"k", b.index}, {"lo", b.lo}, {"hi", b.hi}});
    res.files.push_back(write_document(o.out_dir, "gaps",
                                       {{"lambda_max", c.lambda_max},
                                        {"certified_cap", gaps.cap},
                                        {"gaps", intervals_json(gaps.gaps)},
                                        {"count", gaps.count()},
                                        {"bands", bands},
                                        {"truncated", sweep.truncated}},
                                       c));
}

inline std::vector<double> limit_reference(const ExperimentConfig& c) {
    switch (*c.geometry) {
    case GeometryKind::dumbbell: return chain_limit_spectrum(CellKind::dumbbell, *c.d, 0.0, c.k_max).expanded();
    case GeometryKind::cylinder_linked:
        return chain_limit_spectrum(CellKind::cylinder_linked, *c.d, *c.L, c.k_max).expanded();
    case GeometryKind::conformal:
        return product_neumann_spectrum(*c.r, *c.b - *c.a, *c.d, c.k_max).expanded(static_cast<std::size_t>(c.k_max));
    case GeometryKind::flat_cylinder: break;
    }
    throw ConfigError("config field 'geometry': no limit spectrum for flat-cylinder");
}

inline void run_convergence(const ExperimentConfig& c, const RunOptions& o, unsigned threads, RunResult& res) {
    std::vector<FamilyMember> family;
    for (double e : c.epsilons) family.push_back({e, make_cell(c, e)});
    const auto conv =
        band_convergence(family, limit_reference(c), ThetaGrid::half_zone(c.T), c.lambda_max, c.k_max, {threads});
    Table t{{"epsilon", "k", "lo", "hi", "width", "reference", "distance"}, {}};
    for (const auto& r : conv.rows)
        t.add({r.epsilon, static_cast<long>(r.k), r.lo, r.hi, r.width, r.reference, r.distance});
    res.files.push_back(write_table(o.out_dir, "convergence", t, c));
}

inline void run_limit2d(const ExperimentConfig& c, const RunOptions& o, RunResult& res) {
    const auto lb = limit2d_bands(*c.L, *c.r, c.lambda_max, c.T);
    Table t{{"branch", "lo", "hi"}, {}};
    for (std::size_t i = 0; i < lb.curves.size(); ++i) t.add({lb.curves[i].label(), lb.bands[i].lo, lb.bands[i].hi});
    res.files.push_back(write_table(o.out_dir, "limit2d_bands", t, c));
    res.files.push_back(write_document(
        o.out_dir, "limit2d_gaps",
        {{"lambda_max", c.lambda_max}, {"gaps", intervals_json(lb.gaps)}, {"count", lb.gaps.size()}}, c));
}

inline void run_figure3(const ExperimentConfig& c, const RunOptions& o, RunResult& res) {
    const auto curves = figure3_curves(*c.L, *c.r, c.T);
    Table t{{"theta", "branch", "sqrt_lambda"}, {}};
    for (const auto& curve : curves)
        for (std::size_t j = 0; j < curve.thetas.size(); ++j) t.add({curve.thetas[j], curve.label(), curve.values[j]});
    res.files.push_back(write_table(o.out_dir, "figure3", t, c));
}

inline void run_certificate(const ExperimentConfig& c, const RunOptions& o, RunResult& res) {
    const auto cert = gap_certificate(*c.L, *c.r, *c.m);
    res.files.push_back(write_document(o.out_dir, "certificate",
                                       {{"L", cert.L},
                                        {"r", cert.r},
                                        {"m", cert.m},
                                        {"condition", cert.condition},
                                        {"verdict", cert.certified ? "certified" : "not-certified"}},
                                       c));
}

inline void run_curvature(const ExperimentConfig& c, const RunOptions& o, RunResult& res) {
    Table t{{"epsilon", "max_abs", "max_radial", "max_spherical"}, {}};
    for (double e : sweep_epsilons(c)) {
        const Cell cell = make_cell(c, e);
        const auto rep = std::holds_alternative<ProfileCell>(cell) ? sectional_curvature(std::get<ProfileCell>(cell))
                                                                   : conformal_curvature(std::get<ConformalCell>(cell));
        t.add({e, rep.max_abs, max_abs(rep.radial, {}), max_abs(rep.spherical, {})});
    }
    res.files.push_back(write_table(o.out_dir, "curvature", t, c));
}

inline void run_isoperimetric(const ExperimentConfig& c, const RunOptions& o, RunResult& res) {
    Table t{{"epsilon", "nu", "bound", "s1", "s2"}, {}};
    for (double e : sweep_epsilons(c)) {
        const auto bound = isoperimetric_slice_bound(std::get<ProfileCell>(make_cell(c, e)), c.nu);
        t.add({e, bound.nu, bound.value, bound.s1, bound.s2});
    }
    res.files.push_back(write_table(o.out_dir, "isoperimetric", t, c));
}

inline void run_selftest(const ExperimentConfig& c, const RunOptions& o, RunResult& res) {
    const auto s = minmax_selftest(c.seed, c.instances);
    auto cases = nlohmann::json::array();
    for (const auto& k : s.cases) {
        auto verdicts = nlohmann::json::array();
        for (auto v : k.report.verdict) verdicts.push_back(std::string(to_string(v)));
        cases.push_back({{"family", std::string(to_string(k.family))},
                         {"attempts", k.attempts},
                         {"lambda", k.report.lambda},
                         {"lambda_prime", k.report.lambda_prime},
                         {"delta", k.report.delta},
                         {"verdicts", verdicts}});
    }
    res.files.push_back(write_document(o.out_dir, "minmax_selftest",
                                       {{"seed", s.seed},
                                        {"instances", s.instances},
                                        {"pairs_checked", s.pairs_checked},
                                        {"holds", s.holds},
                                        {"violated", s.violated},
                                        {"not_applicable", s.not_applicable},
                                        {"max_oracle_discrepancy", s.max_oracle_discrepancy},
                                        {"passed", s.passed()},
                                        {"cases", cases}},
                                       c));
    if (!s.passed()) throw NumericError("min-max self-test found violated comparisons");
}

} // namespace detail

/// Runs one experiment and writes its files into options.out_dir (created if needed).
inline RunResult run(const ExperimentConfig& config, const RunOptions& options = {}) {
    validate(config);
    std::filesystem::create_directories(options.out_dir);
    const unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    RunResult res;
    switch (config.experiment) {
    case Experiment::bands: detail::run_bands(config, options, threads, res); break;
    case Experiment::convergence: detail::run_convergence(config, options, threads, res); break;
    case Experiment::limit2d: detail::run_limit2d(config, options, res); break;
    case Experiment::figure3: detail::run_figure3(config, options, res); break;
    case Experiment::certificate: detail::run_certificate(config, options, res); break;
    case Experiment::curvature: detail::run_curvature(config, options, res); break;
    case Experiment::isoperimetric: detail::run_isoperimetric(config, options, res); break;
    case Experiment::minmax_selftest: detail::run_selftest(config, options, res); break;
    }
    return res;
}

} // namespace bandgap
