#pragma once

// Floquet decomposition over the dual group of Z: theta sweeps, band
// functions, bands and gaps, plus eigenfunction diagnostics.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bandgap/error.hpp"
#include "bandgap/geometry.hpp"
#include "bandgap/intervals.hpp"
#include "bandgap/reduction.hpp"
#include "bandgap/spectral.hpp"

namespace bandgap {

struct ThetaGrid {
    std::vector<double> values;

    /// theta_j = j pi / (T-1), j = 0..T-1. The other half follows by conjugation.
    static ThetaGrid half_zone(int T) {
        detail::require(T >= 2, "theta grid needs T >= 2");
        ThetaGrid g;
        for (int j = 0; j < T; ++j) g.values.push_back(j == T - 1 ? pi : pi * j / (T - 1));
        return g;
    }

    /// Same spacing as half_zone(T) over all of [0, 2pi).
    static ThetaGrid full_zone(int T) {
        detail::require(T >= 2, "theta grid needs T >= 2");
        ThetaGrid g;
        for (int j = 0; j < 2 * (T - 1); ++j) g.values.push_back(j == T - 1 ? pi : pi * j / (T - 1));
        return g;
    }

    std::size_t size() const { return values.size(); }
};

struct BandFunction {
    int index = 1;                ///< k, 1-based
    std::vector<double> values;   ///< lambda_k(theta_j)
    std::vector<int> degrees;     ///< angular mode that produced each sample
};

struct Band {
    int index = 1;
    double lo = 0.0;
    double hi = 0.0;
};

struct SweepOptions {
    unsigned threads = 1;
};

struct BandSweep {
    std::vector<double> thetas;
    std::vector<AngularMode> modes;
    std::vector<BandFunction> functions;
    std::vector<Band> bands;
    int requested = 0;        ///< k_max
    bool truncated = false;   ///< fewer than k_max eigenvalues below lambda_max at some theta
};

/// Lowest k eigenvalues of one angular mode at one theta.
inline std::vector<double> mode_eigenvalues(const Cell& cell, const AngularMode& mode, double theta, int k) {
    const auto pencil = assemble(reduce(cell, mode, BoundaryCondition::periodic(theta)));
    const auto count = std::min<Eigen::Index>(k, pencil.size());
    return solve(pencil, count).values;
}

namespace detail {

// Runs body(i) for i in [0, count) on up to `threads` workers. The first
// failing index wins, so the error reported does not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    std::atomic<std::size_t> next{0};
    std::mutex guard;
    std::size_t failed_at = count;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(guard);
                if (i < failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
}

template <typename E>
[[noreturn]] void rethrow_with_context(const E& e, const std::string& context) {
    throw E(context + ": " + e.what());
}

inline double zero_threshold(double second) { return 1e-8 * (1.0 + std::abs(second)); }

} // namespace detail

/// Solves every (theta, mode) pair, merges modes with multiplicity per theta
/// and forms the first K = min(k_max, #eigenvalues <= lambda_max) band functions.
inline BandSweep band_sweep(const Cell& cell, const ThetaGrid& grid, double lambda_max, int k_max,
                            const SweepOptions& options = {}) {
    detail::require(grid.size() >= 2, "theta grid needs at least 2 samples");
    detail::require(k_max >= 1, "k_max must be >= 1");
    BandSweep sweep;
    sweep.thetas = grid.values;
    sweep.requested = k_max;
    sweep.modes = enumerate_modes(cell, lambda_max);
    if (sweep.modes.empty()) throw NumericError("no angular modes below lambda_max");

    const auto T = grid.size();
    const auto M = sweep.modes.size();
    std::vector<std::vector<double>> solved(T * M);
    detail::parallel_for(T * M, options.threads, [&](std::size_t task) {
        const auto j = task / M;
        const auto& mode = sweep.modes[task % M];
        const std::string context =
            "theta=" + std::to_string(grid.values[j]) + ", mode " + mode.label();
        try {
            solved[task] = mode_eigenvalues(cell, mode, grid.values[j], k_max);
        } catch (const NumericError& e) {
            detail::rethrow_with_context(e, context);
        } catch (const DomainError& e) {
            detail::rethrow_with_context(e, context);
        }
    });

    // deterministic merge keyed by (theta index, mode index)
    struct Entry {
        double value;
        int degree;
    };
    std::vector<std::vector<Entry>> merged(T);
    std::size_t available = static_cast<std::size_t>(k_max);
    for (std::size_t j = 0; j < T; ++j) {
        auto& list = merged[j];
        for (std::size_t i = 0; i < M; ++i)
            for (double v : solved[j * M + i])
                for (long c = 0; c < sweep.modes[i].multiplicity; ++c) list.push_back({v, sweep.modes[i].degree});
        std::stable_sort(list.begin(), list.end(), [](const Entry& x, const Entry& y) { return x.value < y.value; });
        if (list.size() > static_cast<std::size_t>(k_max)) list.resize(static_cast<std::size_t>(k_max));
        const auto below = static_cast<std::size_t>(std::count_if(
            list.begin(), list.end(), [&](const Entry& e) { return e.value <= lambda_max; }));
        available = std::min(available, below);
    }
    sweep.truncated = available < static_cast<std::size_t>(k_max);
    if (available == 0) throw NumericError("no eigenvalue below lambda_max at some theta");

    for (std::size_t k = 0; k < available; ++k) {
        BandFunction f;
        f.index = static_cast<int>(k + 1);
        for (std::size_t j = 0; j < T; ++j) {
            f.values.push_back(merged[j][k].value);
            f.degrees.push_back(merged[j][k].degree);
        }
        Band b{f.index, *std::min_element(f.values.begin(), f.values.end()),
               *std::max_element(f.values.begin(), f.values.end())};
        sweep.functions.push_back(std::move(f));
        sweep.bands.push_back(b);
    }
    // the bottom of a connected cell's spectrum is exactly 0 at theta = 0
    const double second = merged[0].size() > 1 ? merged[0][1].value : 0.0;
    if (std::abs(sweep.bands.front().lo) <= detail::zero_threshold(second)) {
        for (double& v : sweep.functions.front().values)
            if (std::abs(v) <= detail::zero_threshold(second)) v = 0.0;
        sweep.bands.front().lo = 0.0;
    }
    return sweep;
}

struct GapReport {
    double lambda_max = 0.0;
    double cap = 0.0;  ///< searched range is (bottom, cap), cap = min(lambda_max, hi_K)
    std::vector<Interval> gaps;

    std::size_t count() const { return gaps.size(); }
};

inline constexpr double gap_tolerance = 1e-6;

inline GapReport detect_gaps(const std::vector<Band>& bands, double lambda_max) {
    detail::require(!bands.empty(), "gap detection needs at least one band");
    GapReport report;
    report.lambda_max = lambda_max;
    report.cap = std::min(lambda_max, bands.back().hi);
    std::vector<Interval> covered;
    double bottom = bands.front().lo;
    for (const auto& b : bands) {
        detail::require(b.lo <= b.hi, "band with lo > hi");
        covered.push_back({b.lo, b.hi});
        bottom = std::min(bottom, b.lo);
    }
    report.gaps = complement(std::move(covered), bottom, report.cap, gap_tolerance);
    return report;
}

// ---------------------------------------------------------------------------
// Eigenfunction mass diagnostics

namespace detail {

// Nodal values of a discrete eigenvector, re-inserting eliminated/identified nodes.
inline Eigen::VectorXcd nodal_values(const SturmLiouvilleProblem& slp, const Eigen::VectorXcd& v) {
    const auto nodes = slp.grid.size();
    Eigen::VectorXcd u(static_cast<Eigen::Index>(nodes));
    for (std::size_t j = 0; j < nodes; ++j) {
        const auto map = map_node(j, nodes - 1, slp.bc);
        u(static_cast<Eigen::Index>(j)) = map.index < 0 ? Complex(0.0) : map.phase * v(map.index);
    }
    return u;
}

// Weighted L2 mass of u over the elements whose midpoint satisfies `inside`.
template <typename Pred>
double element_mass(const SturmLiouvilleProblem& slp, const Eigen::VectorXcd& u, Pred inside) {
    double total = 0.0;
    for (std::size_t e = 0; e + 1 < slp.grid.size(); ++e) {
        const double mid = 0.5 * (slp.grid[e] + slp.grid[e + 1]);
        if (!inside(mid)) continue;
        const double h = slp.grid[e + 1] - slp.grid[e];
        const double m = 0.5 * (slp.mass[e] + slp.mass[e + 1]);
        const Complex a = u(static_cast<Eigen::Index>(e)), b = u(static_cast<Eigen::Index>(e + 1));
        total += m * h / 6.0 * (2.0 * std::norm(a) + 2.0 * std::norm(b) + 2.0 * std::real(std::conj(a) * b));
    }
    return total;
}

// Fraction of the mode-0 eigenfunction mass inside a region. The target is
// the first nonconstant eigenfunction; a degenerate eigenvalue is handled by
// averaging over its whole eigenspace, which is basis independent.
template <typename Pred>
double mass_fraction(const Cell& cell, double theta, Pred inside) {
    const auto slp = reduce(cell, angular_mode(dimension_of(cell), 0), BoundaryCondition::periodic(theta));
    const auto pencil = assemble(slp);
    const bool periodic = std::cos(theta) > 1.0 - 1e-12;
    const Eigen::Index target = periodic ? 1 : 0;
    const auto k = std::min<Eigen::Index>(target + 6, pencil.size());
    const auto eig = solve(pencil, k, {.vectors = true});
    const double ref = eig.values[static_cast<std::size_t>(target)];
    const double tol = 1e-8 * (1.0 + std::abs(ref));
    double part = 0.0, whole = 0.0;
    for (Eigen::Index i = periodic ? 1 : 0; i < k; ++i) {
        if (std::abs(eig.values[static_cast<std::size_t>(i)] - ref) > tol) continue;
        const auto u = nodal_values(slp, eig.vectors.col(i));
        part += element_mass(slp, u, inside);
        whole += element_mass(slp, u, [](double) { return true; });
    }
    if (!(whole > 0.0)) throw NumericError("eigenfunction has zero mass");
    return part / whole;
}

} // namespace detail

/// Mass share of the first nonconstant eigenfunction on the end regions
/// [0, width] and [S - width, S]; width defaults to 2 eps.
inline double end_mass_fraction(const ProfileCell& cell, double theta, std::optional<double> width = {}) {
    const double w = width.value_or(2.0 * cell.epsilon);
    detail::require(w > 0.0 && 2.0 * w <= cell.length, "end region width out of range");
    const double S = cell.length;
    return detail::mass_fraction(Cell{cell}, theta, [&](double s) { return s < w || s > S - w; });
}

/// Mass share of the first nonconstant eigenfunction outside the undisturbed region [a, b].
inline double exterior_mass_fraction(const ConformalCell& cell, double theta) {
    return detail::mass_fraction(Cell{cell}, theta, [&](double x) { return x < cell.a || x > cell.b; });
}

// ---------------------------------------------------------------------------
// Convergence of bands toward a limit spectrum

struct ConvergenceRow {
    double epsilon = 0.0;
    int k = 1;
    double lo = 0.0, hi = 0.0;
    double width = 0.0;
    double reference = 0.0;
    double distance = 0.0;  ///< max(|lo - ref|, |hi - ref|)
};

struct BandConvergence {
    std::vector<double> epsilons;
    std::vector<ConvergenceRow> rows;
    std::vector<bool> truncated;  ///< per epsilon

    /// Distances for band k in epsilon order.
    std::vector<double> distances(int k) const {
        std::vector<double> out;
        for (const auto& r : rows)
            if (r.k == k) out.push_back(r.distance);
        return out;
    }
};

struct FamilyMember {
    double epsilon;
    Cell cell;
};

/// Band distance to reference eigenvalues for each member of an epsilon family.
inline BandConvergence band_convergence(const std::vector<FamilyMember>& family, const std::vector<double>& reference,
                                        const ThetaGrid& grid, double lambda_max, int k_max,
                                        const SweepOptions& options = {}) {
    detail::require(family.size() >= 2, "convergence needs at least 2 epsilon values");
    for (std::size_t i = 0; i + 1 < family.size(); ++i)
        detail::require(family[i + 1].epsilon < family[i].epsilon, "epsilon values must be descending");
    detail::require(static_cast<int>(reference.size()) >= k_max, "reference spectrum shorter than k_max");
    BandConvergence out;
    for (const auto& member : family) {
        const auto sweep = band_sweep(member.cell, grid, lambda_max, k_max, options);
        out.epsilons.push_back(member.epsilon);
        out.truncated.push_back(sweep.truncated);
        for (const auto& b : sweep.bands) {
            const double ref = reference[static_cast<std::size_t>(b.index - 1)];
            out.rows.push_back({member.epsilon, b.index, b.lo, b.hi, b.hi - b.lo, ref,
                                std::max(std::abs(b.lo - ref), std::abs(b.hi - ref))});
        }
    }
    return out;
}

} // namespace bandgap
