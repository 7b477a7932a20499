#pragma once

// Period cells of the periodic manifolds and their geometric diagnostics.
//
// Every cell is rotationally symmetric with group Z acting by translation
// along the axis: a warped product [0,S] x S^{d-1} with metric
// ds^2 + f(s)^2 dsigma^2 (ProfileCell), or a flat cylinder [0,1] x S^{d-1}_r
// with conformal factor rho(x)^2 (ConformalCell).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bandgap/error.hpp"

namespace bandgap {

inline constexpr double pi = std::numbers::pi;

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3, clamped to [0,1]. C^2 and monotone.
inline double smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

/// Neck radius r_eps: equal to eps on [0,eps], to s on [2eps,inf), monotone C^2 blend between.
inline double neck_radius(double s, double eps) {
    if (s <= eps) return eps;
    if (s >= 2.0 * eps) return s;
    return eps + smoothstep((s - eps) / eps) * (s - eps);
}

/// Cut-off chi_eps: 0 for s <= eps, 1 for s >= 2eps.
inline double neck_cutoff(double s, double eps) { return smoothstep((s - eps) / eps); }

/// Dumbbell profile on [0,pi]: the punctured unit sphere with both poles
/// replaced by cylindrical ends of radius eps.
inline double dumbbell_profile(double s, double eps) {
    const double t = std::min(s, pi - s);
    if (t >= 2.0 * eps) return std::sin(s);
    const double chi = neck_cutoff(t, eps);
    return chi * std::sin(t) + (1.0 - chi) * neck_radius(t, eps);
}

/// Conformal factor rho_eps on the unit cell: 1 on [a,b], eps at distance >= eps^d.
inline double conformal_factor(double x, double a, double b, double eps, int dimension) {
    const double width = std::pow(eps, dimension);
    double dist = 0.0;
    if (x < a)
        dist = std::min(a - x, x + 1.0 - b);
    else if (x > b)
        dist = std::min(x - b, a + 1.0 - x);
    return 1.0 - (1.0 - eps) * smoothstep(dist / width);
}

/// Area of the unit sphere S^{n}.
inline double unit_sphere_area(int n) {
    const double half = 0.5 * (n + 1);
    return 2.0 * std::pow(pi, half) / std::tgamma(half);
}

struct MeshSpec {
    std::optional<double> h_body;  ///< body spacing; default S/400
    double collar_factor = 16.0;   ///< neck spacing is eps/collar_factor
};

enum class CellKind { dumbbell, cylinder_linked, flat_cylinder, custom };

inline std::string_view to_string(CellKind kind) {
    switch (kind) {
    case CellKind::dumbbell: return "dumbbell";
    case CellKind::cylinder_linked: return "cylinder-linked";
    case CellKind::flat_cylinder: return "flat-cylinder";
    case CellKind::custom: return "custom";
    }
    return "custom";
}

namespace detail {

// Linear interpolation of sampled data; grid strictly increasing.
inline double interpolate(std::span<const double> grid, std::span<const double> values, double x) {
    if (x <= grid.front()) return values.front();
    if (x >= grid.back()) return values.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const auto i = static_cast<std::size_t>(it - grid.begin()) - 1;
    const double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
    return (1.0 - t) * values[i] + t * values[i + 1];
}

// Appends (a,b] subdivided uniformly with spacing at most h. `out` must end at a.
inline void append_segment(std::vector<double>& out, double a, double b, double h) {
    if (b <= a) return;
    const auto n = std::max<long>(1, static_cast<long>(std::ceil((b - a) / h - 1e-9)));
    for (long i = 1; i < n; ++i) out.push_back(a + (b - a) * static_cast<double>(i) / n);
    out.push_back(b);
}

inline long count_intervals(std::span<const double> grid, double lo, double hi) {
    long n = 0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double mid = 0.5 * (grid[i] + grid[i + 1]);
        if (mid > lo && mid < hi) ++n;
    }
    return n;
}

inline void check_grid(std::span<const double> grid) {
    require(grid.size() >= 2, "grid needs at least two points");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        require(grid[i + 1] > grid[i], "grid must be strictly increasing");
}

} // namespace detail

struct ProfileCell {
    int dimension = 2;
    double length = 0.0;
    std::vector<double> grid;
    std::vector<double> profile;
    double collar_width = 0.0;
    double epsilon = 0.0;
    CellKind kind = CellKind::custom;

    std::size_t size() const { return grid.size(); }
    double at(double s) const { return detail::interpolate(grid, profile, s); }
};

struct ConformalCell {
    int dimension = 2;
    double radius = 1.0;
    double a = 0.25;
    double b = 0.75;
    double epsilon = 1.0;
    std::vector<double> grid;
    std::vector<double> factor;

    std::size_t size() const { return grid.size(); }
    double at(double x) const { return detail::interpolate(grid, factor, x); }
    double undisturbed_length() const { return b - a; }
};

/// Checks the ProfileCell invariants; throws DomainError on violation.
inline void validate(const ProfileCell& cell) {
    using detail::require;
    require(cell.dimension >= 2, "dimension must be >= 2");
    detail::check_grid(cell.grid);
    require(cell.profile.size() == cell.grid.size(), "profile and grid sizes differ");
    require(cell.grid.front() == 0.0, "grid must start at s=0");
    require(std::abs(cell.grid.back() - cell.length) <= 1e-12 * std::max(1.0, cell.length),
            "grid must end at the cell length");
    for (double f : cell.profile) require(f > 0.0, "profile must be positive");
    if (cell.kind == CellKind::custom) return;

    const auto n = cell.size();
    const double tol = 1e-9;
    require(std::abs(cell.profile.front() - cell.profile.back()) <= tol,
            "profile must glue smoothly: f(0) != f(S)");
    const double left = (cell.profile[1] - cell.profile[0]) / (cell.grid[1] - cell.grid[0]);
    const double right = (cell.profile[n - 1] - cell.profile[n - 2]) / (cell.grid[n - 1] - cell.grid[n - 2]);
    require(std::abs(left - right) <= 1e-6 + 1e-3 * (std::abs(left) + std::abs(right)),
            "profile must glue smoothly: end slopes disagree");
    if (cell.kind == CellKind::flat_cylinder) return;

    const double w = cell.collar_width;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = cell.grid[i];
        if (s <= w || s >= cell.length - w)
            require(cell.profile[i] == cell.epsilon, "profile must equal eps on the end collars");
    }
    require(detail::count_intervals(cell.grid, w - 0.5 * cell.epsilon, w) >= 8,
            "mesh too coarse: fewer than 8 intervals across the neck collar");
}

/// Checks the ConformalCell invariants; throws DomainError on violation.
inline void validate(const ConformalCell& cell) {
    using detail::require;
    require(cell.dimension >= 2, "dimension must be >= 2");
    require(cell.radius > 0.0, "radius must be positive");
    require(0.0 < cell.a && cell.a < cell.b && cell.b < 1.0, "need 0 < a < b < 1");
    require(cell.epsilon > 0.0 && cell.epsilon <= 1.0, "eps must lie in (0, 1]");
    detail::check_grid(cell.grid);
    require(cell.grid.front() == 0.0 && cell.grid.back() == 1.0, "grid must span [0, 1]");
    require(cell.factor.size() == cell.grid.size(), "factor and grid sizes differ");
    const double w = std::pow(cell.epsilon, cell.dimension);
    const double tol = 1e-12;
    for (std::size_t i = 0; i < cell.size(); ++i) {
        const double x = cell.grid[i];
        const double rho = cell.factor[i];
        require(rho >= cell.epsilon - tol && rho <= 1.0 + tol, "factor must lie in [eps, 1]");
        if (x >= cell.a && x <= cell.b) require(std::abs(rho - 1.0) <= tol, "factor must equal 1 on [a, b]");
        const double dist = x < cell.a ? std::min(cell.a - x, x + 1.0 - cell.b)
                          : x > cell.b ? std::min(x - cell.b, cell.a + 1.0 - x)
                                       : 0.0;
        if (dist >= w) require(std::abs(rho - cell.epsilon) <= tol, "factor must equal eps away from [a, b]");
    }
    require(std::abs(cell.factor.front() - cell.factor.back()) <= tol, "factor must be periodic");
}

namespace detail {

inline double neck_spacing(double eps, double h_body, const MeshSpec& mesh) {
    require(mesh.collar_factor >= 16.0,
            "mesh too coarse: collar_factor must be >= 16 to put 8 intervals on [0, eps/2]");
    return std::min(eps / mesh.collar_factor, h_body);
}

// Left half of the dumbbell grid [0, pi/2], graded on [0, 2eps].
inline std::vector<double> dumbbell_half_grid(double eps, double h_body, double h_neck) {
    std::vector<double> g{0.0};
    append_segment(g, 0.0, 0.5 * eps, h_neck);
    append_segment(g, 0.5 * eps, eps, h_neck);
    append_segment(g, eps, 2.0 * eps, h_neck);
    append_segment(g, 2.0 * eps, 0.5 * pi, h_body);
    return g;
}

inline void dumbbell_samples(double eps, double h_body, double h_neck, double shift,
                             std::vector<double>& grid, std::vector<double>& profile) {
    const auto half = dumbbell_half_grid(eps, h_body, h_neck);
    std::vector<double> f(half.size());
    for (std::size_t i = 0; i < half.size(); ++i) f[i] = dumbbell_profile(half[i], eps);
    for (std::size_t i = 0; i < half.size(); ++i) {
        if (!grid.empty() && half[i] + shift <= grid.back()) continue;
        grid.push_back(half[i] + shift);
        profile.push_back(f[i]);
    }
    for (std::size_t i = half.size() - 1; i-- > 0;) {
        grid.push_back(pi - half[i] + shift);
        profile.push_back(dumbbell_profile(pi - half[i], eps));
    }
}

inline void check_eps(int d, double eps) {
    require(d >= 2, "dimension must be >= 2");
    require(eps > 0.0 && eps < 0.25, "eps must lie in (0, 0.25)");
}

} // namespace detail

/// Unit round sphere S^d with both poles replaced by cylindrical ends of radius eps.
inline ProfileCell dumbbell_cell(int d, double eps, const MeshSpec& mesh = {}) {
    detail::check_eps(d, eps);
    const double h_body = mesh.h_body.value_or(pi / 400.0);
    detail::require(h_body > 0.0, "h_body must be positive");
    ProfileCell cell;
    cell.dimension = d;
    cell.length = pi;
    cell.epsilon = eps;
    cell.collar_width = 0.5 * eps;
    cell.kind = CellKind::dumbbell;
    detail::dumbbell_samples(eps, h_body, detail::neck_spacing(eps, h_body, mesh), 0.0, cell.grid,
                             cell.profile);
    cell.grid.back() = pi;
    validate(cell);
    return cell;
}

/// Dumbbell cell with a cylinder of radius eps and length L inserted between cells
/// (split into two halves of length L/2 at either end of the cell).
inline ProfileCell cylinder_linked_cell(int d, double eps, double L, const MeshSpec& mesh = {}) {
    detail::check_eps(d, eps);
    detail::require(L >= 0.0, "cylinder length L must be >= 0");
    const double S = pi + L;
    const double h_body = mesh.h_body.value_or(S / 400.0);
    detail::require(h_body > 0.0, "h_body must be positive");
    const double h_neck = detail::neck_spacing(eps, h_body, mesh);

    ProfileCell cell;
    cell.dimension = d;
    cell.length = S;
    cell.epsilon = eps;
    cell.collar_width = 0.5 * L + 0.5 * eps;
    cell.kind = CellKind::cylinder_linked;

    std::vector<double> collar{0.0};
    detail::append_segment(collar, 0.0, 0.5 * L, h_body);
    if (L > 0.0) {
        for (std::size_t i = 0; i + 1 < collar.size(); ++i) {
            cell.grid.push_back(collar[i]);
            cell.profile.push_back(eps);
        }
    }
    detail::dumbbell_samples(eps, h_body, h_neck, 0.5 * L, cell.grid, cell.profile);
    if (L > 0.0) {
        for (std::size_t i = 1; i < collar.size(); ++i) {
            cell.grid.push_back(pi + 0.5 * L + collar[i]);
            cell.profile.push_back(eps);
        }
    }
    cell.grid.back() = S;
    validate(cell);
    return cell;
}

/// Straight cylinder of constant radius.
inline ProfileCell flat_cylinder_cell(int d, double radius, double S, const MeshSpec& mesh = {}) {
    detail::require(d >= 2, "dimension must be >= 2");
    detail::require(radius > 0.0, "radius must be positive");
    detail::require(S > 0.0, "cell length must be positive");
    const double h = mesh.h_body.value_or(S / 400.0);
    detail::require(h > 0.0, "h_body must be positive");
    ProfileCell cell;
    cell.dimension = d;
    cell.length = S;
    cell.epsilon = radius;
    cell.collar_width = S;
    cell.kind = CellKind::flat_cylinder;
    cell.grid = {0.0};
    detail::append_segment(cell.grid, 0.0, S, h);
    cell.grid.back() = S;
    cell.profile.assign(cell.grid.size(), radius);
    validate(cell);
    return cell;
}

/// Arbitrary sampled profile; only positivity and grid monotonicity are checked.
inline ProfileCell custom_cell(int d, std::vector<double> grid, std::vector<double> profile) {
    ProfileCell cell;
    cell.dimension = d;
    cell.length = grid.empty() ? 0.0 : grid.back();
    cell.grid = std::move(grid);
    cell.profile = std::move(profile);
    cell.kind = CellKind::custom;
    validate(cell);
    return cell;
}

/// Flat cylinder of radius r on the unit cell, conformally deformed by rho_eps.
inline ConformalCell conformal_cell(int d, double r, double a, double b, double eps,
                                    const MeshSpec& mesh = {}) {
    using detail::require;
    require(d >= 2, "dimension must be >= 2");
    require(r > 0.0, "radius must be positive");
    require(0.0 < a && a < b && b < 1.0, "need 0 < a < b < 1");
    require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
    // eps = 1 is the undeformed product: no transition zone
    const double w = eps < 1.0 ? std::pow(eps, d) : 0.0;
    require(a - w > 0.0 && b + w < 1.0,
            "transition zones overlap across the period boundary (need eps^d < min(a, 1-b))");
    const double h = mesh.h_body.value_or(1.0 / 400.0);
    require(h > 0.0, "h_body must be positive");
    require(mesh.collar_factor >= 1.0, "collar_factor must be >= 1");
    const double ht = std::min(w / mesh.collar_factor, h);

    ConformalCell cell;
    cell.dimension = d;
    cell.radius = r;
    cell.a = a;
    cell.b = b;
    cell.epsilon = eps;
    cell.grid = {0.0};
    detail::append_segment(cell.grid, 0.0, a - w, h);
    detail::append_segment(cell.grid, a - w, a, ht);
    detail::append_segment(cell.grid, a, b, h);
    detail::append_segment(cell.grid, b, b + w, ht);
    detail::append_segment(cell.grid, b + w, 1.0, h);
    cell.grid.back() = 1.0;
    cell.factor.resize(cell.grid.size());
    for (std::size_t i = 0; i < cell.grid.size(); ++i)
        cell.factor[i] = conformal_factor(cell.grid[i], a, b, eps, d);
    validate(cell);
    return cell;
}

// ---------------------------------------------------------------------------
// Curvature

struct CurvatureReport {
    std::vector<double> radial;     ///< K(d_s, d_sigma) per grid point
    std::vector<double> spherical;  ///< K(d_sigma_j, d_sigma_k); empty for d = 2
    double max_abs = 0.0;
};

namespace detail {

// Derivatives of the quadratic through three points, evaluated at x.
struct Quadratic3 {
    double d1, d2;
};

inline Quadratic3 quadratic_derivatives(double x0, double x1, double x2, double f0, double f1, double f2,
                                        double at) {
    const double d01 = (f1 - f0) / (x1 - x0);
    const double d12 = (f2 - f1) / (x2 - x1);
    const double second = 2.0 * (d12 - d01) / (x2 - x0);
    // Newton form: f0 + d01 (x - x0) + (second/2)(x - x0)(x - x1)
    const double first = d01 + 0.5 * second * ((at - x0) + (at - x1));
    return {first, second};
}

inline void differentiate(std::span<const double> x, std::span<const double> f, std::vector<double>& d1,
                          std::vector<double>& d2) {
    const auto n = x.size();
    require(n >= 3, "curvature needs at least 3 grid points");
    d1.resize(n);
    d2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = std::clamp<std::size_t>(i, 1, n - 2);
        const auto q = quadratic_derivatives(x[c - 1], x[c], x[c + 1], f[c - 1], f[c], f[c + 1], x[i]);
        d1[i] = q.d1;
        d2[i] = q.d2;
    }
}

inline double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    for (double v : b) m = std::max(m, std::abs(v));
    return m;
}

} // namespace detail

/// Sectional curvatures of ds^2 + f(s)^2 dsigma^2: K_rad = -f''/f, K_sph = (1 - f'^2)/f^2.
inline CurvatureReport sectional_curvature(const ProfileCell& cell) {
    std::vector<double> d1, d2;
    detail::differentiate(cell.grid, cell.profile, d1, d2);
    CurvatureReport report;
    const auto n = cell.size();
    report.radial.resize(n);
    for (std::size_t i = 0; i < n; ++i) report.radial[i] = -d2[i] / cell.profile[i];
    if (cell.dimension >= 3) {
        report.spherical.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double f = cell.profile[i];
            report.spherical[i] = (1.0 - d1[i] * d1[i]) / (f * f);
        }
    }
    report.max_abs = detail::max_abs(report.radial, report.spherical);
    return report;
}

/// Curvatures of the conformally deformed flat product: K_rad = -rho^5 rho'', K_sph = -rho^6 rho'^2.
inline CurvatureReport conformal_curvature(const ConformalCell& cell) {
    std::vector<double> d1, d2;
    detail::differentiate(cell.grid, cell.factor, d1, d2);
    CurvatureReport report;
    const auto n = cell.size();
    report.radial.resize(n);
    for (std::size_t i = 0; i < n; ++i) report.radial[i] = -std::pow(cell.factor[i], 5) * d2[i];
    if (cell.dimension >= 3) {
        report.spherical.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            report.spherical[i] = -std::pow(cell.factor[i], 6) * d1[i] * d1[i];
    }
    report.max_abs = detail::max_abs(report.radial, report.spherical);
    return report;
}

// ---------------------------------------------------------------------------
// Isoperimetric diagnostic

struct IsoperimetricBound {
    double nu = 2.0;
    double value = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
};

/// Upper bound on the nu-isoperimetric constant from slices (s1,s2) x S^{d-1}:
/// min over grid pairs of (|boundary|)^nu / (volume)^(nu-1).
inline IsoperimetricBound isoperimetric_slice_bound(const ProfileCell& cell, double nu) {
    detail::require(nu > 1.0, "nu must be > 1");
    const int d = cell.dimension;
    const double sigma = unit_sphere_area(d - 1);
    const auto n = cell.size();
    std::vector<double> area(n), volume(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) area[i] = std::pow(cell.profile[i], d - 1);
    for (std::size_t i = 1; i < n; ++i)
        volume[i] = volume[i - 1] + 0.5 * (area[i] + area[i - 1]) * (cell.grid[i] - cell.grid[i - 1]);

    IsoperimetricBound best{nu, std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double boundary = sigma * (area[i] + area[j]);
            const double vol = sigma * (volume[j] - volume[i]);
            const double value = std::pow(boundary, nu) / std::pow(vol, nu - 1.0);
            if (value < best.value) best = {nu, value, cell.grid[i], cell.grid[j]};
        }
    }
    return best;
}

} // namespace bandgap
