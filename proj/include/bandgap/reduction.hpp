#pragma once

// Separation of variables: each angular mode of the cross-section sphere turns
// the cell Laplacian into a 1-D Sturm-Liouville form
//     integral p |u'|^2 + q |u|^2   against   integral m |u|^2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "bandgap/error.hpp"
#include "bandgap/geometry.hpp"

namespace bandgap {

using Cell = std::variant<ProfileCell, ConformalCell>;

inline int dimension_of(const Cell& cell) {
    return std::visit([](const auto& c) { return c.dimension; }, cell);
}

/// Binomial coefficient, zero outside 0 <= k <= n.
inline long binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    long result = 1;
    for (long i = 1; i <= k; ++i) result = result * (n - k + i) / i;
    return result;
}

/// Dimension of the degree-l spherical harmonics on S^n.
inline long harmonic_multiplicity(int n, int l) {
    return binomial(l + n, l) - binomial(l + n - 2, l - 2);
}

/// Laplace eigenvalue l(l+n-1) of degree-l harmonics on the unit S^n.
inline double harmonic_eigenvalue(int n, int l) { return static_cast<double>(l) * (l + n - 1); }

struct AngularMode {
    int degree = 0;
    double eigenvalue = 0.0;  ///< mu = l(l+d-2) on S^{d-1}
    long multiplicity = 1;

    std::string label() const { return "l=" + std::to_string(degree); }
};

inline AngularMode angular_mode(int d, int l) {
    detail::require(d >= 2, "dimension must be >= 2");
    detail::require(l >= 0, "mode degree must be >= 0");
    return {l, harmonic_eigenvalue(d - 1, l), harmonic_multiplicity(d - 1, l)};
}

enum class EndCondition { dirichlet, neumann };

struct BoundaryCondition {
    bool quasi_periodic = true;
    double theta = 0.0;
    EndCondition left = EndCondition::neumann;
    EndCondition right = EndCondition::neumann;

    /// u(S) = e^{i theta} u(0) and the same for the flux.
    static BoundaryCondition periodic(double theta) { return {true, theta, EndCondition::neumann, EndCondition::neumann}; }
    static BoundaryCondition dirichlet() { return mixed(EndCondition::dirichlet, EndCondition::dirichlet); }
    static BoundaryCondition neumann() { return mixed(EndCondition::neumann, EndCondition::neumann); }
    static BoundaryCondition mixed(EndCondition l, EndCondition r) { return {false, 0.0, l, r}; }
};

struct SturmLiouvilleProblem {
    std::vector<double> grid;
    std::vector<double> stiffness;  ///< p > 0
    std::vector<double> potential;  ///< q >= 0
    std::vector<double> mass;       ///< m > 0
    BoundaryCondition bc;
};

inline void validate(const SturmLiouvilleProblem& slp) {
    using detail::require;
    detail::check_grid(slp.grid);
    const auto n = slp.grid.size();
    require(slp.stiffness.size() == n && slp.potential.size() == n && slp.mass.size() == n,
            "coefficient arrays must match the grid");
    for (std::size_t i = 0; i < n; ++i) {
        require(slp.stiffness[i] > 0.0, "stiffness weight p must be positive");
        require(slp.mass[i] > 0.0, "mass weight m must be positive");
        require(slp.potential[i] >= 0.0, "potential weight q must be nonnegative");
    }
}

/// Mode-l form of ds^2 + f^2 dsigma^2: p = f^{d-1}, q = mu f^{d-3}, m = f^{d-1}.
inline SturmLiouvilleProblem reduce_profile(const ProfileCell& cell, const AngularMode& mode,
                                            const BoundaryCondition& bc) {
    const int d = cell.dimension;
    SturmLiouvilleProblem slp;
    slp.grid = cell.grid;
    slp.bc = bc;
    const auto n = cell.size();
    slp.stiffness.resize(n);
    slp.potential.resize(n);
    slp.mass.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = cell.profile[i];
        slp.stiffness[i] = std::pow(f, d - 1);
        slp.potential[i] = mode.eigenvalue * std::pow(f, d - 3);
        slp.mass[i] = slp.stiffness[i];
    }
    validate(slp);
    return slp;
}

/// Mode-l form of rho^2 (dx^2 + r^2 dsigma^2), with the common r^{d-1} factor removed:
/// p = rho^{d-2}, q = mu rho^{d-2} / r^2, m = rho^d.
inline SturmLiouvilleProblem reduce_conformal(const ConformalCell& cell, const AngularMode& mode,
                                              const BoundaryCondition& bc) {
    const int d = cell.dimension;
    SturmLiouvilleProblem slp;
    slp.grid = cell.grid;
    slp.bc = bc;
    const auto n = cell.size();
    slp.stiffness.resize(n);
    slp.potential.resize(n);
    slp.mass.resize(n);
    const double r2 = cell.radius * cell.radius;
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = cell.factor[i];
        slp.stiffness[i] = std::pow(rho, d - 2);
        slp.potential[i] = mode.eigenvalue * slp.stiffness[i] / r2;
        slp.mass[i] = std::pow(rho, d);
    }
    validate(slp);
    return slp;
}

inline SturmLiouvilleProblem reduce(const Cell& cell, const AngularMode& mode, const BoundaryCondition& bc) {
    if (const auto* p = std::get_if<ProfileCell>(&cell)) return reduce_profile(*p, mode, bc);
    return reduce_conformal(std::get<ConformalCell>(cell), mode, bc);
}

/// Lower bound on q/m per unit mu, from element-averaged coefficients.
/// Every mode-l discrete eigenvalue is >= mu_l times this floor.
inline double mode_potential_floor(const Cell& cell) {
    const AngularMode unit{1, 1.0, 1};
    const auto slp = reduce(cell, unit, BoundaryCondition::periodic(0.0));
    double floor = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e + 1 < slp.grid.size(); ++e) {
        const double q = 0.5 * (slp.potential[e] + slp.potential[e + 1]);
        const double m = 0.5 * (slp.mass[e] + slp.mass[e + 1]);
        floor = std::min(floor, q / m);
    }
    return floor;
}

/// All angular modes that can contribute an eigenvalue <= lambda_max.
inline std::vector<AngularMode> enumerate_modes(const Cell& cell, double lambda_max) {
    detail::require(lambda_max > 0.0, "lambda_max must be positive");
    const auto size = std::visit([](const auto& c) { return c.size(); }, cell);
    detail::require(size >= 2, "cell is empty");
    const int d = dimension_of(cell);
    const double floor = mode_potential_floor(cell);
    std::vector<AngularMode> modes;
    for (int l = 0;; ++l) {
        auto mode = angular_mode(d, l);
        if (l > 0 && mode.eigenvalue * floor > lambda_max) break;
        modes.push_back(mode);
    }
    return modes;
}

} // namespace bandgap
