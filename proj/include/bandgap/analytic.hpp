#pragma once

// Closed-form reference data: limit spectra of the shrinking constructions
// and the exact 2-D dispersion relations of the conformally deformed
// cylinder of radius r whose undisturbed piece has length L (and l = 1 - L).

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "bandgap/error.hpp"
#include "bandgap/geometry.hpp"
#include "bandgap/intervals.hpp"
#include "bandgap/reduction.hpp"

namespace bandgap {

struct SpectralLevel {
    double value = 0.0;
    long multiplicity = 1;
    std::string source;  ///< e.g. "sphere-l=2", "interval-m=1", "product-(m=0,l=1)"
};

struct LimitSpectrum {
    std::vector<SpectralLevel> levels;  ///< ascending, distinct values

    /// Values repeated by multiplicity, at most n of them (all when n == 0).
    std::vector<double> expanded(std::size_t n = 0) const {
        std::vector<double> out;
        for (const auto& level : levels)
            for (long c = 0; c < level.multiplicity; ++c) {
                if (n != 0 && out.size() == n) return out;
                out.push_back(level.value);
            }
        return out;
    }
};

enum class IntervalCondition { dirichlet, neumann };

namespace detail {

// Sorts and merges coincident values (relative 1e-12), summing multiplicities.
inline std::vector<SpectralLevel> merge_levels(std::vector<SpectralLevel> raw) {
    std::stable_sort(raw.begin(), raw.end(),
                     [](const SpectralLevel& x, const SpectralLevel& y) { return x.value < y.value; });
    std::vector<SpectralLevel> out;
    for (auto& level : raw) {
        if (!out.empty() && std::abs(level.value - out.back().value) <= 1e-12 * std::max(1.0, std::abs(level.value))) {
            out.back().multiplicity += level.multiplicity;
            out.back().source += "+" + level.source;
        } else {
            out.push_back(std::move(level));
        }
    }
    return out;
}

// Keeps the first n values counted with multiplicity.
inline std::vector<SpectralLevel> trim_values(std::vector<SpectralLevel> levels, std::size_t n) {
    std::vector<SpectralLevel> out;
    std::size_t taken = 0;
    for (auto& level : levels) {
        if (taken == n) break;
        const auto room = static_cast<long>(n - taken);
        level.multiplicity = std::min(level.multiplicity, room);
        taken += static_cast<std::size_t>(level.multiplicity);
        out.push_back(std::move(level));
    }
    return out;
}

} // namespace detail

/// (m pi / L)^2 with m >= 1 (Dirichlet) or m >= 0 (Neumann); `count` values.
inline LimitSpectrum interval_spectrum(double L, IntervalCondition bc, int count) {
    detail::require(L > 0.0, "interval length must be positive");
    detail::require(count >= 0, "count must be >= 0");
    LimitSpectrum spec;
    const int first = bc == IntervalCondition::dirichlet ? 1 : 0;
    for (int m = first; m < first + count; ++m) {
        const double w = m * pi / L;
        spec.levels.push_back({w * w, 1, "interval-m=" + std::to_string(m)});
    }
    return spec;
}

/// Laplace spectrum of the unit round S^d: the first `count` distinct levels.
inline LimitSpectrum sphere_spectrum(int d, int count) {
    detail::require(d >= 2, "sphere dimension must be >= 2");
    detail::require(count >= 0, "count must be >= 0");
    LimitSpectrum spec;
    for (int l = 0; l < count; ++l)
        spec.levels.push_back({harmonic_eigenvalue(d, l), harmonic_multiplicity(d, l), "sphere-l=" + std::to_string(l)});
    return spec;
}

/// Neumann spectrum of [0,L] x S^{d-1}_r: (m pi/L)^2 + mu_l / r^2, first `count` distinct levels.
inline LimitSpectrum product_neumann_spectrum(double r, double L, int d, int count) {
    detail::require(r > 0.0 && L > 0.0, "r and L must be positive");
    detail::require(d >= 3, "the product limit needs d >= 3");
    detail::require(count >= 0, "count must be >= 0");
    std::vector<SpectralLevel> raw;
    // (m, 0) for m < count are already `count` distinct values below any m >= count
    for (int m = 0; m < count; ++m)
        for (int l = 0; l < count; ++l) {
            const auto mode = angular_mode(d, l);
            const double w = m * pi / L;
            raw.push_back({w * w + mode.eigenvalue / (r * r), mode.multiplicity,
                           "product-(m=" + std::to_string(m) + ",l=" + std::to_string(l) + ")"});
        }
    auto levels = detail::merge_levels(std::move(raw));
    if (levels.size() > static_cast<std::size_t>(count)) levels.resize(static_cast<std::size_t>(count));
    return {levels};
}

/// Limit of a chain: the sphere S^d, plus the Dirichlet interval of length L
/// for cylinder-linked cells. Exactly `count` values with multiplicity.
inline LimitSpectrum chain_limit_spectrum(CellKind kind, int d, double L, int count) {
    detail::require(kind == CellKind::dumbbell || kind == CellKind::cylinder_linked,
                    "chain limit defined for dumbbell and cylinder-linked cells");
    detail::require(count >= 0, "count must be >= 0");
    auto raw = sphere_spectrum(d, count).levels;
    if (kind == CellKind::cylinder_linked) {
        detail::require(L > 0.0, "cylinder-linked limit needs L > 0");
        const auto interval = interval_spectrum(L, IntervalCondition::dirichlet, count).levels;
        raw.insert(raw.end(), interval.begin(), interval.end());
    }
    return {detail::trim_values(detail::merge_levels(std::move(raw)), static_cast<std::size_t>(count))};
}

// ---------------------------------------------------------------------------
// Dispersion relations

/// n = 0 relation: 2(cos L w - cos theta) - l w sin L w.
inline double dispersion_n0_residual(double L, double theta, double omega) {
    const double l = 1.0 - L;
    return 2.0 * (std::cos(L * omega) - std::cos(theta)) - l * omega * std::sin(L * omega);
}

/// n >= 1 relation with kappa = n/r:
/// (w^2 - kappa^2) sin L w - 2 w kappa (cosh(l kappa) cos L w - cos theta) / sinh(l kappa).
inline double dispersion_n_residual(double L, double r, int n, double theta, double omega) {
    const double l = 1.0 - L;
    const double kappa = n / r;
    const double x = l * kappa;
    double ratio;
    if (x > 30.0) {
        // cosh/sinh -> 1 and 1/sinh -> 2 e^{-x}, relative error below e^{-2x}
        ratio = std::cos(L * omega) - 2.0 * std::cos(theta) * std::exp(-x);
    } else {
        ratio = (std::cosh(x) * std::cos(L * omega) - std::cos(theta)) / std::sinh(x);
    }
    return (omega * omega - kappa * kappa) * std::sin(L * omega) - 2.0 * omega * kappa * ratio;
}

struct RootReport {
    double omega = 0.0;
    int sign_changes = 0;  ///< inside the bracket; more than 1 flags a multiplicity anomaly
};

namespace detail {

inline double bisect(auto&& f, double a, double b, double fa) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (b - a <= 1e-12 * std::max(1.0, std::abs(mid))) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

inline std::string sample_dump(const std::vector<double>& xs, const std::vector<double>& fs) {
    std::ostringstream os;
    os.precision(6);
    const std::size_t step = std::max<std::size_t>(1, xs.size() / 8);
    for (std::size_t i = 0; i < xs.size(); i += step) os << " F(" << xs[i] << ")=" << fs[i];
    return os.str();
}

inline constexpr int scan_samples = 512;

} // namespace detail

/// Root of the n = 0 relation on the branch interval [m pi/L, (m+1) pi/L].
/// A root at the lower end belongs to this branch, a root at the upper end to the next.
inline RootReport solve_dispersion_n0(double L, double theta, int m) {
    detail::require(L > 0.0 && L < 1.0, "need 0 < L < 1");
    detail::require(m >= 0, "branch index m must be >= 0");
    const double lo = m * pi / L, hi = (m + 1) * pi / L;
    auto F = [&](double w) { return dispersion_n0_residual(L, theta, w); };
    const double scale = 4.0 + (1.0 - L) * hi;
    const double zero = 64.0 * std::numeric_limits<double>::epsilon() * scale;

    const int n = detail::scan_samples;
    const double h = (hi - lo) / n;
    std::vector<double> xs(n + 1), fs(n + 1);
    for (int i = 0; i <= n; ++i) {
        xs[i] = i == n ? hi : lo + i * h;
        fs[i] = F(xs[i]);
    }
    if (std::abs(fs[n]) <= zero) {
        xs[n] = hi - 0.5 * h;
        fs[n] = F(xs[n]);
    }
    RootReport report;
    int first = -1;
    for (int i = 0; i < n; ++i) {
        const bool change = (fs[i] < 0.0) != (fs[i + 1] < 0.0) && std::abs(fs[i]) > zero;
        if (change) {
            ++report.sign_changes;
            if (first < 0) first = i;
        }
    }
    if (std::abs(fs[0]) <= zero) {
        report.omega = lo;
        return report;
    }
    if (first < 0)
        throw NumericError("no sign change of the n=0 relation on branch m=" + std::to_string(m) +
                           " at theta=" + std::to_string(theta) + ":" + detail::sample_dump(xs, fs));
    report.omega = detail::bisect(F, xs[first], xs[first + 1], fs[first]);
    return report;
}

inline double dispersion_n0(double L, double theta, int m) { return solve_dispersion_n0(L, theta, m).omega; }

struct EtaRoot {
    double omega = 0.0;
    double eta = 0.0;  ///< sqrt(omega^2 + (n/r)^2)
};

/// p-th positive root of the n >= 1 relation. The scan runs on G(w)/w, which
/// is strictly negative at w = 0, and extends in steps of pi/L until found.
inline EtaRoot dispersion_n(double L, double r, int n, double theta, int p) {
    detail::require(L > 0.0 && L < 1.0, "need 0 < L < 1");
    detail::require(r > 0.0, "r must be positive");
    detail::require(n >= 1 && p >= 1, "need n >= 1 and p >= 1");
    const double kappa = n / r;
    auto G = [&](double w) { return dispersion_n_residual(L, r, n, theta, w); };
    auto H = [&](double w) {
        if (w == 0.0) {
            const double x = (1.0 - L) * kappa;
            const double ratio = x > 30.0 ? 1.0 - 2.0 * std::cos(theta) * std::exp(-x)
                                          : (std::cosh(x) - std::cos(theta)) / std::sinh(x);
            return -kappa * kappa * L - 2.0 * kappa * ratio;
        }
        return G(w) / w;
    };
    const double chunk = pi / L;
    const double h = chunk / detail::scan_samples;
    const int max_chunks = 4 * p + 64;
    int found = 0;
    double a = 0.0, fa = H(0.0);
    for (long i = 1; i <= static_cast<long>(max_chunks) * detail::scan_samples; ++i) {
        const double b = i * h;
        const double fb = H(b);
        if ((fa < 0.0) != (fb < 0.0)) {
            if (++found == p) {
                const double w = detail::bisect(H, a, b, fa);
                return {w, std::sqrt(w * w + kappa * kappa)};
            }
        }
        a = b;
        fa = fb;
    }
    throw NumericError("fewer than " + std::to_string(p) + " roots of the n=" + std::to_string(n) +
                       " relation below omega=" + std::to_string(max_chunks * chunk));
}

// ---------------------------------------------------------------------------
// Limit bands of the 2-D conformal chain

struct DispersionCurve {
    int m = -1;  ///< n = 0 branch index, or -1
    int n = 0;
    int p = 0;
    std::vector<double> thetas;
    std::vector<double> values;  ///< omega_m(theta) or eta_{n,p}(theta)
    int anomalies = 0;           ///< samples whose bracket held more than one sign change

    std::string label() const {
        return n == 0 ? "omega_" + std::to_string(m) : "eta_" + std::to_string(n) + "_" + std::to_string(p);
    }
    Interval band() const {
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        return {*lo * *lo, *hi * *hi};
    }
};

struct Limit2DBands {
    double L = 0.5, r = 1.0, lambda_max = 0.0;
    std::vector<DispersionCurve> curves;
    std::vector<Interval> bands;  ///< per curve, same order
    std::vector<Interval> gaps;   ///< complement of the union in (0, lambda_max)
};

inline DispersionCurve n0_curve(double L, int m, const std::vector<double>& thetas) {
    DispersionCurve c;
    c.m = m;
    c.thetas = thetas;
    for (double t : thetas) {
        const auto root = solve_dispersion_n0(L, t, m);
        c.values.push_back(root.omega);
        if (root.sign_changes > 1) ++c.anomalies;
    }
    return c;
}

inline DispersionCurve eta_curve(double L, double r, int n, int p, const std::vector<double>& thetas) {
    DispersionCurve c;
    c.n = n;
    c.p = p;
    c.thetas = thetas;
    for (double t : thetas) c.values.push_back(dispersion_n(L, r, n, t, p).eta);
    return c;
}

inline std::vector<double> half_zone_thetas(int T) {
    std::vector<double> out;
    for (int j = 0; j < T; ++j) out.push_back(j == T - 1 ? pi : pi * j / (T - 1));
    return out;
}

/// Bands B_m for (m pi/L)^2 <= lambda_max and B_{n,p} while inf B_{n,p} <= lambda_max.
/// For every n with (n/r)^2 <= lambda_max the first branch above the cap is
/// still recorded, so the eta floor is always visible.
inline Limit2DBands limit2d_bands(double L, double r, double lambda_max, int T) {
    detail::require(L > 0.0 && L < 1.0, "need 0 < L < 1");
    detail::require(r > 0.0, "r must be positive");
    detail::require(lambda_max > 0.0, "lambda_max must be positive");
    detail::require(T >= 9, "theta sweep needs T >= 9");
    Limit2DBands out;
    out.L = L;
    out.r = r;
    out.lambda_max = lambda_max;
    const auto thetas = half_zone_thetas(T);
    for (int m = 0; std::pow(m * pi / L, 2) <= lambda_max; ++m) out.curves.push_back(n0_curve(L, m, thetas));
    for (int n = 1; std::pow(n / r, 2) <= lambda_max; ++n) {
        for (int p = 1;; ++p) {
            out.curves.push_back(eta_curve(L, r, n, p, thetas));
            if (out.curves.back().band().lo > lambda_max) break;
        }
    }
    for (const auto& c : out.curves) out.bands.push_back(c.band());
    out.gaps = complement(out.bands, 0.0, lambda_max, 1e-6);
    return out;
}

/// Curves drawn in the square-root-of-eigenvalue plot: omega_0..omega_4 and
/// eta_{1,1} over theta in [0, 2pi].
inline std::vector<DispersionCurve> figure3_curves(double L, double r, int T) {
    detail::require(L > 0.0 && L < 1.0, "need 0 < L < 1");
    detail::require(r > 0.0, "r must be positive");
    detail::require(T >= 9, "theta sweep needs T >= 9");
    std::vector<double> thetas;
    for (int j = 0; j < T; ++j) thetas.push_back(j == T - 1 ? 2.0 * pi : 2.0 * pi * j / (T - 1));
    std::vector<DispersionCurve> curves;
    for (int m = 0; m <= 4; ++m) curves.push_back(n0_curve(L, m, thetas));
    curves.push_back(eta_curve(L, r, 1, 1, thetas));
    return curves;
}

struct GapCertificate {
    double L = 0.0, r = 0.0;
    int m = 1;
    double condition = 0.0;  ///< L / (m pi)
    bool certified = false;
};

/// At least m gaps are guaranteed when r <= L / (m pi).
inline GapCertificate gap_certificate(double L, double r, int m) {
    detail::require(m >= 1, "m must be >= 1");
    detail::require(L > 0.0 && r > 0.0, "L and r must be positive");
    const double condition = L / (m * pi);
    return {L, r, m, condition, r <= condition};
}

} // namespace bandgap
