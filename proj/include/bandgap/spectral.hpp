#pragma once

// Conforming P1 finite elements for a SturmLiouvilleProblem and a dense
// Hermitian generalized eigensolver for the resulting pencil.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "bandgap/error.hpp"
#include "bandgap/reduction.hpp"

namespace bandgap {

using Complex = std::complex<double>;

/// Discrete stiffness/mass pair. Quasi-periodic problems identify the last
/// node with e^{i theta} times the first, which puts phased corner entries
/// into both matrices.
struct HermitianPencil {
    Eigen::MatrixXcd stiffness;
    Eigen::MatrixXcd mass;
    bool real_valued = true;

    Eigen::Index size() const { return stiffness.rows(); }
};

namespace detail {

// Global unknown of node j and the phase it carries; index < 0 means eliminated.
struct NodeMap {
    Eigen::Index index;
    Complex phase;
};

inline NodeMap map_node(std::size_t j, std::size_t last, const BoundaryCondition& bc) {
    if (bc.quasi_periodic) {
        if (j == last) return {0, std::polar(1.0, bc.theta)};
        return {static_cast<Eigen::Index>(j), 1.0};
    }
    const bool drop_left = bc.left == EndCondition::dirichlet;
    if (j == 0 && drop_left) return {-1, 0.0};
    if (j == last && bc.right == EndCondition::dirichlet) return {-1, 0.0};
    return {static_cast<Eigen::Index>(j) - (drop_left ? 1 : 0), 1.0};
}

inline Eigen::Index unknown_count(std::size_t nodes, const BoundaryCondition& bc) {
    auto n = static_cast<Eigen::Index>(nodes);
    if (bc.quasi_periodic) return n - 1;
    if (bc.left == EndCondition::dirichlet) --n;
    if (bc.right == EndCondition::dirichlet) --n;
    return n;
}

// Sparse Cholesky in natural order: a cyclic tridiagonal matrix only fills the last row.
template <typename Matrix>
using SparseFactor = Eigen::SimplicialLLT<Eigen::SparseMatrix<typename Matrix::Scalar>, Eigen::Lower,
                                          Eigen::NaturalOrdering<int>>;

template <typename Matrix>
bool banded_cholesky_ok(const Matrix& m) {
    const Eigen::SparseMatrix<typename Matrix::Scalar> s = m.sparseView();
    SparseFactor<Matrix> llt(s);
    return llt.info() == Eigen::Success;
}

inline bool is_real_phase(double theta) {
    const double s = std::sin(theta);
    return std::abs(s) <= 1e-15;
}

} // namespace detail

/// Assembles A_ij = int p phi_i' phi_j' + q phi_i phi_j and B_ij = int m phi_i phi_j
/// with element coefficients taken as the average of the nodal values.
inline HermitianPencil assemble(const SturmLiouvilleProblem& slp) {
    validate(slp);
    const auto nodes = slp.grid.size();
    const auto last = nodes - 1;
    const auto n = detail::unknown_count(nodes, slp.bc);
    detail::require(n >= 3, "discretization needs at least 3 unknowns");

    HermitianPencil pencil;
    pencil.stiffness = Eigen::MatrixXcd::Zero(n, n);
    pencil.mass = Eigen::MatrixXcd::Zero(n, n);
    pencil.real_valued = !slp.bc.quasi_periodic || detail::is_real_phase(slp.bc.theta);

    for (std::size_t e = 0; e < last; ++e) {
        const double h = slp.grid[e + 1] - slp.grid[e];
        const double p = 0.5 * (slp.stiffness[e] + slp.stiffness[e + 1]);
        const double q = 0.5 * (slp.potential[e] + slp.potential[e + 1]);
        const double m = 0.5 * (slp.mass[e] + slp.mass[e + 1]);
        const double k_diag = p / h + q * h / 3.0;
        const double k_off = -p / h + q * h / 6.0;
        const double m_diag = m * h / 3.0;
        const double m_off = m * h / 6.0;
        const detail::NodeMap ends[2] = {detail::map_node(e, last, slp.bc), detail::map_node(e + 1, last, slp.bc)};
        for (int a = 0; a < 2; ++a) {
            if (ends[a].index < 0) continue;
            for (int b = 0; b < 2; ++b) {
                if (ends[b].index < 0) continue;
                const Complex phase = std::conj(ends[a].phase) * ends[b].phase;
                const bool diag = a == b;
                pencil.stiffness(ends[a].index, ends[b].index) += phase * (diag ? k_diag : k_off);
                pencil.mass(ends[a].index, ends[b].index) += phase * (diag ? m_diag : m_off);
            }
        }
    }
    if (pencil.real_valued) {
        pencil.stiffness = pencil.stiffness.real().cast<Complex>();
        pencil.mass = pencil.mass.real().cast<Complex>();
    }
    if (!detail::banded_cholesky_ok(pencil.mass)) throw NumericError("mass matrix is not positive definite");
    return pencil;
}

struct EigenResult {
    std::vector<double> values;    ///< ascending, with multiplicity
    Eigen::MatrixXcd vectors;      ///< columns B-orthonormal; empty unless requested
    std::vector<double> residuals; ///< normwise backward error per computed pair
};

struct SolveOptions {
    bool vectors = false;
    double shift = 1.0;  ///< sigma of the shifted pencil (A + sigma B, B)
};

namespace detail {

// Reduces B v = mu (A + sigma B) v with K = A + sigma B = L L^H to the standard
// Hermitian problem L^{-1} B L^{-H} w = mu w; lambda = 1/mu - sigma.
template <typename Matrix>
EigenResult solve_shifted(const Matrix& A, const Matrix& B, Eigen::Index k, const SolveOptions& opt) {
    const Eigen::Index n = A.rows();
    using Sparse = Eigen::SparseMatrix<typename Matrix::Scalar>;
    const Sparse K = Matrix(A + opt.shift * B).sparseView();
    SparseFactor<Matrix> llt(K);
    if (llt.info() != Eigen::Success) throw NumericError("Cholesky factorization of the shifted pencil failed");
    const Sparse Lm = llt.matrixL();
    const auto L = Lm.template triangularView<Eigen::Lower>();
    Matrix Y = L.solve(B);
    Matrix C = L.solve(Matrix(Y.adjoint()));
    C = (0.5 * (C + C.adjoint())).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> eig(C, opt.vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw NumericError("Hermitian eigen-decomposition did not converge");

    EigenResult result;
    result.values.resize(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) {
        const double mu = eig.eigenvalues()(n - 1 - i);
        result.values[static_cast<std::size_t>(i)] =
            mu > 0.0 ? 1.0 / mu - opt.shift : std::numeric_limits<double>::infinity();
    }
    if (!opt.vectors) return result;

    const double a_norm = A.norm();
    const double b_norm = B.norm();
    const Sparse U = Lm.adjoint();
    result.vectors.resize(n, k);
    result.residuals.resize(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) {
        using Vector = Eigen::Matrix<typename Matrix::Scalar, Eigen::Dynamic, 1>;
        Vector w = eig.eigenvectors().col(n - 1 - i);
        Vector v = U.template triangularView<Eigen::Upper>().solve(w);
        const double bnorm = std::sqrt(std::abs(Complex(v.dot(B * v))));
        v /= bnorm;
        const double lambda = result.values[static_cast<std::size_t>(i)];
        const Vector r = A * v - lambda * (B * v);
        result.residuals[static_cast<std::size_t>(i)] = r.norm() / ((a_norm + std::abs(lambda) * b_norm) * v.norm());
        result.vectors.col(i) = v.template cast<Complex>();
    }
    return result;
}

} // namespace detail

/// Lowest k eigenpairs of the pencil (min-max values of the discrete form).
inline EigenResult solve(const HermitianPencil& pencil, Eigen::Index k, const SolveOptions& opt = {}) {
    const Eigen::Index n = pencil.size();
    if (k < 1 || k > n)
        throw DomainError("requested " + std::to_string(k) + " eigenvalues of a size-" + std::to_string(n) + " pencil");
    if (pencil.real_valued) {
        const Eigen::MatrixXd A = pencil.stiffness.real();
        const Eigen::MatrixXd B = pencil.mass.real();
        return detail::solve_shifted(A, B, k, opt);
    }
    return detail::solve_shifted(pencil.stiffness, pencil.mass, k, opt);
}

inline EigenResult solve_all(const HermitianPencil& pencil, const SolveOptions& opt = {}) {
    return solve(pencil, pencil.size(), opt);
}

// ---------------------------------------------------------------------------
// Discretization verification

struct RefinementLevel {
    double h;
    double value;
};

struct ConvergenceReport {
    std::vector<double> errors;
    std::vector<double> pairwise_orders;  ///< log(e_i/e_{i+1}) / log(h_i/h_{i+1})
    double order = std::numeric_limits<double>::quiet_NaN();  ///< least-squares slope of log e vs log h
    double richardson_order = std::numeric_limits<double>::quiet_NaN();  ///< from the last three values only
    bool exact = false;  ///< every error below the zero tolerance; no order defined
};

/// Measured convergence order of an eigenvalue sequence against a known exact value.
/// Levels must be ordered from coarse to fine.
inline ConvergenceReport convergence_order(std::span<const RefinementLevel> levels, double exact,
                                           double zero_tolerance = 1e-10) {
    detail::require(levels.size() >= 3, "convergence order needs at least 3 refinement levels");
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        detail::require(levels[i + 1].h < levels[i].h, "refinement levels must go from coarse to fine");
    ConvergenceReport report;
    for (const auto& level : levels) report.errors.push_back(std::abs(level.value - exact));
    const double scale = std::max(1.0, std::abs(exact));
    if (std::all_of(report.errors.begin(), report.errors.end(),
                    [&](double e) { return e <= zero_tolerance * scale; })) {
        report.exact = true;
        return report;
    }
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        if (!(report.errors[i + 1] < report.errors[i]))
            throw NumericError("eigenvalue errors are not monotone under refinement (level " + std::to_string(i + 1) + ")");
        report.pairwise_orders.push_back(std::log(report.errors[i] / report.errors[i + 1]) /
                                         std::log(levels[i].h / levels[i + 1].h));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double x = std::log(levels[i].h), y = std::log(report.errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    report.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    const auto m = levels.size();
    const double d1 = levels[m - 3].value - levels[m - 2].value;
    const double d2 = levels[m - 2].value - levels[m - 1].value;
    if (d1 != 0.0 && d2 != 0.0 && d1 / d2 > 0.0)
        report.richardson_order = std::log(d1 / d2) / std::log(levels[m - 3].h / levels[m - 2].h);
    return report;
}

} // namespace bandgap
