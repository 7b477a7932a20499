#pragma once

// Finite-dimensional form of the min-max comparison lemma.
//
// Given pencils (Q, G) on C^N and (Q', G') on C^N' and a transfer map Phi,
// the k-th eigenvalues obey lambda'_k <= lambda_k + delta_k where
//     delta'_k  = k max_{i,j<=k} |delta_ij - <Phi phi_i, Phi phi_j>_{G'}|
//                 (or 0 when |Phi u|_{G'} >= |u|_G on span(phi_1..phi_k)),
//     delta''_k = max(0, top eigenvalue of (Phi^* Q' Phi - Q) on span(phi_1..phi_k)),
//     delta_k   = (c_k delta'_k + delta''_k) / (1 - delta'_k),
// provided delta'_k < 1 and lambda_k <= c_k.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bandgap/error.hpp"

namespace bandgap {

struct MinmaxInstance {
    Eigen::MatrixXcd Q, G;    ///< form and norm on the first space
    Eigen::MatrixXcd Qp, Gp;  ///< form and norm on the second space
    Eigen::MatrixXcd Phi;     ///< N' x N transfer map
    std::vector<double> caps; ///< c_k for k = 1..K
};

enum class Verdict { holds, violated, not_applicable };

inline std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::violated: return "violated";
    case Verdict::not_applicable: return "not-applicable";
    }
    return "not-applicable";
}

struct MinmaxReport {
    std::vector<double> lambda, lambda_prime;
    std::vector<double> delta_norm;   ///< delta'_k
    std::vector<double> delta_form;   ///< delta''_k
    std::vector<double> delta;        ///< delta_k (infinite when delta'_k >= 1)
    std::vector<bool> norm_increasing;  ///< second alternative of the norm condition on L_k
    std::vector<bool> norm_ok;          ///< delta'_k < 1
    std::vector<bool> cap_ok;           ///< lambda_k <= c_k
    std::vector<Verdict> verdict;

    std::size_t size() const { return verdict.size(); }
    bool all_hold() const {
        return std::all_of(verdict.begin(), verdict.end(), [](Verdict v) { return v == Verdict::holds; });
    }
};

namespace detail {

inline bool is_psd(const Eigen::MatrixXcd& m, double tol) {
    if (m.rows() == 0) return true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() >= -tol;
}

inline void check_instance(const MinmaxInstance& in) {
    require(in.Q.rows() == in.Q.cols() && in.G.rows() == in.Q.rows(), "Q and G must be square and equal size");
    require(in.Qp.rows() == in.Qp.cols() && in.Gp.rows() == in.Qp.rows(), "Q' and G' must be square and equal size");
    require(in.Phi.rows() == in.Qp.rows() && in.Phi.cols() == in.Q.rows(), "Phi must map C^N to C^N'");
    require(!in.caps.empty(), "need at least one eigenvalue cap");
    require(static_cast<Eigen::Index>(in.caps.size()) <= std::min(in.Q.rows(), in.Qp.rows()),
            "more caps than eigenvalues");
    auto hermitian = [](const Eigen::MatrixXcd& m) {
        return (m - m.adjoint()).norm() <= 1e-12 * std::max(1.0, m.norm());
    };
    require(hermitian(in.Q) && hermitian(in.G) && hermitian(in.Qp) && hermitian(in.Gp),
            "forms and norms must be Hermitian");
    require(Eigen::LLT<Eigen::MatrixXcd>(in.G).info() == Eigen::Success, "G must be positive definite");
    require(Eigen::LLT<Eigen::MatrixXcd>(in.Gp).info() == Eigen::Success, "G' must be positive definite");
}

} // namespace detail

inline MinmaxReport minmax_compare(const MinmaxInstance& in) {
    detail::check_instance(in);
    const auto K = static_cast<Eigen::Index>(in.caps.size());

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> first(in.Q, in.G);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> second(in.Qp, in.Gp, Eigen::EigenvaluesOnly);
    if (first.info() != Eigen::Success || second.info() != Eigen::Success)
        throw NumericError("eigen-decomposition of a comparison pencil failed");
    const Eigen::MatrixXcd& V = first.eigenvectors();  // G-orthonormal columns

    const Eigen::MatrixXcd PV = in.Phi * V.leftCols(K);
    const Eigen::MatrixXcd gram = PV.adjoint() * in.Gp * PV;
    const Eigen::MatrixXcd excess = PV.adjoint() * in.Qp * PV - V.leftCols(K).adjoint() * in.Q * V.leftCols(K);
    const double gram_tol = 1e-12 * std::max(1.0, gram.norm());

    MinmaxReport rep;
    for (Eigen::Index k = 1; k <= K; ++k) {
        const double lam = first.eigenvalues()(k - 1);
        const double lamp = second.eigenvalues()(k - 1);
        const double ck = in.caps[static_cast<std::size_t>(k - 1)];
        const Eigen::MatrixXcd M = gram.topLeftCorner(k, k);
        const Eigen::MatrixXcd D = Eigen::MatrixXcd::Identity(k, k) - M;

        const bool increasing = detail::is_psd(-D, gram_tol);
        const double d1 = increasing ? 0.0 : static_cast<double>(k) * D.cwiseAbs().maxCoeff();
        Eigen::MatrixXcd E = excess.topLeftCorner(k, k);
        E = (0.5 * (E + E.adjoint())).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> top(E, Eigen::EigenvaluesOnly);
        const double d2 = std::max(0.0, top.eigenvalues().maxCoeff());

        rep.lambda.push_back(lam);
        rep.lambda_prime.push_back(lamp);
        rep.delta_norm.push_back(d1);
        rep.delta_form.push_back(d2);
        rep.norm_increasing.push_back(increasing);
        rep.norm_ok.push_back(d1 < 1.0);
        rep.cap_ok.push_back(lam <= ck);
        if (!(d1 < 1.0) || !(lam <= ck)) {
            rep.delta.push_back(std::numeric_limits<double>::infinity());
            rep.verdict.push_back(Verdict::not_applicable);
            continue;
        }
        const double dk = (ck * d1 + d2) / (1.0 - d1);
        rep.delta.push_back(dk);
        // roundoff allowance scaled by the magnitudes involved
        const double slack = 1e-10 * (1.0 + std::abs(lam) + std::abs(lamp) + dk);
        rep.verdict.push_back(lamp <= lam + dk + slack ? Verdict::holds : Verdict::violated);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Randomized self-test

enum class InstanceFamily { isometric, perturbed, norm_increasing };

inline std::string_view to_string(InstanceFamily f) {
    switch (f) {
    case InstanceFamily::isometric: return "isometric";
    case InstanceFamily::perturbed: return "perturbed";
    case InstanceFamily::norm_increasing: return "norm-increasing";
    }
    return "isometric";
}

struct SelftestCase {
    InstanceFamily family;
    int attempts = 1;            ///< draws until the hypotheses held
    MinmaxReport report;
    double oracle_discrepancy = 0.0;  ///< max |lambda'_k - oracle| over k
};

struct SelftestSummary {
    std::uint64_t seed = 0;
    int instances = 0;
    long pairs_checked = 0;   ///< (instance, k) pairs with a verdict
    long holds = 0;
    long violated = 0;
    long not_applicable = 0;
    double max_oracle_discrepancy = 0.0;
    double max_delta_norm = 0.0;
    double max_delta_form = 0.0;
    std::vector<SelftestCase> cases;

    bool passed() const { return violated == 0 && not_applicable == 0 && holds == pairs_checked; }
};

namespace detail {

class InstanceGenerator {
public:
    explicit InstanceGenerator(std::uint64_t seed) : rng_(seed) {}

    MinmaxInstance draw(InstanceFamily family) {
        std::uniform_int_distribution<int> dim(3, 9);
        const int n = dim(rng_);
        std::uniform_int_distribution<int> extra(0, 5);
        const int np = n + extra(rng_);
        std::uniform_int_distribution<int> kdist(1, n);
        const int K = kdist(rng_);

        const Eigen::MatrixXcd G = spd(n);
        const Eigen::MatrixXcd Gp = spd(np);
        const Eigen::MatrixXcd Q = psd(n, rank(n));
        // G = R^* R, G' = R'^* R'
        const Eigen::MatrixXcd R = Eigen::LLT<Eigen::MatrixXcd>(G).matrixU();
        const Eigen::MatrixXcd Rp = Eigen::LLT<Eigen::MatrixXcd>(Gp).matrixU();
        const Eigen::MatrixXcd W = orthonormal_columns(np, n);
        const Eigen::MatrixXcd Pperp = Eigen::MatrixXcd::Identity(np, np) - W * W.adjoint();
        const Eigen::MatrixXcd S = R.adjoint().triangularView<Eigen::Lower>().solve(
            Eigen::MatrixXcd(R.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(Q)));
        const Eigen::MatrixXcd C = Pperp * psd(np, np) * Pperp;

        Eigen::MatrixXcd T = Eigen::MatrixXcd::Identity(n, n);
        Eigen::MatrixXcd inner = S;
        if (family == InstanceFamily::norm_increasing) {
            // |T z| >= |z|, and the form is pulled back through T^{-1}
            T += 0.5 * uniform() * psd(n, n) / static_cast<double>(n);
            const Eigen::MatrixXcd Tinv = T.inverse();
            inner = Tinv.adjoint() * S * Tinv;
        }
        Eigen::MatrixXcd Phi = Rp.triangularView<Eigen::Upper>().solve(Eigen::MatrixXcd(W * T * R));

        // q'(Phi u) = q(u) - t q(u): a negative semidefinite correction
        const double shrink = family == InstanceFamily::perturbed ? 0.0 : 0.3 * uniform();
        Eigen::MatrixXcd core = W * ((1.0 - shrink) * inner) * W.adjoint() + C;
        if (family == InstanceFamily::perturbed) {
            const double size = 1e-3 + 0.05 * uniform();
            Phi += size * random(np, n) * (Phi.norm() / std::sqrt(static_cast<double>(np * n)));
            core += size * psd(np, np) * (1.0 + S.norm()) / static_cast<double>(np);
        }
        Eigen::MatrixXcd Qp = Rp.adjoint() * core * Rp;
        Qp = (0.5 * (Qp + Qp.adjoint())).eval();

        MinmaxInstance in{Q, G, Qp, Gp, Phi, {}};
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> eig(Q, G, Eigen::EigenvaluesOnly);
        for (int k = 0; k < K; ++k) in.caps.push_back(eig.eigenvalues()(k) * (1.0 + uniform()) + uniform());
        return in;
    }

private:
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

    int rank(int n) {
        // mostly full rank, sometimes deficient so that Q has a kernel
        std::uniform_int_distribution<int> pick(1, n);
        return uniform() < 0.7 ? n : pick(rng_);
    }

    Eigen::MatrixXcd random(int rows, int cols) {
        std::normal_distribution<double> g;
        Eigen::MatrixXcd m(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) m(i, j) = {g(rng_), g(rng_)};
        return m;
    }

    Eigen::MatrixXcd psd(int n, int r) {
        const Eigen::MatrixXcd X = random(n, r);
        Eigen::MatrixXcd m = X * X.adjoint() / static_cast<double>(r);
        return 0.5 * (m + m.adjoint());
    }

    Eigen::MatrixXcd spd(int n) {
        return psd(n, n) + (0.1 + uniform()) * Eigen::MatrixXcd::Identity(n, n);
    }

    Eigen::MatrixXcd orthonormal_columns(int rows, int cols) {
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random(rows, cols));
        return qr.householderQ() * Eigen::MatrixXcd::Identity(rows, cols);
    }

    std::mt19937_64 rng_;
};

// Eigenvalues of G^{-1/2} Q G^{-1/2} through the spectral square root of G;
// independent of the Cholesky route used by minmax_compare.
inline Eigen::VectorXd oracle_eigenvalues(const Eigen::MatrixXcd& Q, const Eigen::MatrixXcd& G) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> g(G);
    const Eigen::VectorXd inv_sqrt = g.eigenvalues().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXcd W = g.eigenvectors() * inv_sqrt.cast<std::complex<double>>().asDiagonal() *
                               g.eigenvectors().adjoint();
    Eigen::MatrixXcd A = W * Q * W;
    A = (0.5 * (A + A.adjoint())).eval();
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(A, Eigen::EigenvaluesOnly).eigenvalues();
}

} // namespace detail

/// Runs `instances` random comparisons cycling through the three families.
/// Draws whose hypotheses fail (delta' >= 1 or lambda_k > c_k) are discarded
/// and redrawn, so every reported pair is one the lemma covers.
inline SelftestSummary minmax_selftest(std::uint64_t seed, int instances = 200) {
    detail::require(instances >= 1, "instances must be >= 1");
    detail::InstanceGenerator gen(seed);
    SelftestSummary summary;
    summary.seed = seed;
    summary.instances = instances;
    constexpr InstanceFamily families[] = {InstanceFamily::isometric, InstanceFamily::perturbed,
                                           InstanceFamily::norm_increasing};
    for (int i = 0; i < instances; ++i) {
        const auto family = families[i % 3];
        SelftestCase c{family, 0, {}, 0.0};
        MinmaxInstance in;
        for (;;) {
            ++c.attempts;
            if (c.attempts > 1000) throw NumericError("self-test generator could not satisfy the hypotheses");
            in = gen.draw(family);
            c.report = minmax_compare(in);
            const bool ok = std::all_of(c.report.verdict.begin(), c.report.verdict.end(),
                                        [](Verdict v) { return v != Verdict::not_applicable; });
            if (ok) break;
        }
        const auto oracle = detail::oracle_eigenvalues(in.Qp, in.Gp);
        for (std::size_t k = 0; k < c.report.size(); ++k) {
            const double diff = std::abs(c.report.lambda_prime[k] - oracle(static_cast<Eigen::Index>(k)));
            c.oracle_discrepancy = std::max(c.oracle_discrepancy, diff / (1.0 + std::abs(oracle(static_cast<Eigen::Index>(k)))));
            ++summary.pairs_checked;
            switch (c.report.verdict[k]) {
            case Verdict::holds: ++summary.holds; break;
            case Verdict::violated: ++summary.violated; break;
            case Verdict::not_applicable: ++summary.not_applicable; break;
            }
            summary.max_delta_norm = std::max(summary.max_delta_norm, c.report.delta_norm[k]);
            summary.max_delta_form = std::max(summary.max_delta_form, c.report.delta_form[k]);
        }
        summary.max_oracle_discrepancy = std::max(summary.max_oracle_discrepancy, c.oracle_discrepancy);
        summary.cases.push_back(std::move(c));
    }
    return summary;
}

} // namespace bandgap
