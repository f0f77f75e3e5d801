#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <variant>

#include "graph.hpp"

namespace lrharm {

struct LocalRange {
    int range = 1;
};
struct AlgebraicDecay {
    double c0 = 1.0;
    double eta = 2.0;
};
struct Unconstrained {};
using Locality = std::variant<LocalRange, AlgebraicDecay, Unconstrained>;

// Position/momentum coupling matrices of the quadratic Hamiltonian
// H = (1/2) sum_ij (x_i X_ij x_j + p_i P_ij p_j).
// Symmetry is exact: builders mirror the upper triangle bit-for-bit.
struct CouplingPair {
    Eigen::MatrixXd X, P;
    Locality locality = Unconstrained{};

    int size() const { return static_cast<int>(X.rows()); }

    bool p_is_identity() const {
        const int n = size();
        if (P.rows() != n || P.cols() != n) return false;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (P(i, j) != (i == j ? 1.0 : 0.0)) return false;
        return true;
    }

    const LocalRange* local_range() const { return std::get_if<LocalRange>(&locality); }
    const AlgebraicDecay* algebraic() const { return std::get_if<AlgebraicDecay>(&locality); }
};

namespace detail {
inline void mirror_upper(Eigen::MatrixXd& m) {
    for (int j = 0; j < m.cols(); ++j)
        for (int i = j + 1; i < m.rows(); ++i) m(i, j) = m(j, i);
}

inline void require_square(const Eigen::MatrixXd& m, int n, const char* who) {
    if (m.rows() != n || m.cols() != n)
        throw std::invalid_argument(std::string(who) + ": matrix size must match graph size");
}

inline void require_symmetric(const Eigen::MatrixXd& m, const char* who) {
    for (int j = 0; j < m.cols(); ++j)
        for (int i = j + 1; i < m.rows(); ++i)
            if (m(i, j) != m(j, i))
                throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
}
}  // namespace detail

// True iff every entry beyond graph distance range is exactly zero
// (unreachable pairs count as beyond any range).
inline bool validate_locality(const Graph& g, const Eigen::MatrixXd& m, int range) {
    if (range < 1) throw std::invalid_argument("validate_locality: range must be >= 1");
    detail::require_square(m, g.size(), "validate_locality");
    for (int j = 0; j < g.size(); ++j)
        for (int i = 0; i < g.size(); ++i) {
            const int d = g.dist(i, j);
            if ((d == kUnreachable || d > range) && m(i, j) != 0.0) return false;
        }
    return true;
}

// True iff |m_ij| <= c0 / (1 + dist(i,j))^eta everywhere; unreachable pairs
// must be exactly zero.
inline bool validate_algebraic_decay(const Graph& g, const Eigen::MatrixXd& m, double c0,
                                     double eta) {
    if (!(c0 > 0.0)) throw std::invalid_argument("validate_algebraic_decay: c0 must be > 0");
    if (!(eta > 0.0)) throw std::invalid_argument("validate_algebraic_decay: eta must be > 0");
    detail::require_square(m, g.size(), "validate_algebraic_decay");
    for (int j = 0; j < g.size(); ++j)
        for (int i = 0; i < g.size(); ++i) {
            const int d = g.dist(i, j);
            if (d == kUnreachable) {
                if (m(i, j) != 0.0) return false;
            } else if (std::abs(m(i, j)) > c0 * std::pow(1.0 + d, -eta)) {
                return false;
            }
        }
    return true;
}

// X = (omega^2 + 2 kappa) I - kappa * adjacency, P = I, LocalRange(1).
inline CouplingPair spring_chain(const Graph& g, double omega, double kappa) {
    const int n = g.size();
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) x(i, i) = omega * omega + 2.0 * kappa;
    for (const auto& [u, v] : g.edges()) {
        x(u, v) = -kappa;
        x(v, u) = -kappa;
    }
    return CouplingPair{std::move(x), Eigen::MatrixXd::Identity(n, n), LocalRange{1}};
}

// X_ij = sign(dist) * c0 / (1 + dist(i,j))^eta; unreachable pairs get 0.
// alternating flips the sign with the parity of the distance. The decay claim
// covers P as well, so identity momentum couplings (|P_ii| = 1) are only
// admissible when c0 >= 1; otherwise P inherits the X profile.
inline CouplingPair algebraic_couplings(const Graph& g, double c0, double eta, bool alternating,
                                        bool p_identity) {
    if (!(c0 > 0.0)) throw std::invalid_argument("algebraic_couplings: c0 must be > 0");
    if (!(eta > 0.0)) throw std::invalid_argument("algebraic_couplings: eta must be > 0");
    if (p_identity && c0 < 1.0)
        throw std::invalid_argument(
            "algebraic_couplings: identity momentum violates the decay claim for c0 < 1");
    const int n = g.size();
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= j; ++i) {
            const int d = g.dist(i, j);
            if (d == kUnreachable) continue;
            double v = c0 * std::pow(1.0 + d, -eta);
            if (alternating && (d % 2 == 1)) v = -v;
            x(i, j) = v;
        }
    detail::mirror_upper(x);
    Eigen::MatrixXd p;
    if (p_identity) {
        p = Eigen::MatrixXd::Identity(n, n);
    } else {
        p = x;
    }
    return CouplingPair{std::move(x), std::move(p), AlgebraicDecay{c0, eta}};
}

// Validates symmetry exactly and the locality claim against the graph.
inline CouplingPair explicit_couplings(const Graph& g, Eigen::MatrixXd x, Eigen::MatrixXd p,
                                       Locality claim) {
    detail::require_square(x, g.size(), "explicit_couplings(X)");
    detail::require_square(p, g.size(), "explicit_couplings(P)");
    detail::require_symmetric(x, "explicit_couplings(X)");
    detail::require_symmetric(p, "explicit_couplings(P)");
    if (const auto* lr = std::get_if<LocalRange>(&claim)) {
        if (!validate_locality(g, x, lr->range) || !validate_locality(g, p, lr->range))
            throw std::invalid_argument("explicit_couplings: entries violate the claimed range");
    } else if (const auto* ad = std::get_if<AlgebraicDecay>(&claim)) {
        if (!validate_algebraic_decay(g, x, ad->c0, ad->eta) ||
            !validate_algebraic_decay(g, p, ad->c0, ad->eta))
            throw std::invalid_argument(
                "explicit_couplings: entries violate the claimed algebraic decay");
    }
    return CouplingPair{std::move(x), std::move(p), claim};
}

// Uniform entries in [-scale, scale] on pairs with dist <= range, zero beyond;
// deterministic in the seed. P gets an independent draw unless p_identity.
inline CouplingPair random_local_couplings(const Graph& g, int range, std::uint64_t seed,
                                           bool p_identity, double scale = 1.0) {
    if (range < 1) throw std::invalid_argument("random_local_couplings: range must be >= 1");
    const int n = g.size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-scale, scale);
    auto draw = [&]() {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i <= j; ++i) {
                const int d = g.dist(i, j);
                if (d != kUnreachable && d <= range) m(i, j) = uni(rng);
            }
        detail::mirror_upper(m);
        return m;
    };
    Eigen::MatrixXd x = draw();
    Eigen::MatrixXd p = p_identity ? Eigen::MatrixXd::Identity(n, n) : draw();
    return CouplingPair{std::move(x), std::move(p), LocalRange{range}};
}

// Largest |eigenvalue| of a symmetric matrix.
inline double spectral_norm_symmetric(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("spectral_norm_symmetric: eigendecomposition failed");
    const auto& ev = es.eigenvalues();
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

// Largest singular value of A*B, via the symmetric eigendecomposition of
// (AB)(AB)^T. Exact for the needed norm without a general SVD.
inline double product_spectral_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() == 0) return 0.0;
    const Eigen::MatrixXd m = a * b;
    Eigen::MatrixXd s = m * m.transpose();
    s = (0.5 * (s + s.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("product_spectral_norm: eigendecomposition failed");
    const double lam = es.eigenvalues().maxCoeff();
    return std::sqrt(std::max(lam, 0.0));
}

// tau(t) = tau_rate * |t| drives every series and bound; the cone speeds need
// LocalRange metadata (and P = identity for the improved one).
struct DerivedScales {
    double norm_x = 0.0, norm_p = 0.0, norm_xp = 0.0, norm_px = 0.0;
    double tau_rate = 0.0;
    double tau = 0.0;
    std::optional<double> speed_of_light;
    std::optional<double> speed_of_light_p1;

    double tau_at(double t) const { return tau_rate * std::abs(t); }
};

inline DerivedScales spectral_norms(const CouplingPair& cp) {
    DerivedScales s;
    s.norm_x = spectral_norm_symmetric(cp.X);
    s.norm_p = spectral_norm_symmetric(cp.P);
    s.norm_px = product_spectral_norm(cp.P, cp.X);
    s.norm_xp = product_spectral_norm(cp.X, cp.P);
    s.tau_rate = std::max(std::sqrt(s.norm_px), std::sqrt(s.norm_xp));
    return s;
}

inline DerivedScales derived_scales(const CouplingPair& cp, double t) {
    DerivedScales s = spectral_norms(cp);
    s.tau = s.tau_rate * std::abs(t);
    if (const auto* lr = cp.local_range()) {
        s.speed_of_light = std::numbers::e_v<double> * lr->range * s.tau_rate;
        if (cp.p_is_identity())
            s.speed_of_light_p1 =
                std::numbers::e_v<double> * lr->range * std::sqrt(s.norm_x) / 2.0;
    }
    return s;
}

}  // namespace lrharm
