#pragma once

// Shared helpers for the test suite: diff utilities and a deterministic
// generator of random lattice instances used by the dual-path and dominance
// checks.

#include <cstdint>
#include <random>
#include <vector>

#include <lrharm/couplings.hpp>
#include <lrharm/graph.hpp>

namespace testsupport {

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// Bit-for-bit matrix equality (0.0 == -0.0 is fine; any NaN breaks it).
inline bool exact_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (long j = 0; j < a.cols(); ++j)
        for (long i = 0; i < a.rows(); ++i)
            if (a(i, j) != b(i, j)) return false;
    return true;
}

struct Instance {
    lrharm::Graph g;
    lrharm::CouplingPair cp;
    double t = 0.0;
    int dim = 1;  // profile dimension of the underlying lattice
};

// Deterministic stream of random local-coupling instances over paths, rings,
// and 2D tori with n <= max_n, scaled so the spectral tau stays below tau_cap.
inline std::vector<Instance> random_instances(int count, std::uint64_t seed, int max_n,
                                              double tau_cap, bool p_identity) {
    std::mt19937_64 rng(seed);
    std::vector<Instance> out;
    out.reserve(static_cast<size_t>(count));
    for (int k = 0; k < count; ++k) {
        const int topo = static_cast<int>(rng() % 3);
        int dim = 1;
        lrharm::Graph g = [&]() -> lrharm::Graph {
            if (topo == 0) {
                const int n = 2 + static_cast<int>(rng() % static_cast<unsigned>(max_n - 1));
                return lrharm::path_graph(n);
            }
            if (topo == 1) {
                const int n = 3 + static_cast<int>(rng() % static_cast<unsigned>(max_n - 2));
                return lrharm::ring_graph(n);
            }
            dim = 2;
            int side_max = 3;
            while ((side_max + 1) * (side_max + 1) <= max_n) ++side_max;
            const int side =
                3 + static_cast<int>(rng() % static_cast<unsigned>(side_max - 2));
            return lrharm::cubic_graph(side, 2, true);
        }();
        const int range = 1 + static_cast<int>(rng() % 2);
        lrharm::CouplingPair cp =
            lrharm::random_local_couplings(g, range, rng(), p_identity, 1.0);
        const lrharm::DerivedScales s = lrharm::spectral_norms(cp);
        std::uniform_real_distribution<double> tau_pick(0.2, tau_cap);
        const double tau = tau_pick(rng);
        const double t = s.tau_rate > 0.0 ? tau / s.tau_rate : 0.25;
        out.push_back(Instance{std::move(g), std::move(cp), t, dim});
    }
    return out;
}

}  // namespace testsupport
