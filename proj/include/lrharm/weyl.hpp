#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "bounds.hpp"
#include "dynamics.hpp"
#include "graph.hpp"

namespace lrharm {

// Weyl operator W = exp(i sum_{i in support} (p_i x-hat_i - x_i p-hat_i)) with
// xi = (x_1..x_m, p_1..p_m); norm is the Euclidean length of xi.
struct WeylDescriptor {
    SiteSet support;
    Eigen::VectorXd xi;
    double norm = 0.0;

    WeylDescriptor(SiteSet s, Eigen::VectorXd v) : support(std::move(s)), xi(std::move(v)) {
        if (xi.size() != 2 * static_cast<long>(support.size()))
            throw std::invalid_argument("WeylDescriptor: xi must have length 2|support|");
        norm = xi.norm();
    }

    int sites() const { return support.size(); }
    double x_part(int k) const { return xi(k); }
    double p_part(int k) const { return xi(sites() + k); }
};

namespace detail {
inline void check_weyl_support(const WeylDescriptor& w, const KernelSet& ker, const char* who) {
    if (!w.support.members.empty() && w.support.members.back() >= ker.Cxx.rows())
        throw std::out_of_range(std::string(who) + ": support exceeds kernel dimension");
}
}  // namespace detail

// Baker-Hausdorff phase Phi with W_xi(t) W_xi' = W_xi' W_xi(t) e^(i Phi):
// Phi = sum_{i,j} (p_i p'_j Cxx_ij - p_i x'_j Cxp_ij - x_i p'_j Cpx_ij
//                  + x_i x'_j Cpp_ij).
inline double weyl_phase(const WeylDescriptor& w, const WeylDescriptor& wp, const KernelSet& ker) {
    detail::check_weyl_support(w, ker, "weyl_phase");
    detail::check_weyl_support(wp, ker, "weyl_phase");
    double phi = 0.0;
    for (int ia = 0; ia < w.sites(); ++ia) {
        const int i = w.support.members[static_cast<size_t>(ia)];
        for (int jb = 0; jb < wp.sites(); ++jb) {
            const int j = wp.support.members[static_cast<size_t>(jb)];
            phi += w.p_part(ia) * wp.p_part(jb) * ker.Cxx(i, j) -
                   w.p_part(ia) * wp.x_part(jb) * ker.Cxp(i, j) -
                   w.x_part(ia) * wp.p_part(jb) * ker.Cpx(i, j) +
                   w.x_part(ia) * wp.x_part(jb) * ker.Cpp(i, j);
        }
    }
    return phi;
}

// ||[W_xi(t), W_xi']|| = |e^(i Phi) - 1| = 2 |sin(Phi/2)|, always in [0, 2].
inline double weyl_commutator_norm_exact(double phi) { return 2.0 * std::abs(std::sin(phi / 2.0)); }

// ||xi|| ||xi'|| sum_{i,j} (|Cxx| + |Cxp| + |Cpx| + |Cpp|)_(i,j).
inline double weyl_bound_pairwise(const WeylDescriptor& w, const WeylDescriptor& wp,
                                  const KernelSet& ker) {
    detail::check_weyl_support(w, ker, "weyl_bound_pairwise");
    detail::check_weyl_support(wp, ker, "weyl_bound_pairwise");
    double sum = 0.0;
    for (int i : w.support.members)
        for (int j : wp.support.members)
            sum += std::abs(ker.Cxx(i, j)) + std::abs(ker.Cxp(i, j)) + std::abs(ker.Cpx(i, j)) +
                   std::abs(ker.Cpp(i, j));
    return w.norm * wp.norm * sum;
}

// g(z) = (1/(1-z^2)) sum_{d>=0} z^(d/R) (d+1)^(D-1) (1 + c_D (d+1)^D).
// Term ratios are bounded by q(d) = z^(1/R) ((d+2)/(d+1))^(2D-1), decreasing
// in d, so once q < 1 the remaining tail is at most term * q/(1-q); summation
// stops when that certificate drops below 1e-10 of the partial sum.
inline double g_function(double z, const DimensionProfile& dp, int range) {
    if (!(z > 0.0 && z < 1.0)) throw std::domain_error("g_function: z must lie in (0,1)");
    if (range < 1) throw std::invalid_argument("g_function: range must be >= 1");
    const int dim = dp.dim;
    const double cd = dp.c_d;
    const double zr = std::pow(z, 1.0 / range);
    double sum = 0.0, comp = 0.0;
    for (long d = 0;; ++d) {
        const double dp1 = static_cast<double>(d) + 1.0;
        const double term = std::pow(z, static_cast<double>(d) / range) *
                            detail::ipow_d(dp1, dim - 1) * (1.0 + cd * detail::ipow_d(dp1, dim));
        const double t = sum + term;
        comp += std::abs(sum) >= term ? (sum - t) + term : (term - t) + sum;
        sum = t;
        const double q = zr * std::pow((dp1 + 1.0) / dp1, 2.0 * dim - 1.0);
        if (q < 1.0 && term * q / (1.0 - q) < 1e-10 * sum) break;
        if (d > 100000000)
            throw std::runtime_error("g_function: series failed to converge");
    }
    return (sum + comp) / (1.0 - z * z);
}

// Geometry of a support pair for the surface-form bound; dist_sets is in
// lattice units, d_sets = dist_sets/R, z = e tau / d_sets.
struct SurfaceBoundInputs {
    DimensionProfile dp;
    int range = 1;
    int dist_sets = 0;
    long surf_a = 0, surf_b = 0;
    double d_sets = 0.0;
    double tau = 0.0;
    double z = kInf;
};

inline SurfaceBoundInputs make_surface_inputs(const Graph& g, const SiteSet& s1,
                                              const SiteSet& s2, const DimensionProfile& dp,
                                              int range, const DerivedScales& scales, double t) {
    if (range < 1) throw std::invalid_argument("make_surface_inputs: range must be >= 1");
    SurfaceBoundInputs in;
    in.dp = dp;
    in.range = range;
    const int dist = set_distance(g, s1, s2);
    if (dist == kUnreachable)
        throw std::domain_error("make_surface_inputs: supports are not connected");
    in.dist_sets = dist;
    in.surf_a = boundary_sets(g, s1, 0).first.size();
    in.surf_b = boundary_sets(g, s2, 0).first.size();
    in.d_sets = static_cast<double>(dist) / range;
    in.tau = scales.tau_rate * std::abs(t);
    in.z = in.d_sets > 0.0 ? std::numbers::e_v<double> * in.tau / in.d_sets : kInf;
    return in;
}

// Entrywise majorant f(dist) from the cone-explicit local bound: the common
// factor at d = dist/R times (||P||/sqrt(||PX||) + ||X||/sqrt(||XP||) + 2).
// +inf outside the cone (no finite statement there).
inline std::function<double(long)> cone_majorant(const DerivedScales& scales, int range,
                                                 double tau) {
    return [scales, range, tau](long dist) -> double {
        const double dr = static_cast<double>(dist) / range;
        if (dr <= 0.0) return kInf;
        const double z = std::numbers::e_v<double> * tau / dr;
        if (z >= 1.0) return kInf;
        if (tau == 0.0) return 0.0;
        const double pref = scales.norm_p / std::sqrt(scales.norm_px) +
                            scales.norm_x / std::sqrt(scales.norm_xp) + 2.0;
        return pref * std::exp(dr * std::log(z) - 0.5 * std::log(dr) - std::log1p(-z * z));
    };
}

// Middle line of the Weyl bound chain (without the ||xi|| ||xi'|| factor):
//   c_D min{|bd Xi|, |bd Xi'|} sum_{d >= dist} f(d) d^(D-1) (1+c_D (d-dist)^D).
// f must decay fast enough for the sum to converge; truncation stops after the
// terms stay below 1e-14 of the running sum for 16 consecutive lattice steps.
inline double weyl_middle_sum(const SurfaceBoundInputs& in, const std::function<double(long)>& f) {
    const int dim = in.dp.dim;
    const double cd = in.dp.c_d;
    double sum = 0.0, comp = 0.0;
    int quiet = 0;
    for (long d = in.dist_sets;; ++d) {
        const double fd = f(d);
        if (fd == kInf) return kInf;
        const double dd = static_cast<double>(d);
        const double geom = d == 0 ? (dim == 1 ? 1.0 : 0.0) : detail::ipow_d(dd, dim - 1);
        const double off = static_cast<double>(d - in.dist_sets);
        const double term = fd * geom * (1.0 + cd * detail::ipow_d(off, dim));
        const double t = sum + term;
        comp += std::abs(sum) >= term ? (sum - t) + term : (term - t) + sum;
        sum = t;
        quiet = term <= 1e-14 * sum ? quiet + 1 : 0;
        if (quiet >= 16 && d >= in.dist_sets + 16) break;
        if (d > in.dist_sets + 1000000)
            throw std::runtime_error("weyl_middle_sum: series failed to converge");
    }
    return cd * static_cast<double>(std::min(in.surf_a, in.surf_b)) * (sum + comp);
}

// Surface-geometry form, valid inside the cone e tau < dist/R:
//   C min{|bd Xi|, |bd Xi'|} g(z) e^(d log z) d^(D-3/2),
//   C = R^(D-1) c_D ||xi|| ||xi'|| (||P||/sqrt(||PX||) + ||X||/sqrt(||XP||) + 2).
inline BoundValue weyl_bound_surface(const SurfaceBoundInputs& in, const DerivedScales& s,
                                     double norm_xi, double norm_xi_prime) {
    if (in.d_sets <= 0.0) return BoundValue::na("surface bound needs dist(sets) > 0");
    if (in.tau == 0.0) return BoundValue::ok(0.0);
    if (!(in.z < 1.0)) return BoundValue::na("outside causal cone: e*tau >= dist/R");
    if (s.norm_px == 0.0 || s.norm_xp == 0.0)
        return BoundValue::na("prefactor degenerate: ||PX|| = 0");
    const double pref = s.norm_p / std::sqrt(s.norm_px) + s.norm_x / std::sqrt(s.norm_xp) + 2.0;
    const double c = detail::ipow_d(static_cast<double>(in.range), in.dp.dim - 1) * in.dp.c_d *
                     norm_xi * norm_xi_prime * pref;
    const double g = g_function(in.z, in.dp, in.range);
    const double geo =
        std::exp(in.d_sets * std::log(in.z) + (in.dp.dim - 1.5) * std::log(in.d_sets));
    return BoundValue::ok(c * static_cast<double>(std::min(in.surf_a, in.surf_b)) * g * geo);
}

}  // namespace lrharm
