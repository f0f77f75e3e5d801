#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "couplings.hpp"
#include "dynamics.hpp"
#include "graph.hpp"

namespace lrharm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(cosh(tau)) and log(sinh(tau)) without overflow.
inline double log_cosh(double tau) {
    const double a = std::abs(tau);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2_v<double>;
}

inline double log_sinh(double tau) {
    if (!(tau > 0.0)) {
        if (tau == 0.0) return -kInf;
        throw std::domain_error("log_sinh: tau must be >= 0");
    }
    return tau + std::log1p(-std::exp(-2.0 * tau)) - std::numbers::ln2_v<double>;
}

inline double log_factorial(long k) {
    if (k < 0) throw std::invalid_argument("log_factorial: negative argument");
    return std::lgamma(static_cast<double>(k) + 1.0);
}

// zeta(s) = sum_k k^(-s) for s > 1, to absolute accuracy 1e-12: direct sum to
// K terms, then the Euler-Maclaurin continuation
//   sum_{k>K} k^(-s) = K'^(1-s)/(s-1) + K'^(-s)/2 + s K'^(-s-1)/12 - ...
// at K' = K+1, with K chosen so the next correction stays below ~5e-14.
inline double riemann_zeta(double s) {
    if (!(s > 1.0)) throw std::domain_error("riemann_zeta: diverges for s <= 1");
    const double target = 5e-14;
    const double rem_coef = s * (s + 1.0) * (s + 2.0) / 720.0;
    double k_real = std::pow(rem_coef / target, 1.0 / (s + 3.0));
    long k_terms = static_cast<long>(std::ceil(k_real));
    if (k_terms < 32) k_terms = 32;
    if (k_terms > 10000000) k_terms = 10000000;

    double sum = 0.0, comp = 0.0;
    for (long k = k_terms; k >= 1; --k) {
        const double v = std::pow(static_cast<double>(k), -s);
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    const double m = static_cast<double>(k_terms) + 1.0;
    const double tail = std::pow(m, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(m, -s) +
                        s / 12.0 * std::pow(m, -s - 1.0);
    return sum + comp + tail;
}

// Integer cone data for a vertex pair: d = dist/R and the series starting
// indices of Theorems 1-4, computed in exact integer arithmetic.
struct ConeQuantities {
    double d = 0.0;
    long a = 0;        // max{0, ceil((d-1)/2)}
    long b = 0;        // ceil(d/2)
    long a_p1 = 0;     // max{0, ceil(d-1)}
    long ceil_d = 0;   // ceil(d)
    double tau = 0.0;
    double abs_t = 0.0;
    bool inside_cone = false;     // e tau < d
    bool inside_cone_p1 = false;  // e tau < 2d
};

namespace detail {
inline long ceil_div(long num, long den) {
    return num >= 0 ? (num + den - 1) / den : -((-num) / den);
}
}  // namespace detail

inline ConeQuantities cone_quantities(const Graph& g, int i, int j, int range,
                                      const DerivedScales& scales, double t) {
    if (range < 1) throw std::invalid_argument("cone_quantities: range must be >= 1");
    const int dist = g.dist(i, j);
    if (dist == kUnreachable)
        throw std::domain_error(
            "cone_quantities: vertices are not connected; bounds need finite distance");
    ConeQuantities q;
    const long ld = dist, lr = range;
    q.d = static_cast<double>(dist) / range;
    q.b = detail::ceil_div(ld, 2 * lr);
    q.a = std::max(0L, detail::ceil_div(ld - lr, 2 * lr));
    q.ceil_d = detail::ceil_div(ld, lr);
    q.a_p1 = std::max(0L, q.ceil_d - 1);
    q.abs_t = std::abs(t);
    q.tau = scales.tau_rate * q.abs_t;
    q.inside_cone = std::numbers::e_v<double> * q.tau < q.d;
    q.inside_cone_p1 = std::numbers::e_v<double> * q.tau < 2.0 * q.d;
    return q;
}

// Theorem evaluations that can fail a precondition return +inf with a reason,
// so dominance checks can tell "bound is large" from "bound does not apply".
struct BoundValue {
    double value = kInf;
    std::string reason;

    bool applicable() const { return reason.empty(); }
    static BoundValue ok(double v) { return BoundValue{v, {}}; }
    static BoundValue na(std::string why) { return BoundValue{kInf, std::move(why)}; }
};

namespace detail {
// tau^(2a+1) cosh(tau) / (2a+1)!  and  tau^(2b) cosh(tau) / (2b)!, log-domain.
inline double tail_odd(double tau, long a) {
    if (tau == 0.0) return 0.0;
    return std::exp((2.0 * a + 1.0) * std::log(tau) + log_cosh(tau) - log_factorial(2 * a + 1));
}
inline double tail_even(double tau, long b) {
    if (tau == 0.0) return b == 0 ? 1.0 : 0.0;
    return std::exp(2.0 * b * std::log(tau) + log_cosh(tau) - log_factorial(2 * b));
}
}  // namespace detail

// Local-coupling bounds, full domain:
//   xx: (||P||/sqrt(||PX||)) tau^(2a+1) cosh(tau)/(2a+1)!
//   pp: (||X||/sqrt(||XP||)) tau^(2a+1) cosh(tau)/(2a+1)!
//   xp, px: tau^(2b) cosh(tau)/(2b)!
// Degenerate ||PX|| = 0 collapses the series to its first admissible term:
// ||P|| |t| for a = 0 and 0 for a >= 1 (norm-product form, no division).
inline double bound_local(const ConeQuantities& cq, const DerivedScales& s, Kind k) {
    switch (k) {
        case Kind::xx:
            if (s.norm_px == 0.0) return cq.a == 0 ? s.norm_p * cq.abs_t : 0.0;
            return s.norm_p / std::sqrt(s.norm_px) * detail::tail_odd(cq.tau, cq.a);
        case Kind::pp:
            if (s.norm_xp == 0.0) return cq.a == 0 ? s.norm_x * cq.abs_t : 0.0;
            return s.norm_x / std::sqrt(s.norm_xp) * detail::tail_odd(cq.tau, cq.a);
        default:
            return detail::tail_even(cq.tau, cq.b);
    }
}

// Cone-explicit common factor e^(d log(e tau/d)) / (sqrt(d) (1-(e tau/d)^2)),
// valid for e tau < d strictly, d > 0. Callers apply the Theorem 1 prefactors.
inline BoundValue bound_local_cone_common(const ConeQuantities& cq) {
    if (cq.d <= 0.0) return BoundValue::na("cone form needs dist > 0");
    const double z = std::numbers::e_v<double> * cq.tau / cq.d;
    if (z >= 1.0) return BoundValue::na("outside causal cone: e*tau >= d");
    if (cq.tau == 0.0) return BoundValue::ok(0.0);
    return BoundValue::ok(
        std::exp(cq.d * std::log(z) - 0.5 * std::log(cq.d) - std::log1p(-z * z)));
}

inline BoundValue bound_local_cone(const ConeQuantities& cq, const DerivedScales& s, Kind k) {
    const BoundValue f = bound_local_cone_common(cq);
    if (!f.applicable()) return f;
    switch (k) {
        case Kind::xx:
            if (s.norm_px == 0.0) return BoundValue::na("prefactor degenerate: ||PX|| = 0");
            return BoundValue::ok(s.norm_p / std::sqrt(s.norm_px) * f.value);
        case Kind::pp:
            if (s.norm_xp == 0.0) return BoundValue::na("prefactor degenerate: ||XP|| = 0");
            return BoundValue::ok(s.norm_x / std::sqrt(s.norm_xp) * f.value);
        default:
            return f;
    }
}

// P = identity bounds, full domain (Theorem 3 shape):
//   xx: tau^(2 ceil(d)+1) cosh(tau)/((2 ceil(d)+1)! sqrt(||X||))
//   pp: sqrt(||X||) tau^(2a+1) cosh(tau)/(2a+1)!, a = max{0, ceil(d-1)}
//   xp, px: tau^(2 ceil(d)) cosh(tau)/(2 ceil(d))!
// X = 0 degenerates to the exact kernels: Cxx = t I, Cpp = 0, |Cxp| = delta.
inline double bound_local_p1(const ConeQuantities& cq, const DerivedScales& s, Kind k) {
    switch (k) {
        case Kind::xx:
            if (s.norm_x == 0.0) return cq.ceil_d == 0 ? cq.abs_t : 0.0;
            return detail::tail_odd(cq.tau, cq.ceil_d) / std::sqrt(s.norm_x);
        case Kind::pp:
            if (s.norm_x == 0.0) return 0.0;
            return std::sqrt(s.norm_x) * detail::tail_odd(cq.tau, cq.a_p1);
        default:
            return detail::tail_even(cq.tau, cq.ceil_d);
    }
}

// P = identity cone-explicit bounds (Theorem 4 shape): for e tau < 2d,
//   xx: e^(2d log(e tau/(2d))) / (sqrt(d) (1-(e tau/(2d))^2) sqrt(||X||))
//   xp, px: same without the 1/sqrt(||X||)
// and for e tau < 2a+1 with a >= 1,
//   pp: sqrt(||X||) e^(2a log(e tau/(2a+1))) / (sqrt(a) (1-(e tau/(2a+1))^2)).
// The pp form is rejected at a = 0 (its 1/sqrt(a) degenerates; no
// regularization is guessed).
inline BoundValue bound_local_p1_cone(const ConeQuantities& cq, const DerivedScales& s, Kind k) {
    if (k == Kind::pp) {
        if (cq.a_p1 < 1) return BoundValue::na("pp cone form needs a >= 1 (dist > R)");
        const double z = std::numbers::e_v<double> * cq.tau / (2.0 * cq.a_p1 + 1.0);
        if (z >= 1.0) return BoundValue::na("outside validity: e*tau >= 2a+1");
        if (cq.tau == 0.0) return BoundValue::ok(0.0);
        const double h = std::exp(2.0 * cq.a_p1 * std::log(z) -
                                  0.5 * std::log(static_cast<double>(cq.a_p1)) -
                                  std::log1p(-z * z));
        return BoundValue::ok(std::sqrt(s.norm_x) * h);
    }
    if (cq.d <= 0.0) return BoundValue::na("cone form needs dist > 0");
    const double z = std::numbers::e_v<double> * cq.tau / (2.0 * cq.d);
    if (z >= 1.0) return BoundValue::na("outside causal cone: e*tau >= 2d");
    double common = 0.0;
    if (cq.tau > 0.0)
        common = std::exp(2.0 * cq.d * std::log(z) - 0.5 * std::log(cq.d) - std::log1p(-z * z));
    if (k == Kind::xx) {
        if (s.norm_x == 0.0) return BoundValue::na("prefactor degenerate: ||X|| = 0");
        return BoundValue::ok(common / std::sqrt(s.norm_x));
    }
    return BoundValue::ok(common);
}

// a0 = c_D 2^(eta+1) zeta(1-D+eta) and the non-local rate tau = a0 c0 |t|
// (housed separately from the spectral-norm tau of Theorems 1-4).
struct NonlocalScales {
    double a0 = 0.0;
    double tau_rate = 0.0;
};

inline NonlocalScales nonlocal_scales(const DimensionProfile& dp, double c0, double eta) {
    if (!(eta > dp.dim))
        throw std::domain_error(
            "nonlocal bound inapplicable: decay exponent must exceed the graph dimension");
    if (!(c0 > 0.0)) throw std::invalid_argument("nonlocal_scales: c0 must be > 0");
    if (!(dp.c_d > 0.0))
        throw std::domain_error("nonlocal bound needs a graph with at least one edge");
    NonlocalScales ns;
    ns.a0 = dp.c_d * std::exp2(eta + 1.0) * riemann_zeta(1.0 - dp.dim + eta);
    ns.tau_rate = ns.a0 * c0;
    return ns;
}

// Algebraic-decay bounds:
//   xx, pp: sinh(tau) / (a0 (1+dist)^eta)
//   xp, px: delta_ij + cosh(tau) / (a0 (1+dist)^eta)
inline double bound_nonlocal(const Graph& g, const CouplingPair& cp, const DimensionProfile& dp,
                             int i, int j, double t, Kind k) {
    const auto* ad = cp.algebraic();
    if (!ad)
        throw std::invalid_argument("bound_nonlocal: couplings must carry algebraic-decay metadata");
    const NonlocalScales ns = nonlocal_scales(dp, ad->c0, ad->eta);
    const int dist = g.dist(i, j);
    if (dist == kUnreachable)
        throw std::domain_error("bound_nonlocal: vertices are not connected");
    const double tau = ns.tau_rate * std::abs(t);
    const double log_den = std::log(ns.a0) + ad->eta * std::log1p(static_cast<double>(dist));
    if (k == Kind::xx || k == Kind::pp)
        return tau == 0.0 ? 0.0 : std::exp(log_sinh(tau) - log_den);
    const double delta = i == j ? 1.0 : 0.0;
    return delta + std::exp(log_cosh(tau) - log_den);
}

// Products of range-R matrices spread support by R per factor: every entry of
// M^n beyond distance n*R must be exactly zero (products of exact zeros).
inline bool verify_power_support(const Graph& g, const Eigen::MatrixXd& m, int range, int n_max) {
    if (!validate_locality(g, m, range))
        throw std::invalid_argument("verify_power_support: matrix violates the claimed range");
    const int n = g.size();
    Eigen::MatrixXd p = m;
    for (int k = 1; k <= n_max; ++k) {
        const long reach = static_cast<long>(k) * range;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const int d = g.dist(i, j);
                if ((d == kUnreachable || d > reach) && p(i, j) != 0.0) return false;
            }
        if (k < n_max) p = (p * m).eval();
    }
    return true;
}

enum class Theorem { local, local_cone, local_p1, local_p1_cone, nonlocal };

inline const char* theorem_name(Theorem th) {
    switch (th) {
        case Theorem::local: return "local";
        case Theorem::local_cone: return "local_cone";
        case Theorem::local_p1: return "local_p1";
        case Theorem::local_p1_cone: return "local_p1_cone";
        default: return "nonlocal";
    }
}

inline Theorem theorem_from_name(std::string_view s) {
    if (s == "local") return Theorem::local;
    if (s == "local_cone") return Theorem::local_cone;
    if (s == "local_p1") return Theorem::local_p1;
    if (s == "local_p1_cone") return Theorem::local_p1_cone;
    if (s == "nonlocal") return Theorem::nonlocal;
    throw std::invalid_argument("unknown theorem tag: " + std::string(s));
}

// One dominance-check row of a bound report. inside_cone records the validity
// flag relevant to the row's theorem (always true for the full-domain forms);
// bound is +inf with dominated = true and a non-empty reason when a
// precondition fails. reason is diagnostic only and stays out of the CSV.
struct BoundRow {
    int i = 0, j = 0;
    Kind kind = Kind::xx;
    Theorem theorem = Theorem::local;
    double t = 0.0, tau = 0.0, d = 0.0;
    double bound = kInf;
    double exact = 0.0;
    double margin = kInf;
    bool inside_cone = false;
    bool dominated = true;
    std::string reason;

    bool applicable() const { return reason.empty(); }
};

struct BoundSummary {
    long rows = 0;
    long applicable = 0;
    long violations = 0;
    double min_margin = kInf;
    double fraction_inside = 0.0;
    double kernel_error = 0.0;
};

struct BoundReport {
    std::vector<BoundRow> rows;
    BoundSummary summary;
};

}  // namespace lrharm
