#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bounds.hpp"
#include "couplings.hpp"
#include "dynamics.hpp"
#include "graph.hpp"
#include "parallel.hpp"

namespace lrharm {

// Klein-Gordon lattice study on the unit box: N sites per side, periodic, and
// the scan target at the rational box fraction x = x_num/x_den.
struct KGConfig {
    int dim = 1;
    int side = 8;
    double mass = 0.0;
    long x_num = 1, x_den = 4;
    std::vector<int> sides = {8, 16, 32, 64};
    std::vector<double> t_grid;
};

inline std::vector<double> default_kg_t_grid() {
    std::vector<double> t;
    for (int k = 0; k <= 50; ++k) t.push_back(k * 0.01);
    return t;
}

// X = (m^2 + 2 D N^2) I - N^2 [dist = 1], P = I, LocalRange(1) on the
// periodic cubic lattice carried by g.
inline CouplingPair kg_coupling(const Graph& g, int dim, int side, double mass) {
    if (side < 2) throw std::invalid_argument("kg_coupling: N must be >= 2");
    if (dim < 1) throw std::invalid_argument("kg_coupling: D must be >= 1");
    const int n = g.size();
    const double n2 = static_cast<double>(side) * side;
    const double diag = mass * mass + 2.0 * dim * n2;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        x(j, j) = diag;
        for (int i = 0; i < j; ++i)
            if (g.dist(i, j) == 1) {
                x(i, j) = -n2;
                x(j, i) = -n2;
            }
    }
    return CouplingPair{std::move(x), Eigen::MatrixXd::Identity(n, n), LocalRange{1}};
}

inline CouplingPair kg_coupling(const KGConfig& cfg) {
    const Graph g = cubic_graph(cfg.side, cfg.dim, true);
    return kg_coupling(g, cfg.dim, cfg.side, cfg.mass);
}

struct LightconeRow {
    int side = 0;
    double t = 0.0;
    double value = 0.0;  // N^D |Cxx_{i,0}(t)|, i the target site
    bool cone_flag = false;  // e sqrt(D) |t| < |x|
};

struct LightconeTable {
    std::vector<LightconeRow> rows;
};

// Exact values via the spectral path, cells ordered (N ascending, t ascending)
// regardless of the parallelism degree.
inline LightconeTable kg_lightcone_scan(const KGConfig& cfg, int jobs = 1) {
    if (cfg.dim != 1)
        throw std::invalid_argument("kg_lightcone_scan: the standard scan is one-dimensional");
    const std::vector<double>& t_grid = cfg.t_grid.empty() ? default_kg_t_grid() : cfg.t_grid;
    const double x_frac = static_cast<double>(cfg.x_num) / static_cast<double>(cfg.x_den);

    struct Cell {
        int side;
        int target;
        double scale;
    };
    std::vector<Cell> cells;
    for (int side : cfg.sides) {
        if ((static_cast<long>(side) * cfg.x_num) % cfg.x_den != 0)
            throw std::invalid_argument("kg_lightcone_scan: N*x must be an integer");
        const int target = static_cast<int>(static_cast<long>(side) * cfg.x_num / cfg.x_den);
        double scale = 1.0;
        for (int d = 0; d < cfg.dim; ++d) scale *= side;
        cells.push_back({side, target, scale});
    }

    LightconeTable table;
    table.rows.assign(cells.size() * t_grid.size(), LightconeRow{});
    const double cone_speed = std::numbers::e_v<double> * std::sqrt(static_cast<double>(cfg.dim));
    parallel_for(static_cast<long>(cells.size()), jobs, [&](long ci) {
        const Cell& cell = cells[static_cast<size_t>(ci)];
        const Graph g = cubic_graph(cell.side, cfg.dim, true);
        const CouplingPair cp = kg_coupling(g, cfg.dim, cell.side, cfg.mass);
        for (size_t ti = 0; ti < t_grid.size(); ++ti) {
            const double t = t_grid[ti];
            const KernelSet ks = kernels_spectral(cp, t);
            LightconeRow row;
            row.side = cell.side;
            row.t = t;
            row.value = cell.scale * std::abs(ks.Cxx(cell.target, 0));
            row.cone_flag = cone_speed * std::abs(t) < x_frac;
            table.rows[static_cast<size_t>(ci) * t_grid.size() + ti] = row;
        }
    });
    return table;
}

struct SweepSpec {
    std::vector<Theorem> theorems;
    std::vector<double> t_grid;
    double series_tol = 1e-12;
    int jobs = 1;
};

namespace detail {

inline bool theorem_needs_p1(Theorem th) {
    return th == Theorem::local_p1 || th == Theorem::local_p1_cone;
}

inline BoundValue evaluate_bound(Theorem th, const Graph& g, const CouplingPair& cp,
                                 const DimensionProfile* dp, const ConeQuantities& cq,
                                 const DerivedScales& scales, int i, int j, double t, Kind k) {
    switch (th) {
        case Theorem::local:
            return BoundValue::ok(bound_local(cq, scales, k));
        case Theorem::local_cone:
            return bound_local_cone(cq, scales, k);
        case Theorem::local_p1:
            return BoundValue::ok(bound_local_p1(cq, scales, k));
        case Theorem::local_p1_cone:
            return bound_local_p1_cone(cq, scales, k);
        default:
            return BoundValue::ok(bound_nonlocal(g, cp, *dp, i, j, t, k));
    }
}

inline bool row_inside_flag(Theorem th, const ConeQuantities& cq, Kind k) {
    switch (th) {
        case Theorem::local_cone:
            return cq.inside_cone;
        case Theorem::local_p1_cone:
            if (k == Kind::pp)
                return cq.a_p1 >= 1 &&
                       std::numbers::e_v<double> * cq.tau < 2.0 * cq.a_p1 + 1.0;
            return cq.inside_cone_p1;
        default:
            return true;  // full-domain forms apply everywhere
    }
}

}  // namespace detail

// Dominance sweep: every (i, j, kind) pair against each selected theorem over
// the time grid. Exact kernels come from the spectral path when P = identity
// and from the certified series otherwise. Row order is (t, theorem, i, j,
// kind); cells are per-t and deterministic under any jobs count.
inline BoundReport tightness_sweep(const Graph& g, const CouplingPair& cp,
                                   const DimensionProfile* dp, const SweepSpec& spec) {
    if (spec.theorems.empty()) throw std::invalid_argument("tightness_sweep: no theorems selected");
    if (spec.t_grid.empty()) throw std::invalid_argument("tightness_sweep: empty time grid");
    const bool p1 = cp.p_is_identity();
    const auto* lr = cp.local_range();
    for (Theorem th : spec.theorems) {
        if (th == Theorem::nonlocal) {
            if (!cp.algebraic())
                throw std::invalid_argument(
                    "tightness_sweep: nonlocal theorem needs algebraic-decay couplings");
            if (!dp)
                throw std::invalid_argument(
                    "tightness_sweep: nonlocal theorem needs a dimension profile");
        } else if (!lr) {
            throw std::invalid_argument(
                "tightness_sweep: local theorems need LocalRange couplings");
        }
        if (detail::theorem_needs_p1(th) && !p1)
            throw std::invalid_argument(
                "tightness_sweep: P=identity theorems need identity momentum couplings");
    }
    const int n = g.size();
    const DerivedScales scales = spectral_norms(cp);
    const size_t rows_per_t = spec.theorems.size() * static_cast<size_t>(n) * n * 4;

    BoundReport rep;
    rep.rows.assign(rows_per_t * spec.t_grid.size(), BoundRow{});
    std::vector<double> cell_err(spec.t_grid.size(), 0.0);

    parallel_for(static_cast<long>(spec.t_grid.size()), spec.jobs, [&](long ti) {
        const double t = spec.t_grid[static_cast<size_t>(ti)];
        const KernelSet ks = p1 ? kernels_spectral(cp, t) : kernels_series(cp, t, spec.series_tol);
        const double err = ks.total_error();
        cell_err[static_cast<size_t>(ti)] = err;
        size_t at = static_cast<size_t>(ti) * rows_per_t;
        for (Theorem th : spec.theorems)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    ConeQuantities cq;
                    if (th != Theorem::nonlocal) cq = cone_quantities(g, i, j, lr->range, scales, t);
                    for (Kind k : kAllKinds) {
                        BoundRow row;
                        row.i = i;
                        row.j = j;
                        row.kind = k;
                        row.theorem = th;
                        row.t = t;
                        if (th == Theorem::nonlocal) {
                            row.tau = 0.0;  // set below from the nonlocal rate
                            row.d = static_cast<double>(g.dist(i, j));
                        } else {
                            row.tau = cq.tau;
                            row.d = cq.d;
                        }
                        const BoundValue bv = detail::evaluate_bound(th, g, cp, dp, cq, scales,
                                                                     i, j, t, k);
                        row.bound = bv.value;
                        row.reason = bv.reason;
                        row.exact = std::abs(ks.kernel(k)(i, j));
                        row.inside_cone = detail::row_inside_flag(th, cq, k);
                        if (bv.applicable()) {
                            row.margin = bv.value - row.exact;
                            row.dominated = row.exact <= bv.value + err;
                        } else {
                            row.margin = kInf;
                            row.dominated = true;
                        }
                        rep.rows[at++] = row;
                    }
                }
    });

    // Nonlocal rows carry the decay-rate tau rather than the spectral one.
    if (const auto* ad = cp.algebraic(); ad && dp) {
        const NonlocalScales ns = nonlocal_scales(*dp, ad->c0, ad->eta);
        for (BoundRow& row : rep.rows)
            if (row.theorem == Theorem::nonlocal) row.tau = ns.tau_rate * std::abs(row.t);
    }

    BoundSummary& sm = rep.summary;
    sm.rows = static_cast<long>(rep.rows.size());
    long inside = 0;
    for (const BoundRow& row : rep.rows) {
        if (row.inside_cone) ++inside;
        if (row.applicable()) {
            ++sm.applicable;
            if (!row.dominated) ++sm.violations;
            if (row.margin < sm.min_margin) sm.min_margin = row.margin;
        }
    }
    sm.fraction_inside = sm.rows > 0 ? static_cast<double>(inside) / sm.rows : 0.0;
    for (double e : cell_err) sm.kernel_error = std::max(sm.kernel_error, e);
    return rep;
}

}  // namespace lrharm
