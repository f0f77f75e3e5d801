// Command-line front end: parse a JSON experiment config, dispatch to the
// library, write CSV/JSON reports.
//
// Exit codes: 0 success; 1 validation failure (bad input, I/O, or a failed
// check); 2 theorem-precondition failures when --strict is set.

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <lrharm/lrharm.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitStrict = 2;

struct CommonOpts {
    std::string config_path;
    std::string out_path;       // empty: write to stdout
    std::string format = "csv";
    double tol = 0.0;           // 0: take from config / default
    int jobs = 1;
    bool strict = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON experiment config")->required();
    cmd->add_option("--out", o.out_path, "output path (default: stdout)");
    cmd->add_option("--format", o.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--tol", o.tol, "series tolerance override (> 0)");
    cmd->add_option("--jobs", o.jobs, "worker count for sweep cells")->check(CLI::PositiveNumber);
    cmd->add_flag("--strict", o.strict, "treat bound-precondition failures as fatal (exit 2)");
}

double pick_tol(const CommonOpts& o, const nlohmann::json& cfg) {
    double tol = o.tol;
    if (tol == 0.0) tol = lrharm::detail::field_or(cfg, "series_tol", 1e-12);
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
    return tol;
}

void write_output(const CommonOpts& o, const std::string& text) {
    if (o.out_path.empty()) {
        std::cout << text;
        return;
    }
    lrharm::detail::write_text_file(o.out_path, text);
}

lrharm::KernelSet compute_kernels(const lrharm::CouplingPair& cp, double t, double tol,
                                  const std::string& method) {
    if (method == "spectral") return lrharm::kernels_spectral(cp, t);
    if (method == "series") return lrharm::kernels_series(cp, t, tol);
    if (method == "auto")
        return cp.p_is_identity() ? lrharm::kernels_spectral(cp, t)
                                  : lrharm::kernels_series(cp, t, tol);
    throw std::invalid_argument("kernels: unknown method '" + method + "'");
}

std::optional<lrharm::DimensionProfile> load_profile(const lrharm::Graph& g,
                                                     const nlohmann::json& cfg) {
    const auto it = cfg.find("dimension");
    if (it == cfg.end()) return std::nullopt;
    const int d = it->is_object() ? it->at("d").get<int>() : it->get<int>();
    return lrharm::dimension_profile(g, d);
}

int run_kernels(const CommonOpts& o) {
    const nlohmann::json cfg = lrharm::load_json_file(o.config_path);
    const lrharm::Graph g = lrharm::graph_from_json(cfg.at("graph"));
    const lrharm::CouplingPair cp = lrharm::couplings_from_json(g, cfg.at("couplings"));
    const double t = cfg.at("t").get<double>();
    const std::string method = cfg.value("method", std::string("auto"));
    const lrharm::KernelSet ks = compute_kernels(cp, t, pick_tol(o, cfg), method);
    write_output(o, lrharm::render_report(ks, lrharm::format_from_name(o.format)));
    return kExitOk;
}

int run_sweep(const CommonOpts& o, bool single_time) {
    const nlohmann::json cfg = lrharm::load_json_file(o.config_path);
    const lrharm::Graph g = lrharm::graph_from_json(cfg.at("graph"));
    const lrharm::CouplingPair cp = lrharm::couplings_from_json(g, cfg.at("couplings"));
    const std::optional<lrharm::DimensionProfile> dp = load_profile(g, cfg);

    lrharm::SweepSpec spec;
    spec.theorems = lrharm::theorems_from_json(cfg.at("theorems"));
    if (single_time)
        spec.t_grid = {cfg.at("t").get<double>()};
    else
        spec.t_grid = lrharm::t_grid_from_json(cfg.at("t_grid"));
    spec.series_tol = pick_tol(o, cfg);
    spec.jobs = o.jobs;

    const lrharm::BoundReport rep =
        lrharm::tightness_sweep(g, cp, dp ? &*dp : nullptr, spec);
    write_output(o, lrharm::render_report(rep, lrharm::format_from_name(o.format)));

    const lrharm::BoundSummary& sm = rep.summary;
    std::cerr << "rows=" << sm.rows << " applicable=" << sm.applicable
              << " violations=" << sm.violations
              << " min_margin=" << lrharm::format_double(sm.min_margin)
              << " fraction_inside=" << lrharm::format_double(sm.fraction_inside)
              << " kernel_error=" << lrharm::format_double(sm.kernel_error) << "\n";

    if (o.strict && sm.applicable < sm.rows) {
        for (const lrharm::BoundRow& r : rep.rows)
            if (!r.applicable()) {
                std::cerr << "strict: inapplicable row i=" << r.i << " j=" << r.j << " kind="
                          << lrharm::kind_name(r.kind) << " theorem="
                          << lrharm::theorem_name(r.theorem) << " t=" << r.t << ": " << r.reason
                          << "\n";
                break;
            }
        return kExitStrict;
    }
    if (sm.violations > 0) {
        std::cerr << "dominance violations detected: " << sm.violations << "\n";
        return kExitFail;
    }
    return kExitOk;
}

int run_kg_scan(const CommonOpts& o) {
    const nlohmann::json cfg = lrharm::load_json_file(o.config_path);
    const nlohmann::json& kg = cfg.contains("kg") ? cfg.at("kg") : cfg;
    const lrharm::KGConfig kg_cfg = lrharm::kg_config_from_json(kg);
    const lrharm::LightconeTable table = lrharm::kg_lightcone_scan(kg_cfg, o.jobs);
    write_output(o, lrharm::render_report(table, lrharm::format_from_name(o.format)));
    return kExitOk;
}

int run_weyl(const CommonOpts& o) {
    const nlohmann::json cfg = lrharm::load_json_file(o.config_path);
    const lrharm::Graph g = lrharm::graph_from_json(cfg.at("graph"));
    const lrharm::CouplingPair cp = lrharm::couplings_from_json(g, cfg.at("couplings"));
    const nlohmann::json& wj = cfg.at("weyl");
    const lrharm::WeylDescriptor wa = lrharm::weyl_from_json(wj.at("a"));
    const lrharm::WeylDescriptor wb = lrharm::weyl_from_json(wj.at("b"));
    std::vector<double> t_grid;
    if (cfg.contains("t_grid"))
        t_grid = lrharm::t_grid_from_json(cfg.at("t_grid"));
    else
        t_grid = {cfg.at("t").get<double>()};
    const double tol = pick_tol(o, cfg);
    const std::optional<lrharm::DimensionProfile> dp = load_profile(g, cfg);
    const auto* lr = cp.local_range();
    const lrharm::DerivedScales scales = lrharm::spectral_norms(cp);

    std::ostringstream csv;
    nlohmann::json rows = nlohmann::json::array();
    csv << "t,phase,exact,pairwise,middle,surface\n";
    bool any_na = false;
    std::string na_reason;
    for (double t : t_grid) {
        const lrharm::KernelSet ks = compute_kernels(cp, t, tol, cfg.value("method", std::string("auto")));
        const double phi = lrharm::weyl_phase(wa, wb, ks);
        const double exact = lrharm::weyl_commutator_norm_exact(phi);
        const double pairwise = lrharm::weyl_bound_pairwise(wa, wb, ks);
        double middle = lrharm::kInf, surface = lrharm::kInf;
        std::string reason;
        if (!dp) {
            reason = "surface bound needs a dimension profile ('dimension' in config)";
        } else if (!lr) {
            reason = "surface bound needs LocalRange couplings";
        } else {
            const lrharm::SurfaceBoundInputs in = lrharm::make_surface_inputs(
                g, wa.support, wb.support, *dp, lr->range, scales, t);
            middle = wa.norm * wb.norm *
                     lrharm::weyl_middle_sum(in, lrharm::cone_majorant(scales, lr->range, in.tau));
            const lrharm::BoundValue sv = lrharm::weyl_bound_surface(in, scales, wa.norm, wb.norm);
            surface = sv.value;
            reason = sv.reason;
        }
        if (!reason.empty() && !any_na) {
            any_na = true;
            na_reason = reason;
        }
        csv << lrharm::format_double(t) << ',' << lrharm::format_double(phi) << ','
            << lrharm::format_double(exact) << ',' << lrharm::format_double(pairwise) << ','
            << lrharm::format_double(middle) << ',' << lrharm::format_double(surface) << '\n';
        nlohmann::json row;
        row["t"] = lrharm::json_number(t);
        row["phase"] = lrharm::json_number(phi);
        row["exact"] = lrharm::json_number(exact);
        row["pairwise"] = lrharm::json_number(pairwise);
        row["middle"] = lrharm::json_number(middle);
        row["surface"] = lrharm::json_number(surface);
        if (!reason.empty()) row["reason"] = reason;
        rows.push_back(std::move(row));
    }
    const lrharm::OutputFormat fmt = lrharm::format_from_name(o.format);
    if (fmt == lrharm::OutputFormat::csv)
        write_output(o, csv.str());
    else
        write_output(o, nlohmann::json{{"rows", std::move(rows)}}.dump(2) + "\n");
    if (o.strict && any_na) {
        std::cerr << "strict: " << na_reason << "\n";
        return kExitStrict;
    }
    return kExitOk;
}

// ---- verify: invariant suite over a described instance ----

struct CheckLog {
    int failures = 0;

    void pass(const std::string& name, const std::string& detail) {
        std::cout << "PASS " << name << (detail.empty() ? "" : ": " + detail) << "\n";
    }
    void fail(const std::string& name, const std::string& detail) {
        ++failures;
        std::cout << "FAIL " << name << (detail.empty() ? "" : ": " + detail) << "\n";
    }
    void skip(const std::string& name, const std::string& why) {
        std::cout << "SKIP " << name << ": " << why << "\n";
    }
    void check(const std::string& name, bool ok, const std::string& detail) {
        ok ? pass(name, detail) : fail(name, detail);
    }
};

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

int run_verify(const CommonOpts& o) {
    const nlohmann::json cfg = lrharm::load_json_file(o.config_path);
    const lrharm::Graph g = lrharm::graph_from_json(cfg.at("graph"));
    const lrharm::CouplingPair cp = lrharm::couplings_from_json(g, cfg.at("couplings"));
    const std::optional<lrharm::DimensionProfile> dp = load_profile(g, cfg);
    const std::vector<double> t_grid = lrharm::t_grid_from_json(cfg.at("t_grid"));
    const double tol = pick_tol(o, cfg);
    const lrharm::DerivedScales scales = lrharm::spectral_norms(cp);
    const auto* lr = cp.local_range();
    const bool p1 = cp.p_is_identity();
    CheckLog log;

    double t_max = 0.0;
    for (double t : t_grid) t_max = std::max(t_max, std::abs(t));

    // Kernels at t = 0 must be the identity map on phase space.
    {
        const lrharm::KernelSet ks = compute_kernels(cp, 0.0, tol, "auto");
        const int n = g.size();
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
        const double worst =
            std::max(std::max(ks.Cxx.cwiseAbs().maxCoeff(), ks.Cpp.cwiseAbs().maxCoeff()),
                     std::max(max_abs_diff(ks.Cxp, -id), max_abs_diff(ks.Cpx, id)));
        const double allow = std::max(1e-12, ks.total_error());
        log.check("kernels_at_t0", worst <= allow,
                  "worst deviation " + lrharm::format_double(worst));
    }

    // Series and spectral paths must agree when both are available.
    {
        const double tau = scales.tau_rate * t_max;
        if (!p1)
            log.skip("series_spectral_agreement", "momentum couplings are not the identity");
        else if (tau > 30.0)
            log.skip("series_spectral_agreement",
                     "tau = " + lrharm::format_double(tau) + " beyond series validity");
        else {
            const lrharm::KernelSet a = lrharm::kernels_series(cp, t_max, tol);
            const lrharm::KernelSet b = lrharm::kernels_spectral(cp, t_max);
            double worst = 0.0;
            for (lrharm::Kind k : lrharm::kAllKinds)
                worst = std::max(worst, max_abs_diff(a.kernel(k), b.kernel(k)));
            const double allow = std::max(1e-10, a.total_error() + b.total_error());
            log.check("series_spectral_agreement", worst <= allow,
                      "worst entry gap " + lrharm::format_double(worst) + " allowed " +
                          lrharm::format_double(allow));
        }
    }

    // The propagator is symplectic and satisfies the composition law.
    {
        const double tau_total = scales.tau_rate * 1.5 * t_max;
        if (!p1 && tau_total > 30.0) {
            log.skip("symplectic_and_composition",
                     "tau at the composed time exceeds series validity");
        } else {
            const double t1 = t_max, t2 = 0.5 * t_max;
            const lrharm::KernelSet k1 = compute_kernels(cp, t1, tol, "auto");
            const lrharm::KernelSet k2 = compute_kernels(cp, t2, tol, "auto");
            const lrharm::KernelSet k12 = compute_kernels(cp, t1 + t2, tol, "auto");
            const Eigen::MatrixXd s1 = lrharm::propagator(k1);
            const Eigen::MatrixXd s2 = lrharm::propagator(k2);
            const Eigen::MatrixXd s12 = lrharm::propagator(k12);
            const Eigen::MatrixXd sigma = lrharm::symplectic_form(g.size());
            const double symp = max_abs_diff(s1 * sigma * s1.transpose(), sigma);
            const double comp = max_abs_diff(s1 * s2, s12);
            const double worst = std::max(symp, comp);
            log.check("symplectic_and_composition", worst <= 1e-9,
                      "worst deviation " + lrharm::format_double(worst));
        }
    }

    // Powers of range-R couplings must vanish exactly beyond k*R.
    if (lr) {
        bool ok = lrharm::verify_power_support(g, cp.X, lr->range, 6) &&
                  lrharm::verify_power_support(g, cp.P, lr->range, 6);
        log.check("power_support", ok, "powers 1..6 confined to k*range");
    } else {
        log.skip("power_support", "couplings carry no finite range");
    }

    // Integer cone data must satisfy its defining relations at every pair.
    if (lr) {
        bool ok = true;
        std::string detail;
        for (int i = 0; i < g.size() && ok; ++i)
            for (int j = 0; j < g.size() && ok; ++j) {
                if (!g.reachable(i, j)) continue;
                const lrharm::ConeQuantities q =
                    lrharm::cone_quantities(g, i, j, lr->range, scales, t_max);
                const long b_ref = static_cast<long>(std::ceil(q.d / 2.0 - 1e-12));
                const long a_ref =
                    std::max(0L, static_cast<long>(std::ceil((q.d - 1.0) / 2.0 - 1e-12)));
                const long cd_ref = static_cast<long>(std::ceil(q.d - 1e-12));
                if (q.b != b_ref || q.a != a_ref || q.ceil_d != cd_ref || q.a > q.b ||
                    q.a_p1 != std::max(0L, cd_ref - 1)) {
                    ok = false;
                    detail = "mismatch at pair (" + std::to_string(i) + "," + std::to_string(j) +
                             ")";
                }
            }
        log.check("cone_quantities", ok, detail.empty() ? "ceil identities hold" : detail);
    } else {
        log.skip("cone_quantities", "couplings carry no finite range");
    }

    // Every applicable bound must dominate the exact kernel on the grid.
    {
        lrharm::SweepSpec spec;
        if (cfg.contains("theorems")) {
            spec.theorems = lrharm::theorems_from_json(cfg.at("theorems"));
        } else if (lr) {
            spec.theorems = {lrharm::Theorem::local, lrharm::Theorem::local_cone};
            if (p1) {
                spec.theorems.push_back(lrharm::Theorem::local_p1);
                spec.theorems.push_back(lrharm::Theorem::local_p1_cone);
            }
        } else if (cp.algebraic() && dp) {
            spec.theorems = {lrharm::Theorem::nonlocal};
        }
        if (spec.theorems.empty()) {
            log.skip("bound_dominance", "no applicable theorem family for these couplings");
        } else {
            spec.t_grid = t_grid;
            spec.series_tol = tol;
            spec.jobs = o.jobs;
            const lrharm::BoundReport rep =
                lrharm::tightness_sweep(g, cp, dp ? &*dp : nullptr, spec);
            log.check("bound_dominance", rep.summary.violations == 0,
                      "violations=" + std::to_string(rep.summary.violations) + " min_margin=" +
                          lrharm::format_double(rep.summary.min_margin));
            if (o.strict && rep.summary.applicable < rep.summary.rows) {
                std::cerr << "strict: " << (rep.summary.rows - rep.summary.applicable)
                          << " inapplicable rows\n";
                return kExitStrict;
            }
        }
    }

    // Optional: re-validate a previously emitted bound report.
    if (cfg.contains("fixture")) {
        const std::string path = cfg.at("fixture").get<std::string>();
        std::ifstream is(path, std::ios::binary);
        if (!is) throw std::runtime_error("cannot read fixture: " + path);
        const lrharm::BoundReport rep = lrharm::read_bound_report_csv(is);
        long bad = 0;
        for (const lrharm::BoundRow& r : rep.rows) {
            if (!r.applicable()) continue;
            const double slack = std::max(1e-10, 1e-10 * std::abs(r.bound));
            if (r.exact > r.bound + slack) {
                if (bad == 0)
                    std::cout << "violation: i=" << r.i << " j=" << r.j << " kind="
                              << lrharm::kind_name(r.kind) << " theorem="
                              << lrharm::theorem_name(r.theorem) << " t="
                              << lrharm::format_double(r.t) << " bound="
                              << lrharm::format_double(r.bound) << " exact="
                              << lrharm::format_double(r.exact) << "\n";
                ++bad;
            }
        }
        log.check("fixture_dominance", bad == 0,
                  bad == 0 ? std::to_string(rep.rows.size()) + " rows re-validated"
                           : std::to_string(bad) + " violating rows");
    }

    if (log.failures > 0) {
        std::cout << log.failures << " check(s) failed\n";
        return kExitFail;
    }
    std::cout << "all checks passed\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"locality bounds for harmonic lattice dynamics"};
    app.require_subcommand(1);

    CommonOpts kernels_o, bounds_o, weyl_o, kg_o, tight_o, verify_o;
    CLI::App* c_kernels = app.add_subcommand("kernels", "commutator kernels at one time");
    add_common(c_kernels, kernels_o);
    CLI::App* c_bounds = app.add_subcommand("bounds", "bound/exact dominance report at one time");
    add_common(c_bounds, bounds_o);
    CLI::App* c_weyl = app.add_subcommand("weyl", "Weyl-operator commutator bound chain");
    add_common(c_weyl, weyl_o);
    CLI::App* c_kg = app.add_subcommand("kg-scan", "discretized-field light-cone scan");
    add_common(c_kg, kg_o);
    CLI::App* c_tight = app.add_subcommand("tightness", "dominance sweep over a time grid");
    add_common(c_tight, tight_o);
    CLI::App* c_verify = app.add_subcommand("verify", "run the invariant suite on a config");
    add_common(c_verify, verify_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitFail;
    }

    try {
        if (c_kernels->parsed()) return run_kernels(kernels_o);
        if (c_bounds->parsed()) return run_sweep(bounds_o, true);
        if (c_weyl->parsed()) return run_weyl(weyl_o);
        if (c_kg->parsed()) return run_kg_scan(kg_o);
        if (c_tight->parsed()) return run_sweep(tight_o, false);
        if (c_verify->parsed()) return run_verify(verify_o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitFail;
}
