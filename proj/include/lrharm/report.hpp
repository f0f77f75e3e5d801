#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bounds.hpp"
#include "dynamics.hpp"
#include "experiments.hpp"

namespace lrharm {

// Fixed 17-significant-digit rendering: enough to round-trip any double, and
// byte-stable across runs. Non-finite values spell out as inf/-inf/nan.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// JSON value for a double: a plain number when finite (nlohmann renders these
// with shortest-round-trip digits, deterministically), a string otherwise
// (JSON has no literal for infinities and null would lose the sign).
inline nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

enum class OutputFormat { csv, json };

inline OutputFormat format_from_name(std::string_view s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown output format: " + std::string(s) +
                                " (expected csv or json)");
}

// ---- kernels ----

inline void write_kernels_csv(std::ostream& os, const KernelSet& ks) {
    os << "i,j,kind,value\n";
    const int n = static_cast<int>(ks.Cxx.rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (Kind k : kAllKinds)
                os << i << ',' << j << ',' << kind_name(k) << ','
                   << format_double(ks.kernel(k)(i, j)) << '\n';
}

inline nlohmann::json kernels_to_json(const KernelSet& ks) {
    nlohmann::json j;
    j["t"] = json_number(ks.t);
    j["method"] = ks.method == KernelMethod::series ? "series" : "spectral";
    j["certified_error"] = json_number(ks.certified_error);
    j["fp_error"] = json_number(ks.fp_error);
    const int n = static_cast<int>(ks.Cxx.rows());
    for (Kind k : kAllKinds) {
        nlohmann::json rows = nlohmann::json::array();
        const Eigen::MatrixXd& m = ks.kernel(k);
        for (int i = 0; i < n; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int jj = 0; jj < n; ++jj) row.push_back(json_number(m(i, jj)));
            rows.push_back(std::move(row));
        }
        j["kernels"][kind_name(k)] = std::move(rows);
    }
    return j;
}

// ---- light-cone table ----

inline void write_lightcone_csv(std::ostream& os, const LightconeTable& table) {
    os << "N,t,value,cone_flag\n";
    for (const LightconeRow& r : table.rows)
        os << r.side << ',' << format_double(r.t) << ',' << format_double(r.value) << ','
           << (r.cone_flag ? 1 : 0) << '\n';
}

inline nlohmann::json lightcone_to_json(const LightconeTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const LightconeRow& r : table.rows) {
        nlohmann::json row;
        row["N"] = r.side;
        row["t"] = json_number(r.t);
        row["value"] = json_number(r.value);
        row["cone_flag"] = r.cone_flag;
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"rows", std::move(rows)}};
}

// ---- bound report ----

inline void write_bound_report_csv(std::ostream& os, const BoundReport& rep) {
    os << "i,j,kind,theorem,t,tau,d_ij,bound,exact,margin,inside_cone\n";
    for (const BoundRow& r : rep.rows)
        os << r.i << ',' << r.j << ',' << kind_name(r.kind) << ',' << theorem_name(r.theorem)
           << ',' << format_double(r.t) << ',' << format_double(r.tau) << ','
           << format_double(r.d) << ',' << format_double(r.bound) << ','
           << format_double(r.exact) << ',' << format_double(r.margin) << ','
           << (r.inside_cone ? 1 : 0) << '\n';
}

inline nlohmann::json summary_to_json(const BoundSummary& sm) {
    nlohmann::json j;
    j["rows"] = sm.rows;
    j["applicable"] = sm.applicable;
    j["violations"] = sm.violations;
    j["min_margin"] = json_number(sm.min_margin);
    j["fraction_inside"] = json_number(sm.fraction_inside);
    j["kernel_error"] = json_number(sm.kernel_error);
    return j;
}

inline nlohmann::json bound_report_to_json(const BoundReport& rep) {
    nlohmann::json rows = nlohmann::json::array();
    for (const BoundRow& r : rep.rows) {
        nlohmann::json row;
        row["i"] = r.i;
        row["j"] = r.j;
        row["kind"] = kind_name(r.kind);
        row["theorem"] = theorem_name(r.theorem);
        row["t"] = json_number(r.t);
        row["tau"] = json_number(r.tau);
        row["d_ij"] = json_number(r.d);
        row["bound"] = json_number(r.bound);
        row["exact"] = json_number(r.exact);
        row["margin"] = json_number(r.margin);
        row["inside_cone"] = r.inside_cone;
        if (!r.reason.empty()) row["reason"] = r.reason;
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"rows", std::move(rows)}, {"summary", summary_to_json(rep.summary)}};
}

// ---- fixture ingestion ----

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline double parse_double_field(const std::string& s, long line_no) {
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);  // accepts inf/-inf/nan spellings
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("bound report line " + std::to_string(line_no) +
                                 ": bad numeric field '" + s + "'");
    }
}
}  // namespace detail

// Parses a CSV produced by write_bound_report_csv and recomputes the summary.
// Rows with a non-finite bound are treated as inapplicable (dominance holds
// vacuously); kernel_error is unknown from a file and stays 0.
inline BoundReport read_bound_report_csv(std::istream& is) {
    static constexpr const char* kHeader = "i,j,kind,theorem,t,tau,d_ij,bound,exact,margin,inside_cone";
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("bound report: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader)
        throw std::runtime_error("bound report: unexpected header '" + line + "'");
    BoundReport rep;
    long line_no = 1;
    long inside = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> f = detail::split_csv_line(line);
        if (f.size() != 11)
            throw std::runtime_error("bound report line " + std::to_string(line_no) +
                                     ": expected 11 fields, got " + std::to_string(f.size()));
        BoundRow r;
        r.i = static_cast<int>(detail::parse_double_field(f[0], line_no));
        r.j = static_cast<int>(detail::parse_double_field(f[1], line_no));
        r.kind = kind_from_name(f[2]);
        r.theorem = theorem_from_name(f[3]);
        r.t = detail::parse_double_field(f[4], line_no);
        r.tau = detail::parse_double_field(f[5], line_no);
        r.d = detail::parse_double_field(f[6], line_no);
        r.bound = detail::parse_double_field(f[7], line_no);
        r.exact = detail::parse_double_field(f[8], line_no);
        r.margin = detail::parse_double_field(f[9], line_no);
        if (f[10] != "0" && f[10] != "1")
            throw std::runtime_error("bound report line " + std::to_string(line_no) +
                                     ": inside_cone must be 0 or 1");
        r.inside_cone = f[10] == "1";
        r.dominated = r.exact <= r.bound;
        if (std::isinf(r.bound) && r.bound > 0.0) r.reason = "not applicable (from file)";
        if (r.inside_cone) ++inside;
        rep.rows.push_back(std::move(r));
    }
    BoundSummary& sm = rep.summary;
    sm.rows = static_cast<long>(rep.rows.size());
    for (const BoundRow& r : rep.rows)
        if (r.applicable()) {
            ++sm.applicable;
            if (!r.dominated) ++sm.violations;
            if (r.margin < sm.min_margin) sm.min_margin = r.margin;
        }
    sm.fraction_inside = sm.rows > 0 ? static_cast<double>(inside) / sm.rows : 0.0;
    return rep;
}

// ---- emission ----

namespace detail {
inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << text;
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }
}  // namespace detail

inline std::string render_report(const KernelSet& ks, OutputFormat fmt) {
    if (fmt == OutputFormat::csv) {
        std::ostringstream os;
        write_kernels_csv(os, ks);
        return os.str();
    }
    return detail::json_text(kernels_to_json(ks));
}

inline std::string render_report(const LightconeTable& table, OutputFormat fmt) {
    if (fmt == OutputFormat::csv) {
        std::ostringstream os;
        write_lightcone_csv(os, table);
        return os.str();
    }
    return detail::json_text(lightcone_to_json(table));
}

inline std::string render_report(const BoundReport& rep, OutputFormat fmt) {
    if (fmt == OutputFormat::csv) {
        std::ostringstream os;
        write_bound_report_csv(os, rep);
        return os.str();
    }
    return detail::json_text(bound_report_to_json(rep));
}

template <class Report>
inline void emit_report(const Report& rep, OutputFormat fmt, const std::string& path) {
    detail::write_text_file(path, render_report(rep, fmt));
}

}  // namespace lrharm
