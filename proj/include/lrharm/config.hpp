#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "couplings.hpp"
#include "experiments.hpp"
#include "graph.hpp"
#include "weyl.hpp"

namespace lrharm {

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read config: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key,
                                           const char* who) {
    const auto it = j.find(key);
    if (it == j.end())
        throw std::invalid_argument(std::string(who) + ": missing required field '" + key + "'");
    return *it;
}

template <class T>
inline T field_or(const nlohmann::json& j, const char* key, T fallback) {
    const auto it = j.find(key);
    return it == j.end() ? fallback : it->get<T>();
}

}  // namespace detail

// {"generator": "path"|"ring"|"cubic"|"edges", ...}. Edge-list form carries
// "n" and "edges" as an array of [i, j] pairs with 0-based indices.
inline Graph graph_from_json(const nlohmann::json& j) {
    const std::string gen = detail::require_field(j, "generator", "graph").get<std::string>();
    if (gen == "path") return path_graph(detail::require_field(j, "n", "graph").get<int>());
    if (gen == "ring") return ring_graph(detail::require_field(j, "n", "graph").get<int>());
    if (gen == "cubic") {
        const int side = detail::require_field(j, "side", "graph").get<int>();
        const int dim = detail::field_or(j, "dim", 1);
        const bool periodic = detail::field_or(j, "periodic", true);
        return cubic_graph(side, dim, periodic);
    }
    if (gen == "edges") {
        const int n = detail::require_field(j, "n", "graph").get<int>();
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : detail::require_field(j, "edges", "graph")) {
            if (!e.is_array() || e.size() != 2)
                throw std::invalid_argument("graph: each edge must be a pair [i, j]");
            edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        return Graph(n, edges);
    }
    throw std::invalid_argument("graph: unknown generator '" + gen + "'");
}

// Accepts a matrix as nested rows [[...], ...] or as a flat row-major array
// of n*n reals.
inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, int n, const char* who) {
    Eigen::MatrixXd m(n, n);
    if (!j.is_array()) throw std::invalid_argument(std::string(who) + ": matrix must be an array");
    if (!j.empty() && j[0].is_array()) {
        if (static_cast<int>(j.size()) != n)
            throw std::invalid_argument(std::string(who) + ": matrix row count mismatch");
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(j[i].size()) != n)
                throw std::invalid_argument(std::string(who) + ": matrix column count mismatch");
            for (int k = 0; k < n; ++k) m(i, k) = j[i][k].get<double>();
        }
        return m;
    }
    if (static_cast<long>(j.size()) != static_cast<long>(n) * n)
        throw std::invalid_argument(std::string(who) + ": flat matrix must hold n*n entries");
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) m(i, k) = j[static_cast<size_t>(i) * n + k].get<double>();
    return m;
}

inline Locality locality_from_json(const nlohmann::json& j) {
    const std::string type = detail::require_field(j, "type", "locality").get<std::string>();
    if (type == "local_range") return LocalRange{detail::require_field(j, "range", "locality").get<int>()};
    if (type == "algebraic")
        return AlgebraicDecay{detail::require_field(j, "c0", "locality").get<double>(),
                              detail::require_field(j, "eta", "locality").get<double>()};
    if (type == "unconstrained") return Unconstrained{};
    throw std::invalid_argument("locality: unknown type '" + type + "'");
}

// {"rule": "spring_chain"|"algebraic"|"random_local"|"explicit", ...}
inline CouplingPair couplings_from_json(const Graph& g, const nlohmann::json& j) {
    const std::string rule = detail::require_field(j, "rule", "couplings").get<std::string>();
    if (rule == "spring_chain")
        return spring_chain(g, detail::field_or(j, "omega", 1.0), detail::field_or(j, "kappa", 1.0));
    if (rule == "algebraic")
        return algebraic_couplings(g, detail::require_field(j, "c0", "couplings").get<double>(),
                                   detail::require_field(j, "eta", "couplings").get<double>(),
                                   detail::field_or(j, "alternating", false),
                                   detail::field_or(j, "p_identity", true));
    if (rule == "random_local")
        return random_local_couplings(g, detail::field_or(j, "range", 1),
                                      detail::field_or<std::uint64_t>(j, "seed", 1),
                                      detail::field_or(j, "p_identity", false),
                                      detail::field_or(j, "scale", 1.0));
    if (rule == "explicit") {
        const int n = g.size();
        Eigen::MatrixXd x = matrix_from_json(detail::require_field(j, "x", "couplings"), n,
                                             "couplings x");
        Eigen::MatrixXd p;
        const auto pit = j.find("p");
        if (pit == j.end() || (pit->is_string() && pit->get<std::string>() == "identity"))
            p = Eigen::MatrixXd::Identity(n, n);
        else
            p = matrix_from_json(*pit, n, "couplings p");
        Locality claim = Unconstrained{};
        if (const auto lit = j.find("locality"); lit != j.end()) claim = locality_from_json(*lit);
        return explicit_couplings(g, std::move(x), std::move(p), claim);
    }
    throw std::invalid_argument("couplings: unknown rule '" + rule + "'");
}

// Either an explicit array of times or {"start": a, "stop": b, "step": h};
// grid points are computed as a + k*h (no accumulation drift).
inline std::vector<double> t_grid_from_json(const nlohmann::json& j) {
    std::vector<double> grid;
    if (j.is_array()) {
        for (const auto& v : j) grid.push_back(v.get<double>());
    } else if (j.is_object()) {
        const double start = detail::require_field(j, "start", "t_grid").get<double>();
        const double stop = detail::require_field(j, "stop", "t_grid").get<double>();
        const double step = detail::require_field(j, "step", "t_grid").get<double>();
        if (!(step > 0.0)) throw std::invalid_argument("t_grid: step must be > 0");
        if (stop < start) throw std::invalid_argument("t_grid: stop must be >= start");
        const long count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long k = 0; k <= count; ++k) grid.push_back(start + static_cast<double>(k) * step);
    } else {
        throw std::invalid_argument("t_grid: expected an array or {start, stop, step}");
    }
    if (grid.empty()) throw std::invalid_argument("t_grid: empty grid");
    return grid;
}

inline std::vector<Theorem> theorems_from_json(const nlohmann::json& j) {
    std::vector<Theorem> out;
    if (!j.is_array()) throw std::invalid_argument("theorems: expected an array of names");
    for (const auto& v : j) out.push_back(theorem_from_name(v.get<std::string>()));
    if (out.empty()) throw std::invalid_argument("theorems: empty selection");
    return out;
}

// {"dim": 1, "mass": 0.0, "x": [1, 4], "sides": [8,16,32,64], "t_grid": ...}
inline KGConfig kg_config_from_json(const nlohmann::json& j) {
    KGConfig cfg;
    cfg.dim = detail::field_or(j, "dim", 1);
    cfg.mass = detail::field_or(j, "mass", 0.0);
    if (const auto it = j.find("x"); it != j.end()) {
        if (!it->is_array() || it->size() != 2)
            throw std::invalid_argument("kg: x must be a rational pair [num, den]");
        cfg.x_num = (*it)[0].get<long>();
        cfg.x_den = (*it)[1].get<long>();
        if (cfg.x_den <= 0) throw std::invalid_argument("kg: x denominator must be > 0");
    }
    if (const auto it = j.find("sides"); it != j.end())
        cfg.sides = it->get<std::vector<int>>();
    if (const auto it = j.find("t_grid"); it != j.end()) cfg.t_grid = t_grid_from_json(*it);
    if (cfg.sides.empty()) throw std::invalid_argument("kg: empty sides list");
    return cfg;
}

// {"support": [sites...], "xi": [x parts..., p parts...]} with |xi| = 2|support|.
// Supports must be strictly increasing so the xi entries pair with sites
// unambiguously (SiteSet stores members sorted).
inline WeylDescriptor weyl_from_json(const nlohmann::json& j) {
    std::vector<int> support =
        detail::require_field(j, "support", "weyl").get<std::vector<int>>();
    for (size_t k = 1; k < support.size(); ++k)
        if (support[k] <= support[k - 1])
            throw std::invalid_argument("weyl: support must be strictly increasing");
    const std::vector<double> xi =
        detail::require_field(j, "xi", "weyl").get<std::vector<double>>();
    Eigen::VectorXd v(static_cast<long>(xi.size()));
    for (size_t k = 0; k < xi.size(); ++k) v(static_cast<long>(k)) = xi[k];
    return WeylDescriptor(SiteSet(std::move(support)), std::move(v));
}

}  // namespace lrharm
