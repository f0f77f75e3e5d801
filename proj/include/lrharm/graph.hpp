#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lrharm {

// Sentinel distance for vertex pairs with no connecting path.
inline constexpr int kUnreachable = -1;

// Finite simple undirected graph with all-pairs distances cached at
// construction (one BFS per vertex). Immutable afterwards; every query is
// read-only and safe to call concurrently.
class Graph {
public:
    Graph(int n, const std::vector<std::pair<int, int>>& edge_list) : n_(n) {
        if (n < 1) throw std::invalid_argument("Graph: vertex count must be >= 1");
        std::vector<std::pair<int, int>> norm;
        norm.reserve(edge_list.size());
        for (const auto& [u, v] : edge_list) {
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw std::invalid_argument("Graph: edge endpoint out of range");
            if (u == v) throw std::invalid_argument("Graph: self-loop rejected");
            norm.emplace_back(std::min(u, v), std::max(u, v));
        }
        std::sort(norm.begin(), norm.end());
        norm.erase(std::unique(norm.begin(), norm.end()), norm.end());
        edges_ = std::move(norm);
        adj_.assign(static_cast<size_t>(n), {});
        for (const auto& [u, v] : edges_) {
            adj_[static_cast<size_t>(u)].push_back(v);
            adj_[static_cast<size_t>(v)].push_back(u);
        }
        for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
        bfs_all_pairs();
    }

    int size() const { return n_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    const std::vector<int>& neighbors(int i) const {
        check_vertex(i);
        return adj_[static_cast<size_t>(i)];
    }

    // Graph distance; kUnreachable when no path exists.
    int dist(int i, int j) const {
        check_vertex(i);
        check_vertex(j);
        return dist_[static_cast<size_t>(i) * n_ + static_cast<size_t>(j)];
    }

    bool reachable(int i, int j) const { return dist(i, j) != kUnreachable; }
    bool adjacent(int i, int j) const { return dist(i, j) == 1; }

    // Largest finite distance over all pairs.
    int diameter() const { return diameter_; }

private:
    void check_vertex(int i) const {
        if (i < 0 || i >= n_) throw std::out_of_range("Graph: vertex index out of range");
    }

    void bfs_all_pairs() {
        dist_.assign(static_cast<size_t>(n_) * n_, kUnreachable);
        diameter_ = 0;
        std::vector<int> queue(static_cast<size_t>(n_));
        for (int s = 0; s < n_; ++s) {
            int* row = dist_.data() + static_cast<size_t>(s) * n_;
            row[s] = 0;
            int head = 0, tail = 0;
            queue[static_cast<size_t>(tail++)] = s;
            while (head < tail) {
                const int u = queue[static_cast<size_t>(head++)];
                for (int v : adj_[static_cast<size_t>(u)]) {
                    if (row[v] == kUnreachable) {
                        row[v] = row[u] + 1;
                        if (row[v] > diameter_) diameter_ = row[v];
                        queue[static_cast<size_t>(tail++)] = v;
                    }
                }
            }
        }
    }

    int n_ = 0;
    int diameter_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> dist_;
};

inline Graph path_graph(int n) {
    std::vector<std::pair<int, int>> e;
    e.reserve(static_cast<size_t>(n > 0 ? n - 1 : 0));
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return Graph(n, e);
}

inline Graph ring_graph(int n) {
    if (n < 3) throw std::invalid_argument("ring_graph: need n >= 3");
    std::vector<std::pair<int, int>> e;
    e.reserve(static_cast<size_t>(n));
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    e.emplace_back(n - 1, 0);
    return Graph(n, e);
}

// Row-major-free convention: coordinate 0 varies fastest.
inline int cubic_site(int side, int dim, const std::vector<int>& coords) {
    if (static_cast<int>(coords.size()) != dim)
        throw std::invalid_argument("cubic_site: coordinate count mismatch");
    long long idx = 0;
    for (int d = dim - 1; d >= 0; --d) {
        if (coords[static_cast<size_t>(d)] < 0 || coords[static_cast<size_t>(d)] >= side)
            throw std::out_of_range("cubic_site: coordinate out of range");
        idx = idx * side + coords[static_cast<size_t>(d)];
    }
    return static_cast<int>(idx);
}

inline std::vector<int> cubic_coords(int side, int dim, int site) {
    std::vector<int> c(static_cast<size_t>(dim));
    for (int d = 0; d < dim; ++d) {
        c[static_cast<size_t>(d)] = site % side;
        site /= side;
    }
    return c;
}

inline Graph cubic_graph(int side, int dim, bool periodic) {
    if (side < 2) throw std::invalid_argument("cubic_graph: need side >= 2");
    if (dim < 1) throw std::invalid_argument("cubic_graph: need dim >= 1");
    long long n_ll = 1;
    for (int d = 0; d < dim; ++d) {
        n_ll *= side;
        if (n_ll > (1LL << 22)) throw std::invalid_argument("cubic_graph: lattice too large");
    }
    const int n = static_cast<int>(n_ll);
    std::vector<std::pair<int, int>> e;
    std::vector<int> c;
    for (int s = 0; s < n; ++s) {
        c = cubic_coords(side, dim, s);
        for (int d = 0; d < dim; ++d) {
            const int orig = c[static_cast<size_t>(d)];
            if (orig + 1 < side) {
                c[static_cast<size_t>(d)] = orig + 1;
                e.emplace_back(s, cubic_site(side, dim, c));
            } else if (periodic) {
                // side == 2 wrap duplicates the open edge; Graph dedupes it.
                c[static_cast<size_t>(d)] = 0;
                e.emplace_back(s, cubic_site(side, dim, c));
            }
            c[static_cast<size_t>(d)] = orig;
        }
    }
    return Graph(n, e);
}

// Sorted duplicate-free vertex set.
struct SiteSet {
    std::vector<int> members;

    SiteSet() = default;
    explicit SiteSet(std::vector<int> m) : members(std::move(m)) {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        if (!members.empty() && members.front() < 0)
            throw std::invalid_argument("SiteSet: negative vertex index");
    }

    bool contains(int v) const {
        return std::binary_search(members.begin(), members.end(), v);
    }
    int size() const { return static_cast<int>(members.size()); }
    bool empty() const { return members.empty(); }
};

inline void check_site_set(const Graph& g, const SiteSet& a, const char* who) {
    if (!a.members.empty() && a.members.back() >= g.size())
        throw std::out_of_range(std::string(who) + ": vertex index beyond graph size");
}

// D is user-asserted; c_d is the minimal constant on this finite graph with
// |S_r(i)| <= c_d * r^(D-1) for all i and r >= 1. sphere_table[i][r] = |S_r(i)|
// for r = 0..diameter.
struct DimensionProfile {
    int dim = 1;
    double c_d = 0.0;
    std::vector<std::vector<int>> sphere_table;
};

namespace detail {
inline double ipow_d(double base, int e) {
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= base;
    return r;
}
}  // namespace detail

inline DimensionProfile dimension_profile(const Graph& g, int dim) {
    if (dim < 1) throw std::invalid_argument("dimension_profile: need dim >= 1");
    DimensionProfile p;
    p.dim = dim;
    const int n = g.size();
    const int diam = g.diameter();
    p.sphere_table.assign(static_cast<size_t>(n),
                          std::vector<int>(static_cast<size_t>(diam) + 1, 0));
    double c = 0.0;
    for (int i = 0; i < n; ++i) {
        auto& row = p.sphere_table[static_cast<size_t>(i)];
        for (int j = 0; j < n; ++j) {
            const int d = g.dist(i, j);
            if (d >= 0) row[static_cast<size_t>(d)] += 1;
        }
        for (int r = 1; r <= diam; ++r) {
            const double ratio = row[static_cast<size_t>(r)] / detail::ipow_d(r, dim - 1);
            if (ratio > c) c = ratio;
        }
    }
    p.c_d = c;
    return p;
}

// Surface of A and the layer of A within distance r of that surface:
// boundary = {i in A | some neighbor of i lies outside A},
// layer    = {i in A | dist(i, boundary) <= r}.
inline std::pair<SiteSet, SiteSet> boundary_sets(const Graph& g, const SiteSet& a, int r) {
    check_site_set(g, a, "boundary_sets");
    if (a.empty()) throw std::invalid_argument("boundary_sets: set must be nonempty");
    if (r < 0) throw std::invalid_argument("boundary_sets: radius must be >= 0");
    std::vector<char> in_a(static_cast<size_t>(g.size()), 0);
    for (int v : a.members) in_a[static_cast<size_t>(v)] = 1;
    std::vector<int> surf;
    for (int v : a.members)
        for (int w : g.neighbors(v))
            if (!in_a[static_cast<size_t>(w)]) {
                surf.push_back(v);
                break;
            }
    std::vector<int> layer;
    for (int v : a.members)
        for (int s : surf) {
            const int d = g.dist(v, s);
            if (d != kUnreachable && d <= r) {
                layer.push_back(v);
                break;
            }
        }
    return {SiteSet(std::move(surf)), SiteSet(std::move(layer))};
}

// Minimum pairwise distance; kUnreachable when no pair is connected.
inline int set_distance(const Graph& g, const SiteSet& a, const SiteSet& b) {
    check_site_set(g, a, "set_distance");
    check_site_set(g, b, "set_distance");
    if (a.empty() || b.empty()) throw std::invalid_argument("set_distance: sets must be nonempty");
    int best = kUnreachable;
    for (int i : a.members)
        for (int j : b.members) {
            const int d = g.dist(i, j);
            if (d != kUnreachable && (best == kUnreachable || d < best)) best = d;
        }
    return best;
}

}  // namespace lrharm
