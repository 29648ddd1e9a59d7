#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "domset/error.hpp"

namespace domset {

using VertexSet = std::vector<int>;

// Simple undirected graph with vertices 0..n-1 and sorted adjacency lists.
// Immutable after construction; the constructor path enforces no self-loops,
// symmetry and in-range endpoints.
class Graph {
public:
    Graph() = default;

    static Graph edgeless(int n) {
        require_vertex_count(n);
        Graph g;
        g.n_ = n;
        g.adj_.resize(static_cast<std::size_t>(n));
        return g;
    }

    static Graph from_edges(int n, std::span<const std::pair<int, int>> edges) {
        Graph g = edgeless(n);
        for (auto [u, v] : edges) {
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw IndexError("edge endpoint out of range: (" + std::to_string(u) + "," +
                                 std::to_string(v) + ") with n=" + std::to_string(n));
            if (u == v)
                throw ParamError("self-loop at vertex " + std::to_string(u));
            g.adj_[static_cast<std::size_t>(u)].push_back(v);
            g.adj_[static_cast<std::size_t>(v)].push_back(u);
        }
        for (auto& nbrs : g.adj_) {
            std::sort(nbrs.begin(), nbrs.end());
            nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        }
        return g;
    }

    static Graph from_edges(int n, std::initializer_list<std::pair<int, int>> edges) {
        return from_edges(n, std::span<const std::pair<int, int>>(edges.begin(), edges.size()));
    }

    int vertex_count() const { return n_; }

    int degree(int v) const {
        check_vertex(v);
        return static_cast<int>(adj_[static_cast<std::size_t>(v)].size());
    }

    // Neighbors in ascending vertex order.
    const std::vector<int>& neighbors(int v) const {
        check_vertex(v);
        return adj_[static_cast<std::size_t>(v)];
    }

    bool has_edge(int u, int v) const {
        check_vertex(u);
        check_vertex(v);
        const auto& nbrs = adj_[static_cast<std::size_t>(u)];
        return std::binary_search(nbrs.begin(), nbrs.end(), v);
    }

    int edge_count() const {
        std::size_t twice = 0;
        for (const auto& nbrs : adj_) twice += nbrs.size();
        return static_cast<int>(twice / 2);
    }

    // Edges as (u, v) with u < v, sorted lexicographically.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(static_cast<std::size_t>(edge_count()));
        for (int u = 0; u < n_; ++u)
            for (int v : adj_[static_cast<std::size_t>(u)])
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    int max_degree() const {
        int d = 0;
        for (const auto& nbrs : adj_) d = std::max(d, static_cast<int>(nbrs.size()));
        return d;
    }

    bool operator==(const Graph&) const = default;

private:
    static void require_vertex_count(int n) {
        if (n < 0) throw ParamError("vertex count must be nonnegative, got " + std::to_string(n));
    }
    void check_vertex(int v) const {
        if (v < 0 || v >= n_)
            throw IndexError("vertex " + std::to_string(v) + " out of range [0," +
                             std::to_string(n_) + ")");
    }

    int n_ = 0;
    std::vector<std::vector<int>> adj_;
};

// True iff every vertex outside d has at least one neighbor in d.
inline bool is_dominating_set(const Graph& g, const VertexSet& d) {
    const int n = g.vertex_count();
    std::vector<char> covered(static_cast<std::size_t>(n), 0);
    for (int v : d) {
        if (v < 0 || v >= n)
            throw IndexError("set member " + std::to_string(v) + " out of range [0," +
                             std::to_string(n) + ")");
        covered[static_cast<std::size_t>(v)] = 1;
        for (int u : g.neighbors(v)) covered[static_cast<std::size_t>(u)] = 1;
    }
    return std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });
}

// Relabels vertices: vertex v becomes perm[v]. perm must be a bijection on [0, n).
inline Graph permute(const Graph& g, std::span<const int> perm) {
    const int n = g.vertex_count();
    if (static_cast<int>(perm.size()) != n)
        throw ParamError("permutation size " + std::to_string(perm.size()) +
                         " does not match vertex count " + std::to_string(n));
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)])
            throw ParamError("permutation is not a bijection on [0," + std::to_string(n) + ")");
        seen[static_cast<std::size_t>(p)] = 1;
    }
    std::vector<std::pair<int, int>> relabeled;
    relabeled.reserve(static_cast<std::size_t>(g.edge_count()));
    for (auto [u, v] : g.edges())
        relabeled.emplace_back(perm[static_cast<std::size_t>(u)], perm[static_cast<std::size_t>(v)]);
    return Graph::from_edges(n, relabeled);
}

inline Graph permute(const Graph& g, const std::vector<int>& perm) {
    return permute(g, std::span<const int>(perm));
}

// -- small standard families, used by tests and demos --------------------

inline Graph complete_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return Graph::from_edges(n, e);
}

inline Graph path_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
    return Graph::from_edges(n, e);
}

inline Graph cycle_graph(int n) {
    if (n < 3) throw ParamError("cycle needs at least 3 vertices, got " + std::to_string(n));
    std::vector<std::pair<int, int>> e;
    for (int v = 0; v < n; ++v) e.emplace_back(std::min(v, (v + 1) % n), std::max(v, (v + 1) % n));
    return Graph::from_edges(n, e);
}

// Star K_{1,leaves} with the hub at vertex 0.
inline Graph star_graph(int leaves) {
    std::vector<std::pair<int, int>> e;
    for (int v = 1; v <= leaves; ++v) e.emplace_back(0, v);
    return Graph::from_edges(leaves + 1, e);
}

}  // namespace domset
