#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "domset/error.hpp"
#include "domset/graph.hpp"
#include "domset/rng.hpp"

namespace domset {

enum class GraphFamily { ER, BA };

inline std::string family_name(GraphFamily f) { return f == GraphFamily::ER ? "er" : "ba"; }

inline GraphFamily family_from_name(const std::string& s) {
    if (s == "er") return GraphFamily::ER;
    if (s == "ba") return GraphFamily::BA;
    throw ParamError("unknown graph family \"" + s + "\" (expected er or ba)");
}

struct GenParams {
    GraphFamily family = GraphFamily::ER;
    int n = 0;
    double p = 0.0;      // ER edge probability
    int m = 0;           // BA attachment count
    std::uint64_t seed = 0;

    bool operator==(const GenParams&) const = default;
};

// G(n, p): every unordered pair {u, v} is drawn once, in lexicographic order
// (u, v) with u < v, and kept with probability p. One PRNG draw per pair.
inline Graph erdos_renyi(int n, double p, std::uint64_t seed) {
    if (n < 0) throw ParamError("vertex count must be nonnegative, got " + std::to_string(n));
    if (!(p >= 0.0 && p <= 1.0))
        throw ParamError("edge probability must lie in [0,1], got " + std::to_string(p));
    Xoshiro256 rng(seed);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.next_double() < p) edges.emplace_back(u, v);
    return Graph::from_edges(n, edges);
}

// G(n, m) preferential attachment. Starts from m isolated vertices; vertex m
// connects to all of them; every later vertex connects to m distinct existing
// vertices sampled proportionally to current degree (repeated draws from an
// endpoint multiset, duplicates rejected). Edge count is exactly m * (n - m).
inline Graph barabasi_albert(int n, int m, std::uint64_t seed) {
    if (m < 1 || m >= n)
        throw ParamError("attachment count must satisfy 1 <= m < n, got m=" + std::to_string(m) +
                         ", n=" + std::to_string(n));
    Xoshiro256 rng(seed);
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(n - m));

    // One entry per edge endpoint; uniform sampling from it is degree-proportional.
    std::vector<int> endpoints;
    endpoints.reserve(2 * edges.capacity());

    for (int t = 0; t < m; ++t) {
        edges.emplace_back(t, m);
        endpoints.push_back(t);
    }
    for (int t = 0; t < m; ++t) endpoints.push_back(m);

    std::vector<int> targets;
    for (int v = m + 1; v < n; ++v) {
        targets.clear();
        while (static_cast<int>(targets.size()) < m) {
            const int t = endpoints[rng.next_below(endpoints.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end())
                targets.push_back(t);
        }
        // Degrees update only once the vertex has chosen all m targets.
        for (int t : targets) {
            edges.emplace_back(std::min(t, v), std::max(t, v));
            endpoints.push_back(t);
        }
        for (int i = 0; i < m; ++i) endpoints.push_back(v);
    }
    return Graph::from_edges(n, edges);
}

inline Graph generate(const GenParams& params) {
    if (params.family == GraphFamily::ER) return erdos_renyi(params.n, params.p, params.seed);
    return barabasi_albert(params.n, params.m, params.seed);
}

}  // namespace domset
