#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "domset/bitset.hpp"
#include "domset/error.hpp"
#include "domset/graph.hpp"

namespace domset {

struct SolveResult {
    int gamma = 0;
    VertexSet witness;
    std::uint64_t nodes_explored = 0;
    std::chrono::duration<double, std::milli> elapsed{0};
};

namespace detail {

// Closed neighborhoods N[v] packed into fixed-width bitsets.
template <unsigned Words>
struct ClosedNeighborhoods {
    explicit ClosedNeighborhoods(const Graph& g)
        : n(g.vertex_count()), closed(static_cast<std::size_t>(n)) {
        for (int v = 0; v < n; ++v) {
            auto& row = closed[static_cast<std::size_t>(v)];
            row.set(v);
            for (int u : g.neighbors(v)) row.set(u);
        }
    }

    int n;
    std::vector<FixedBitset<Words>> closed;
};

template <unsigned Words>
VertexSet to_vertex_set(const FixedBitset<Words>& bits) {
    VertexSet out;
    bits.for_each([&](int v) { out.push_back(v); });
    return out;
}

// Gosper's hack: next integer with the same popcount.
inline std::uint64_t next_same_popcount(std::uint64_t x) {
    const std::uint64_t c = x & (0 - x);
    const std::uint64_t r = x + c;
    return (((r ^ x) >> 2) / c) | r;
}

template <unsigned Words>
VertexSet greedy_impl(const ClosedNeighborhoods<Words>& nb) {
    auto undominated = FixedBitset<Words>::first_n(nb.n);
    VertexSet chosen;
    while (undominated.any()) {
        int best_v = -1, best_cover = -1;
        for (int v = 0; v < nb.n; ++v) {
            const int cover = nb.closed[static_cast<std::size_t>(v)].count_and(undominated);
            if (cover > best_cover) {
                best_cover = cover;
                best_v = v;
            }
        }
        chosen.push_back(best_v);
        undominated.subtract(nb.closed[static_cast<std::size_t>(best_v)]);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

template <unsigned Words>
struct BranchState {
    const ClosedNeighborhoods<Words>& nb;
    int coverage_cap;    // 1 + max degree; each pick dominates at most this many
    std::uint64_t budget;
    std::uint64_t nodes = 0;
    int best;
    FixedBitset<Words> best_set;

    void search(FixedBitset<Words> chosen, int chosen_size, FixedBitset<Words> undominated,
                FixedBitset<Words> candidates) {
        if (undominated.none()) {
            if (chosen_size < best) {
                best = chosen_size;
                best_set = chosen;
            }
            return;
        }
        const int lower = (undominated.count() + coverage_cap - 1) / coverage_cap;
        if (chosen_size + lower >= best) return;

        if (++nodes > budget)
            throw BudgetError("node budget exhausted after " + std::to_string(budget) + " nodes",
                              best, to_vertex_set(best_set));

        // Most constrained undominated vertex: fewest remaining ways to dominate it.
        int pick = -1, pick_options = std::numeric_limits<int>::max();
        undominated.for_each([&](int u) {
            const int options = nb.closed[static_cast<std::size_t>(u)].count_and(candidates);
            if (options < pick_options) {
                pick_options = options;
                pick = u;
            }
        });
        if (pick_options == 0) return;  // pick can no longer be dominated

        auto branch_bits = nb.closed[static_cast<std::size_t>(pick)];
        branch_bits &= candidates;
        std::vector<std::pair<int, int>> order;  // (-coverage, vertex)
        branch_bits.for_each([&](int w) {
            order.emplace_back(-nb.closed[static_cast<std::size_t>(w)].count_and(undominated), w);
        });
        std::sort(order.begin(), order.end());

        for (auto [neg_cover, w] : order) {
            auto next_chosen = chosen;
            next_chosen.set(w);
            auto next_undominated = undominated;
            next_undominated.subtract(nb.closed[static_cast<std::size_t>(w)]);
            candidates.reset(w);  // later branches cover the solutions without w
            search(next_chosen, chosen_size + 1, next_undominated, candidates);
        }
    }
};

template <unsigned Words>
SolveResult branch_and_bound_impl(const Graph& g, std::uint64_t budget) {
    const auto start = std::chrono::steady_clock::now();
    ClosedNeighborhoods<Words> nb(g);

    const VertexSet seed = greedy_impl(nb);
    BranchState<Words> state{nb, 1 + g.max_degree(), budget, 0,
                             static_cast<int>(seed.size()), {}};
    for (int v : seed) state.best_set.set(v);

    auto full = FixedBitset<Words>::first_n(nb.n);
    state.search({}, 0, full, full);

    SolveResult r;
    r.gamma = state.best;
    r.witness = to_vertex_set(state.best_set);
    r.nodes_explored = state.nodes;
    r.elapsed = std::chrono::steady_clock::now() - start;
    return r;
}

template <unsigned Words>
SolveResult bruteforce_impl(const Graph& g) {
    const auto start = std::chrono::steady_clock::now();
    ClosedNeighborhoods<Words> nb(g);
    const auto full = FixedBitset<Words>::first_n(nb.n);

    SolveResult r;
    for (int k = 0; k <= nb.n; ++k) {
        if (k == 0) {
            ++r.nodes_explored;
            if (full.none()) break;  // empty graph is dominated by the empty set
            continue;
        }
        // Subsets of size k in increasing numeric (mask) order.
        const std::uint64_t limit = nb.n < 64 ? (1ULL << nb.n) : 0;
        std::uint64_t mask = (1ULL << k) - 1;
        bool found = false;
        while (limit == 0 || mask < limit) {
            ++r.nodes_explored;
            FixedBitset<Words> covered;
            std::uint64_t bits = mask;
            while (bits) {
                const int v = std::countr_zero(bits);
                covered |= nb.closed[static_cast<std::size_t>(v)];
                bits &= bits - 1;
            }
            if (covered == full) {
                r.gamma = k;
                FixedBitset<Words> members;
                members.w[0] = mask;
                r.witness = to_vertex_set(members);
                found = true;
                break;
            }
            if (mask == 0) break;
            const std::uint64_t next = next_same_popcount(mask);
            if (next < mask) break;  // overflow wrapped
            mask = next;
        }
        if (found) break;
    }
    r.elapsed = std::chrono::steady_clock::now() - start;
    return r;
}

template <typename F>
auto dispatch_on_words(int n, F&& f) {
    if (n <= 64) return f.template operator()<1u>();
    if (n <= 128) return f.template operator()<2u>();
    if (n <= 256) return f.template operator()<4u>();
    if (n <= 512) return f.template operator()<8u>();
    if (n <= 1024) return f.template operator()<16u>();
    if (n <= 2048) return f.template operator()<32u>();
    if (n <= 4096) return f.template operator()<64u>();
    throw ParamError("graphs with more than 4096 vertices are unsupported, got n=" +
                     std::to_string(n));
}

}  // namespace detail

// Exhaustive oracle: tries subsets in order of increasing cardinality and
// returns the first dominating set. Guarded to small n.
inline SolveResult domination_number_bruteforce(const Graph& g, int max_n = 16) {
    if (g.vertex_count() > max_n)
        throw ParamError("brute force limited to n <= " + std::to_string(max_n) + ", got n=" +
                         std::to_string(g.vertex_count()));
    return detail::bruteforce_impl<1u>(g);
}

// Repeatedly takes the vertex whose closed neighborhood covers the most
// currently undominated vertices (ties broken by lowest index).
inline VertexSet greedy_dominating_set(const Graph& g) {
    return detail::dispatch_on_words(g.vertex_count(), [&]<unsigned W>() {
        detail::ClosedNeighborhoods<W> nb(g);
        return detail::greedy_impl<W>(nb);
    });
}

// Exact domination number by branch and bound. Branches over the closed
// neighborhood of a most-constrained undominated vertex, seeded with the
// greedy upper bound and pruned with ceil(|undominated| / (1 + max degree)).
inline SolveResult domination_number(
    const Graph& g, std::optional<std::uint64_t> budget = std::nullopt) {
    const std::uint64_t limit = budget.value_or(std::numeric_limits<std::uint64_t>::max());
    return detail::dispatch_on_words(g.vertex_count(), [&]<unsigned W>() {
        return detail::branch_and_bound_impl<W>(g, limit);
    });
}

}  // namespace domset
