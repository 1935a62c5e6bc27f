#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "impartial/order.hpp"
#include "impartial/score_matrix.hpp"

namespace impartial {

/// All subsets of cardinality at most k are independent.
struct UniformMatroid {
    int k = 0;
};

/// Ground set split into disjoint blocks; at most capacities[t] agents may
/// be chosen from block t.
struct PartitionMatroid {
    std::vector<std::vector<AgentId>> blocks;
    std::vector<int> capacities;
};

/// Agents are edges of an undirected graph; independent sets are forests.
/// With `simple` set, loops and parallel edges are rejected at construction.
struct GraphicMatroid {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges;
    bool simple = true;
};

/// Independent sets are those whose total size fits the capacity.
struct KnapsackSystem {
    std::vector<Rational> sizes;
    Rational capacity;
};

/// Arbitrary downward-closed family given by an explicit list of sets.
/// Construction closes the input downward; the empty set is always present.
struct ExplicitSystem {
    std::vector<std::uint64_t> independent; // sorted masks
};

enum class SystemKind { uniform, partition, graphic, knapsack, explicit_list };

namespace detail {

// Union-find over graph vertices, used for forest checks.
class UnionFind {
public:
    explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    // false if x and y were already connected
    bool unite(int x, int y) {
        int rx = find(x), ry = find(y);
        if (rx == ry) return false;
        parent_[rx] = ry;
        return true;
    }

private:
    std::vector<int> parent_;
};

} // namespace detail

/// Independence system over agents [0, m): a nonempty, downward-closed
/// family of "independent" subsets queried through is_independent. Concrete
/// families are the variants above. Systems are immutable after
/// construction and all queries are pure.
class IndependenceSystem {
public:
    IndependenceSystem(int m, UniformMatroid u) : m_(m), payload_(std::move(u)) {
        auto& k = std::get<UniformMatroid>(payload_);
        if (k.k < 0) throw contract_error("uniform matroid needs k >= 0");
        check_ground(m);
    }

    IndependenceSystem(int m, PartitionMatroid p) : m_(m), payload_(std::move(p)) {
        check_ground(m);
        auto& pm = std::get<PartitionMatroid>(payload_);
        if (pm.blocks.size() != pm.capacities.size())
            throw contract_error("partition matroid blocks/capacities length mismatch");
        std::vector<int> block_of(static_cast<std::size_t>(m), -1);
        for (std::size_t t = 0; t < pm.blocks.size(); ++t) {
            if (pm.capacities[t] < 0) throw contract_error("partition matroid capacity < 0");
            for (AgentId i : pm.blocks[t]) {
                if (i < 0 || i >= m) throw contract_error("partition matroid agent out of range");
                if (block_of[i] != -1) throw contract_error("partition matroid blocks overlap");
                block_of[i] = static_cast<int>(t);
            }
        }
        for (AgentId i = 0; i < m; ++i)
            if (block_of[i] == -1) throw contract_error("partition matroid blocks must cover all agents");
        block_of_ = std::move(block_of);
    }

    IndependenceSystem(int m, GraphicMatroid g) : m_(m), payload_(std::move(g)) {
        check_ground(m);
        auto& gm = std::get<GraphicMatroid>(payload_);
        if (static_cast<int>(gm.edges.size()) != m)
            throw contract_error("graphic matroid needs one edge per agent");
        std::set<std::pair<int, int>> seen;
        for (auto& [u, v] : gm.edges) {
            if (u < 0 || u >= gm.vertex_count || v < 0 || v >= gm.vertex_count)
                throw contract_error("graphic matroid edge endpoint out of range");
            if (gm.simple) {
                if (u == v) throw contract_error("simple graph admits no loops");
                auto key = std::minmax(u, v);
                if (!seen.insert({key.first, key.second}).second)
                    throw contract_error("simple graph admits no parallel edges");
            }
        }
    }

    IndependenceSystem(int m, KnapsackSystem k) : m_(m), payload_(std::move(k)) {
        check_ground(m);
        auto& ks = std::get<KnapsackSystem>(payload_);
        if (static_cast<int>(ks.sizes.size()) != m)
            throw contract_error("knapsack needs one size per agent");
        if (ks.capacity.sign() <= 0) throw contract_error("knapsack capacity must be positive");
        for (const Rational& s : ks.sizes) {
            if (s.sign() <= 0) throw contract_error("knapsack sizes must be positive");
            if (ks.capacity < s) throw contract_error("knapsack size exceeds capacity");
        }
    }

    /// Closes the given sets downward; the empty set is always independent.
    IndependenceSystem(int m, const std::vector<AgentSubset>& sets) : m_(m), payload_(ExplicitSystem{}) {
        check_ground(m);
        if (m > 20) throw contract_error("explicit system limited to ground size 20");
        std::set<std::uint64_t> closed;
        std::vector<std::uint64_t> stack{0};
        for (const AgentSubset& s : sets) {
            if (s.ground != m) throw contract_error("explicit set ground size mismatch");
            stack.push_back(s.bits);
        }
        while (!stack.empty()) {
            std::uint64_t cur = stack.back();
            stack.pop_back();
            if (!closed.insert(cur).second) continue;
            std::uint64_t b = cur;
            while (b) {
                std::uint64_t low = b & (~b + 1);
                stack.push_back(cur & ~low);
                b &= b - 1;
            }
        }
        auto& ex = std::get<ExplicitSystem>(payload_);
        ex.independent.assign(closed.begin(), closed.end());
    }

    int ground_size() const { return m_; }

    SystemKind kind() const {
        switch (payload_.index()) {
            case 0: return SystemKind::uniform;
            case 1: return SystemKind::partition;
            case 2: return SystemKind::graphic;
            case 3: return SystemKind::knapsack;
            default: return SystemKind::explicit_list;
        }
    }

    bool is_matroid_kind() const {
        SystemKind k = kind();
        return k == SystemKind::uniform || k == SystemKind::partition || k == SystemKind::graphic;
    }

    template <typename T>
    const T& payload() const {
        return std::get<T>(payload_);
    }

    bool is_independent(const AgentSubset& s) const {
        if (s.ground != m_) throw contract_error("is_independent ground size mismatch");
        switch (kind()) {
            case SystemKind::uniform:
                return s.count() <= payload<UniformMatroid>().k;
            case SystemKind::partition: {
                const auto& pm = payload<PartitionMatroid>();
                std::vector<int> used(pm.capacities.size(), 0);
                for (AgentId i : s.members()) {
                    int t = block_of_[i];
                    if (++used[t] > pm.capacities[t]) return false;
                }
                return true;
            }
            case SystemKind::graphic: {
                const auto& gm = payload<GraphicMatroid>();
                detail::UnionFind uf(gm.vertex_count);
                for (AgentId i : s.members()) {
                    auto [u, v] = gm.edges[i];
                    if (u == v || !uf.unite(u, v)) return false;
                }
                return true;
            }
            case SystemKind::knapsack: {
                const auto& ks = payload<KnapsackSystem>();
                Rational total;
                for (AgentId i : s.members()) total += ks.sizes[i];
                return total <= ks.capacity;
            }
            case SystemKind::explicit_list: {
                const auto& ex = payload<ExplicitSystem>();
                return std::binary_search(ex.independent.begin(), ex.independent.end(), s.bits);
            }
        }
        return false;
    }

    /// Cardinality of the largest independent subset of s.
    int rank(const AgentSubset& s) const {
        if (s.ground != m_) throw contract_error("rank ground size mismatch");
        switch (kind()) {
            case SystemKind::uniform:
                return std::min(s.count(), payload<UniformMatroid>().k);
            case SystemKind::partition: {
                const auto& pm = payload<PartitionMatroid>();
                std::vector<int> present(pm.capacities.size(), 0);
                for (AgentId i : s.members()) ++present[block_of_[i]];
                int r = 0;
                for (std::size_t t = 0; t < present.size(); ++t)
                    r += std::min(present[t], pm.capacities[t]);
                return r;
            }
            case SystemKind::graphic: {
                // Rank of an edge set: touched vertices minus components.
                const auto& gm = payload<GraphicMatroid>();
                detail::UnionFind uf(gm.vertex_count);
                std::vector<bool> touched(static_cast<std::size_t>(gm.vertex_count), false);
                int merges = 0;
                for (AgentId i : s.members()) {
                    auto [u, v] = gm.edges[i];
                    touched[u] = touched[v] = true;
                    if (u != v && uf.unite(u, v)) ++merges;
                }
                return merges;
            }
            case SystemKind::knapsack: {
                // Smallest-first greedy is cardinality-optimal.
                const auto& ks = payload<KnapsackSystem>();
                std::vector<Rational> sizes;
                for (AgentId i : s.members()) sizes.push_back(ks.sizes[i]);
                std::sort(sizes.begin(), sizes.end());
                Rational total;
                int r = 0;
                for (const Rational& sz : sizes) {
                    total += sz;
                    if (ks.capacity < total) break;
                    ++r;
                }
                return r;
            }
            case SystemKind::explicit_list: {
                const auto& ex = payload<ExplicitSystem>();
                int r = 0;
                for (std::uint64_t mask : ex.independent)
                    if ((mask & ~s.bits) == 0) r = std::max(r, std::popcount(mask));
                return r;
            }
        }
        return 0;
    }

    /// Cardinality of the smallest dependent set; nullopt when every subset
    /// is independent.
    std::optional<int> girth() const {
        switch (kind()) {
            case SystemKind::uniform: {
                int k = payload<UniformMatroid>().k;
                if (m_ > k) return k + 1;
                return std::nullopt;
            }
            case SystemKind::partition: {
                const auto& pm = payload<PartitionMatroid>();
                std::optional<int> g;
                for (std::size_t t = 0; t < pm.blocks.size(); ++t)
                    if (static_cast<int>(pm.blocks[t].size()) > pm.capacities[t])
                        g = g ? std::min(*g, pm.capacities[t] + 1) : pm.capacities[t] + 1;
                return g;
            }
            case SystemKind::graphic:
                return graph_girth();
            case SystemKind::knapsack: {
                // Fewest agents that overflow: take the largest sizes first.
                const auto& ks = payload<KnapsackSystem>();
                std::vector<Rational> sizes = ks.sizes;
                std::sort(sizes.begin(), sizes.end(), [](const Rational& a, const Rational& b) { return b < a; });
                Rational total;
                for (std::size_t i = 0; i < sizes.size(); ++i) {
                    total += sizes[i];
                    if (ks.capacity < total) return static_cast<int>(i) + 1;
                }
                return std::nullopt;
            }
            case SystemKind::explicit_list: {
                const auto& ex = payload<ExplicitSystem>();
                std::optional<int> g;
                for (std::uint64_t mask = 0, end = std::uint64_t{1} << m_; mask < end; ++mask) {
                    if (std::binary_search(ex.independent.begin(), ex.independent.end(), mask)) continue;
                    int c = std::popcount(mask);
                    if (!g || c < *g) g = c;
                }
                return g;
            }
        }
        return std::nullopt;
    }

private:
    void check_ground(int m) const {
        if (m < 0 || m > 64) throw contract_error("ground size must be in [0, 64]");
    }

    std::optional<int> graph_girth() const {
        const auto& gm = payload<GraphicMatroid>();
        // Loops and parallel edges give dependent sets of size 1 and 2.
        std::set<std::pair<int, int>> seen;
        bool parallel = false;
        for (auto& [u, v] : gm.edges) {
            if (u == v) return 1;
            auto key = std::minmax(u, v);
            if (!seen.insert({key.first, key.second}).second) parallel = true;
        }
        if (parallel) return 2;
        // Shortest cycle through each edge: remove it, BFS between endpoints.
        std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(gm.vertex_count));
        for (int e = 0; e < static_cast<int>(gm.edges.size()); ++e) {
            adj[gm.edges[e].first].push_back({gm.edges[e].second, e});
            adj[gm.edges[e].second].push_back({gm.edges[e].first, e});
        }
        std::optional<int> best;
        for (int e = 0; e < static_cast<int>(gm.edges.size()); ++e) {
            auto [src, dst] = gm.edges[e];
            std::vector<int> dist(static_cast<std::size_t>(gm.vertex_count), -1);
            std::vector<int> queue{src};
            dist[src] = 0;
            for (std::size_t head = 0; head < queue.size(); ++head) {
                int u = queue[head];
                for (auto [v, id] : adj[u]) {
                    if (id == e || dist[v] != -1) continue;
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
            if (dist[dst] != -1) {
                int cyc = dist[dst] + 1;
                if (!best || cyc < *best) best = cyc;
            }
        }
        return best;
    }

    int m_;
    std::variant<UniformMatroid, PartitionMatroid, GraphicMatroid, KnapsackSystem, ExplicitSystem> payload_;
    std::vector<int> block_of_; // partition matroid only
};

/// A selection problem: constraint system plus mutual scores over the same
/// ground set.
struct Instance {
    IndependenceSystem system;
    ScoreMatrix scores;

    Instance(IndependenceSystem sys, ScoreMatrix w) : system(std::move(sys)), scores(std::move(w)) {
        if (system.ground_size() != scores.size())
            throw contract_error("instance ground size mismatch between system and scores");
    }

    int ground_size() const { return system.ground_size(); }
};

namespace detail {

inline void enumeration_guard(int m, const char* what) {
    if (m > 24)
        throw budget_error(std::string(what) + " enumerates subsets and is limited to ground size 24");
}

// phi-argmax over all independent submasks of `allowed`, scoring each set by
// the sum of per-agent totals.
inline AgentSubset argmax_by_enumeration(const IndependenceSystem& sys,
                                         const std::vector<Rational>& totals,
                                         const AgentSubset& allowed) {
    int m = sys.ground_size();
    AgentSubset best = AgentSubset::empty(m);
    Rational best_score;
    bool have = false;
    std::uint64_t sub = allowed.bits;
    while (true) {
        AgentSubset cand(sub, m);
        if (sys.is_independent(cand)) {
            Rational sc;
            for (AgentId j : cand.members()) sc += totals[j];
            if (!have || scored_less(best_score, best, sc, cand)) {
                best = cand;
                best_score = sc;
                have = true;
            }
        }
        if (sub == 0) break;
        sub = (sub - 1) & allowed.bits;
    }
    return best; // the empty set is always independent, so `have` holds
}

// Greedy over a matroid restricted to `allowed`: decreasing totals, ties to
// the lower index, keep anything that stays independent.
inline AgentSubset argmax_matroid_greedy(const IndependenceSystem& sys,
                                         const std::vector<Rational>& totals,
                                         const AgentSubset& allowed) {
    std::vector<AgentId> order = allowed.members();
    std::stable_sort(order.begin(), order.end(), [&](AgentId a, AgentId b) {
        if (totals[a] != totals[b]) return totals[b] < totals[a];
        return a < b;
    });
    AgentSubset sel = AgentSubset::empty(sys.ground_size());
    for (AgentId e : order)
        if (sys.is_independent(sel.with(e))) sel = sel.with(e);
    return sel;
}

// Exact 0/1 knapsack over integerized sizes carrying the canonical
// tie-break; nullopt when the sizes do not integerize within budget.
inline std::optional<AgentSubset> argmax_knapsack_dp(const IndependenceSystem& sys,
                                                     const std::vector<Rational>& totals,
                                                     const AgentSubset& allowed) {
    constexpr std::int64_t kCapacityBudget = 1 << 20;
    const auto& ks = sys.payload<KnapsackSystem>();
    std::int64_t lcm = ks.capacity.den();
    for (AgentId i : allowed.members()) {
        std::int64_t d = ks.sizes[i].den();
        std::int64_t g = std::gcd(lcm, d);
        if (lcm / g > kCapacityBudget / d) return std::nullopt;
        lcm = lcm / g * d;
    }
    __int128 scaled_cap = static_cast<__int128>(ks.capacity.num()) * (lcm / ks.capacity.den());
    if (scaled_cap > kCapacityBudget) return std::nullopt;
    std::int64_t cap = static_cast<std::int64_t>(scaled_cap);

    int m = sys.ground_size();
    struct Cell {
        Rational score;
        std::uint64_t mask = 0;
    };
    std::vector<Cell> dp(static_cast<std::size_t>(cap) + 1);
    for (AgentId i : allowed.members()) {
        std::int64_t sz = ks.sizes[i].num() * (lcm / ks.sizes[i].den());
        for (std::int64_t c = cap; c >= sz; --c) {
            const Cell& src = dp[static_cast<std::size_t>(c - sz)];
            Cell cand{src.score + totals[i], src.mask | (std::uint64_t{1} << i)};
            Cell& cur = dp[static_cast<std::size_t>(c)];
            if (scored_less(cur.score, AgentSubset(cur.mask, m), cand.score, AgentSubset(cand.mask, m)))
                cur = cand;
        }
    }
    return AgentSubset(dp[static_cast<std::size_t>(cap)].mask, m);
}

} // namespace detail

/// The canonically tie-broken maximum-score independent subset of `allowed`,
/// counting only votes from `voters`. Matroid kinds run greedy; knapsack
/// runs an exact dynamic program when sizes integerize, otherwise falls back
/// to enumeration; explicit systems enumerate their family.
inline AgentSubset constrained_opt(const Instance& inst, const AgentSubset& voters,
                                   const AgentSubset& allowed) {
    const IndependenceSystem& sys = inst.system;
    if (voters.ground != sys.ground_size() || allowed.ground != sys.ground_size())
        throw contract_error("constrained_opt ground size mismatch");
    std::vector<Rational> totals = observed_totals(inst.scores, voters);
    switch (sys.kind()) {
        case SystemKind::uniform:
        case SystemKind::partition:
        case SystemKind::graphic:
            return detail::argmax_matroid_greedy(sys, totals, allowed);
        case SystemKind::knapsack: {
            if (auto res = detail::argmax_knapsack_dp(sys, totals, allowed)) return *res;
            detail::enumeration_guard(allowed.count(), "constrained_opt");
            return detail::argmax_by_enumeration(sys, totals, allowed);
        }
        case SystemKind::explicit_list: {
            const auto& ex = sys.payload<ExplicitSystem>();
            int m = sys.ground_size();
            AgentSubset best = AgentSubset::empty(m);
            Rational best_score;
            for (std::uint64_t mask : ex.independent) {
                if ((mask & ~allowed.bits) != 0) continue;
                AgentSubset cand(mask, m);
                Rational sc;
                for (AgentId j : cand.members()) sc += totals[j];
                if (scored_less(best_score, best, sc, cand)) {
                    best = cand;
                    best_score = sc;
                }
            }
            return best;
        }
    }
    throw contract_error("unknown system kind");
}

/// Exhaustive maximum-score independent set with the canonical tie-break;
/// the reference optimum every other route is tested against.
inline AgentSubset brute_opt(const Instance& inst) {
    int m = inst.ground_size();
    if (m > 24)
        throw budget_error("brute_opt enumerates all subsets and is limited to ground size 24; "
                           "matroid instances admit greedy_basis instead");
    std::vector<Rational> totals = inst.scores.agent_totals();
    AgentSubset best = AgentSubset::empty(m);
    Rational best_score;
    for (std::uint64_t mask = 0, end = std::uint64_t{1} << m; mask < end; ++mask) {
        AgentSubset cand(mask, m);
        if (!inst.system.is_independent(cand)) continue;
        Rational sc;
        for (AgentId j : cand.members()) sc += totals[j];
        if (scored_less(best_score, best, sc, cand)) {
            best = cand;
            best_score = sc;
        }
    }
    return best;
}

/// Score of the optimum, computed by the route appropriate to the kind.
inline Rational opt_score(const Instance& inst) {
    AgentSubset opt = inst.system.is_matroid_kind() && inst.ground_size() > 24
                          ? detail::argmax_matroid_greedy(inst.system, inst.scores.agent_totals(),
                                                          AgentSubset::full(inst.ground_size()))
                          : brute_opt(inst);
    return score_from(inst.scores, AgentSubset::full(inst.ground_size()), opt);
}

} // namespace impartial
