#pragma once

#include <algorithm>
#include <vector>

#include "impartial/matroid.hpp"

namespace impartial {

/// A two-way split of the ground set; the randomness consumed by the
/// bipartition mechanism.
struct Bipartition {
    AgentSubset voters;   // P1: agents whose votes count
    AgentSubset eligible; // P2: agents that may be selected

    Bipartition(AgentSubset p1, AgentSubset p2) : voters(p1), eligible(p2) {
        if (p1.ground != p2.ground || !p1.intersect(p2).is_empty() ||
            p1.unite(p2) != AgentSubset::full(p1.ground))
            throw contract_error("bipartition must split the ground set");
    }

    /// Bits of `r` select the eligible side: bit i set puts agent i into P2.
    static Bipartition from_bits(std::uint64_t r, int m) {
        AgentSubset p2(r & AgentSubset::full(m).bits, m);
        return Bipartition(p2.complement(), p2);
    }
};

/// One draw of the vertex-partition mechanism's randomness: a permutation of
/// the vertices and one of the edges. position -> element in both cases.
struct PermutationPair {
    std::vector<int> vertex_order;
    std::vector<AgentId> edge_order;

    PermutationPair(std::vector<int> eta, std::vector<AgentId> pi)
        : vertex_order(std::move(eta)), edge_order(std::move(pi)) {
        check_bijection(vertex_order, "vertex");
        check_bijection(edge_order, "edge");
    }

private:
    static void check_bijection(const std::vector<int>& p, const char* what) {
        std::vector<bool> hit(p.size(), false);
        for (int v : p) {
            if (v < 0 || v >= static_cast<int>(p.size()) || hit[static_cast<std::size_t>(v)])
                throw contract_error(std::string(what) + " permutation is not a bijection");
            hit[static_cast<std::size_t>(v)] = true;
        }
    }
};

/// Selects the maximum-score independent subset of the eligible side,
/// counting only votes from the other side.
inline AgentSubset partition_run(const Instance& inst, const Bipartition& b) {
    return constrained_opt(inst, b.voters, b.eligible);
}

// ---------------------------------------------------------------------------
// Knapsack greedy machinery
// ---------------------------------------------------------------------------

/// Greedy order together with the largest fitting prefix (the knapsack
/// greedy set) and that prefix extended by one agent when one remains.
struct GreedyState {
    std::vector<AgentId> order;
    int k = 0;
    AgentSubset kgr;
    AgentSubset ekgr;

    /// Agents strictly preceding i in the greedy order.
    AgentSubset preceding(AgentId i) const {
        AgentSubset out = AgentSubset::empty(kgr.ground);
        for (AgentId j : order) {
            if (j == i) return out;
            out = out.with(j);
        }
        throw contract_error("agent not present in greedy order");
    }
};

/// Computes the greedy state for an arbitrary capacity, which may differ
/// from the capacity of the owning system (the deterministic mechanism runs
/// on a reduced one).
inline GreedyState knapsack_greedy(const ScoreMatrix& w, const std::vector<Rational>& sizes,
                                   const Rational& capacity) {
    GreedyState st;
    st.order = greedy_order(w, sizes);
    int m = w.size();
    st.kgr = AgentSubset::empty(m);
    Rational used;
    for (AgentId i : st.order) {
        if (capacity < used + sizes[i]) break;
        used += sizes[i];
        st.kgr = st.kgr.with(i);
        ++st.k;
    }
    st.ekgr = st.k < m ? st.kgr.with(st.order[static_cast<std::size_t>(st.k)]) : st.kgr;
    return st;
}

namespace detail {

inline const KnapsackSystem& knapsack_of(const Instance& inst, const char* what) {
    if (inst.system.kind() != SystemKind::knapsack)
        throw contract_error(std::string(what) + " requires a knapsack instance");
    return inst.system.payload<KnapsackSystem>();
}

inline void require_sparsity(const ScoreMatrix& w, int d, const char* what) {
    if (d < 1) throw contract_error(std::string(what) + " requires d >= 1");
    if (w.sparsity() > d)
        throw contract_error(std::string(what) + ": score matrix sparsity " +
                             std::to_string(w.sparsity()) + " exceeds d=" + std::to_string(d));
}

} // namespace detail

inline GreedyState knapsack_greedy(const Instance& inst) {
    const auto& ks = detail::knapsack_of(inst, "knapsack_greedy");
    return knapsack_greedy(inst.scores, ks.sizes, ks.capacity);
}

/// Randomized knapsack mechanism for d-sparse scores. Collects the agents
/// that are in the extended greedy set once their own votes are removed and
/// spreads them over at most d+2 feasible sets, each drawn with probability
/// 1/(d+2); leftover mass goes to the empty set.
inline SelectionDistribution kpr(const Instance& inst, int d) {
    const auto& ks = detail::knapsack_of(inst, "kpr");
    detail::require_sparsity(inst.scores, d, "kpr");
    int m = inst.ground_size();
    const Rational share(1, d + 2);
    if (m == 0) return SelectionDistribution::point_mass(AgentSubset::empty(0));

    AgentSubset selected = AgentSubset::empty(m);
    for (AgentId i = 0; i < m; ++i) {
        GreedyState st = knapsack_greedy(inst.scores.without_row(i), ks.sizes, ks.capacity);
        if (st.ekgr.contains(i)) selected = selected.with(i);
    }
    GreedyState base = knapsack_greedy(inst);
    if (!base.ekgr.subset_of(selected))
        throw std::logic_error("kpr: extended greedy set escaped the selection set");

    // Last member of the selection set in the greedy order.
    AgentId last = -1;
    for (AgentId i : base.order)
        if (selected.contains(i)) last = i;
    if (last < 0) throw std::logic_error("kpr: empty selection set");

    std::vector<std::pair<AgentSubset, Rational>> entries;
    entries.push_back({AgentSubset::single(last, m), share});
    AgentSubset voted = AgentSubset::empty(m);
    for (AgentId j = 0; j < m; ++j)
        if (!inst.scores.at(last, j).is_zero()) voted = voted.with(j);
    for (AgentId j : voted.intersect(selected).members())
        entries.push_back({AgentSubset::single(j, m), share});
    AgentSubset rest = selected.minus(voted.with(last));
    entries.push_back({rest, share});

    Rational assigned;
    for (auto& [set, prob] : entries) assigned += prob;
    entries.push_back({AgentSubset::empty(m), Rational(1) - assigned});

    SelectionDistribution dist(m, std::move(entries));
    for (const auto& [set, prob] : dist.support())
        if (!inst.system.is_independent(set))
            throw std::logic_error("kpr produced an oversized support set");
    return dist;
}

/// Deterministic knapsack mechanism: keep every agent that makes the greedy
/// set at capacity reduced by d * s_max once its own votes are removed.
inline AgentSubset dkpr(const Instance& inst, int d, const Rational& s_max) {
    const auto& ks = detail::knapsack_of(inst, "dkpr");
    detail::require_sparsity(inst.scores, d, "dkpr");
    if (s_max.sign() <= 0) throw contract_error("dkpr requires s_max > 0");
    for (const Rational& s : ks.sizes)
        if (s_max < s) throw contract_error("dkpr: an agent size exceeds s_max");
    if (!(s_max * Rational(d + 1) < ks.capacity))
        throw contract_error("dkpr requires s_max * (d+1) < C");

    Rational reduced = ks.capacity - Rational(d) * s_max;
    int m = inst.ground_size();
    AgentSubset out = AgentSubset::empty(m);
    for (AgentId i = 0; i < m; ++i) {
        GreedyState st = knapsack_greedy(inst.scores.without_row(i), ks.sizes, reduced);
        if (st.kgr.contains(i)) out = out.with(i);
    }
    if (!inst.system.is_independent(out))
        throw std::logic_error("dkpr produced an oversized set");
    return out;
}

// ---------------------------------------------------------------------------
// Matroid plurality
// ---------------------------------------------------------------------------

/// Probability 1/2 for every agent that belongs to the greedy optimum once
/// its own votes are removed, 0 for everyone else.
inline MarginalVector mpr_marginals(const Instance& inst) {
    detail::require_matroid(inst.system, "mpr");
    detail::require_sparsity(inst.scores, 1, "mpr");
    int m = inst.ground_size();
    MarginalVector p(m);
    for (AgentId e = 0; e < m; ++e) {
        AgentSubset basis = greedy_basis(inst.system, inst.scores.without_row(e).agent_totals());
        if (basis.contains(e)) p[e] = Rational(1, 2);
    }
    return p;
}

/// The half-integral marginals realized as a lottery over two independent
/// sets.
inline SelectionDistribution mpr(const Instance& inst) {
    return decompose_marginals(inst.system, mpr_marginals(inst));
}

// ---------------------------------------------------------------------------
// Vertex partition on simple graphic matroids
// ---------------------------------------------------------------------------

namespace detail {

inline const GraphicMatroid& graphic_of(const Instance& inst, const char* what) {
    if (inst.system.kind() != SystemKind::graphic)
        throw contract_error(std::string(what) + " requires a graphic matroid instance");
    const auto& gm = inst.system.payload<GraphicMatroid>();
    if (!gm.simple) throw contract_error(std::string(what) + " requires a simple graph");
    return gm;
}

} // namespace detail

/// Edge parts induced by a vertex order: each edge joins the part of its
/// earlier endpoint. Parts are indexed by vertex position; later positions
/// may be empty.
inline std::vector<AgentSubset> induced_partition(const Instance& inst, const std::vector<int>& vertex_order) {
    const auto& gm = detail::graphic_of(inst, "induced_partition");
    std::vector<int> position(static_cast<std::size_t>(gm.vertex_count));
    for (int pos = 0; pos < gm.vertex_count; ++pos)
        position[static_cast<std::size_t>(vertex_order[static_cast<std::size_t>(pos)])] = pos;
    std::vector<AgentSubset> parts(static_cast<std::size_t>(gm.vertex_count),
                                   AgentSubset::empty(inst.ground_size()));
    for (AgentId e = 0; e < inst.ground_size(); ++e) {
        auto [u, v] = gm.edges[static_cast<std::size_t>(e)];
        int pos = std::min(position[static_cast<std::size_t>(u)], position[static_cast<std::size_t>(v)]);
        parts[static_cast<std::size_t>(pos)] = parts[static_cast<std::size_t>(pos)].with(e);
    }
    return parts;
}

/// Copy of the scores with every same-part, later-in-pi vote zeroed out: the
/// scores the vertex-partition mechanism can actually observe.
inline ScoreMatrix induced_matrix(const Instance& inst, const PermutationPair& r) {
    detail::graphic_of(inst, "induced_matrix");
    std::vector<AgentSubset> parts = induced_partition(inst, r.vertex_order);
    int m = inst.ground_size();
    std::vector<int> part_of(static_cast<std::size_t>(m), -1);
    for (int i = 0; i < static_cast<int>(parts.size()); ++i)
        for (AgentId e : parts[static_cast<std::size_t>(i)].members()) part_of[static_cast<std::size_t>(e)] = i;
    std::vector<int> pi_pos(static_cast<std::size_t>(m));
    for (int pos = 0; pos < m; ++pos) pi_pos[static_cast<std::size_t>(r.edge_order[static_cast<std::size_t>(pos)])] = pos;

    ScoreMatrix w = inst.scores;
    for (AgentId e = 0; e < m; ++e)
        for (AgentId f = 0; f < m; ++f)
            if (e != f && part_of[static_cast<std::size_t>(e)] == part_of[static_cast<std::size_t>(f)] &&
                pi_pos[static_cast<std::size_t>(e)] > pi_pos[static_cast<std::size_t>(f)])
                w.set(e, f, Rational(0));
    return w;
}

/// One realization of the vertex-partition mechanism: from every nonempty
/// part, keep a running candidate through the part's edges in pi order,
/// replacing it whenever a later edge matches or beats the candidate's
/// observed score (so ties move the candidate forward). Guarantees apply to
/// binary scores; `permissive` runs the same procedure on arbitrary scores.
inline AgentSubset vertex_partition_run(const Instance& inst, const PermutationPair& r,
                                        bool permissive = false) {
    detail::graphic_of(inst, "vertex_partition");
    if (!permissive && !inst.scores.is_binary())
        throw contract_error("vertex_partition requires binary scores (or permissive mode)");
    int m = inst.ground_size();
    std::vector<int> pi_pos(static_cast<std::size_t>(m));
    for (int pos = 0; pos < m; ++pos) pi_pos[static_cast<std::size_t>(r.edge_order[static_cast<std::size_t>(pos)])] = pos;

    AgentSubset result = AgentSubset::empty(m);
    for (const AgentSubset& part : induced_partition(inst, r.vertex_order)) {
        if (part.is_empty()) continue;
        std::vector<AgentId> in_order = part.members();
        std::sort(in_order.begin(), in_order.end(),
                  [&](AgentId a, AgentId b) { return pi_pos[static_cast<std::size_t>(a)] < pi_pos[static_cast<std::size_t>(b)]; });

        AgentSubset outside = part.complement();
        AgentId candidate = in_order.front();
        Rational observed = score_from(inst.scores, outside, AgentSubset::single(candidate, m));
        AgentSubset before = AgentSubset::empty(m); // part edges already visited
        for (std::size_t j = 1; j < in_order.size(); ++j) {
            before = before.with(in_order[j - 1]);
            AgentId e = in_order[j];
            AgentSubset r_set = outside.unite(before.without(candidate));
            if (observed <= score_from(inst.scores, r_set, AgentSubset::single(e, m))) {
                observed = score_from(inst.scores, r_set.with(candidate), AgentSubset::single(e, m));
                candidate = e;
            }
        }
        result = result.with(candidate);
    }
    if (!inst.system.is_independent(result))
        throw std::logic_error("vertex_partition selected a cyclic edge set");
    return result;
}

/// From every nonempty part, the agent with the highest value, ties to the
/// lower index.
inline AgentSubset best_from_partition(int m, const std::vector<AgentSubset>& parts,
                                       const std::vector<Rational>& phi) {
    if (static_cast<int>(phi.size()) != m) throw contract_error("best_from_partition value vector mismatch");
    AgentSubset out = AgentSubset::empty(m);
    for (const AgentSubset& part : parts) {
        if (part.is_empty()) continue;
        if (part.ground != m) throw contract_error("best_from_partition ground size mismatch");
        AgentId best = -1;
        for (AgentId e : part.members())
            if (best < 0 || phi[static_cast<std::size_t>(best)] < phi[static_cast<std::size_t>(e)]) best = e;
        out = out.with(best);
    }
    return out;
}

} // namespace impartial
