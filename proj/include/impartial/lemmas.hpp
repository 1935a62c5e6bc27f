#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "impartial/mechanisms.hpp"
#include "impartial/generators.hpp"

namespace impartial {

/// Outcome of one exact structural check.
struct LemmaCheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// ---------------------------------------------------------------------------
// Knapsack greedy properties
// ---------------------------------------------------------------------------

/// Every greedy-order prefix of total size C' scores at least
/// min(C'/C, 1) times the optimum.
inline bool check_greedy_prefix_bound(const Instance& inst) {
    const auto& ks = inst.system.payload<KnapsackSystem>();
    Rational opt = opt_score(inst);
    std::vector<Rational> totals = inst.scores.agent_totals();
    std::vector<AgentId> order = greedy_order(inst.scores, ks.sizes);
    Rational prefix_score, prefix_size;
    for (AgentId i : order) {
        prefix_score += totals[i];
        prefix_size += ks.sizes[i];
        Rational factor = prefix_size < ks.capacity ? prefix_size / ks.capacity : Rational(1);
        if (prefix_score < factor * opt) return false;
    }
    return true;
}

/// The extended greedy set survives the own-vote-removal filter.
inline bool check_extended_greedy_covered(const Instance& inst) {
    const auto& ks = inst.system.payload<KnapsackSystem>();
    GreedyState base = knapsack_greedy(inst);
    for (AgentId i : base.ekgr.members()) {
        GreedyState st = knapsack_greedy(inst.scores.without_row(i), ks.sizes, ks.capacity);
        if (!st.ekgr.contains(i)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Matroid properties
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<AgentSubset> all_bases(const IndependenceSystem& sys) {
    int m = sys.ground_size();
    int r = sys.rank(AgentSubset::full(m));
    std::vector<AgentSubset> out;
    for (std::uint64_t mask = 0, end = std::uint64_t{1} << m; mask < end; ++mask) {
        AgentSubset s(mask, m);
        if (s.count() == r && sys.is_independent(s)) out.push_back(s);
    }
    return out;
}

} // namespace detail

/// Strong base exchange: for bases B, B' and x in B \ B', some y in B' \ B
/// makes both B'+x-y and B+y-x bases.
inline bool check_strong_base_exchange(const IndependenceSystem& sys) {
    for (const AgentSubset& b1 : detail::all_bases(sys))
        for (const AgentSubset& b2 : detail::all_bases(sys))
            for (AgentId x : b1.minus(b2).members()) {
                bool found = false;
                for (AgentId y : b2.minus(b1).members())
                    if (sys.is_independent(b2.with(x).without(y)) &&
                        sys.is_independent(b1.with(y).without(x))) {
                        found = true;
                        break;
                    }
                if (!found) return false;
            }
    return true;
}

inline bool check_span_monotone(const IndependenceSystem& sys) {
    int m = sys.ground_size();
    for (std::uint64_t mask = 0, end = std::uint64_t{1} << m; mask < end; ++mask) {
        AgentSubset s(mask, m);
        AgentSubset sp = span(sys, s);
        for (AgentId e = 0; e < m; ++e)
            if (!sp.subset_of(span(sys, s.with(e)))) return false;
    }
    return true;
}

/// Greedy membership characterization: an element joins the optimum exactly
/// when it lies outside the span of the elements processed before it.
inline bool check_greedy_span_membership(const Instance& inst) {
    std::vector<Rational> totals = inst.scores.agent_totals();
    AgentSubset basis = greedy_basis(inst.system, totals);
    std::vector<AgentId> order(static_cast<std::size_t>(inst.ground_size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](AgentId a, AgentId b) {
        if (totals[a] != totals[b]) return totals[b] < totals[a];
        return a < b;
    });
    AgentSubset before = AgentSubset::empty(inst.ground_size());
    for (AgentId e : order) {
        bool in_span = span(inst.system, before).contains(e);
        if (basis.contains(e) == in_span) return false;
        before = before.with(e);
    }
    return true;
}

/// The canonical optimum is the greedy basis, byte for byte.
inline bool check_opt_is_greedy(const Instance& inst) {
    return brute_opt(inst) == greedy_basis(inst.system, inst.scores.agent_totals());
}

/// Union of the element-deleted optima is at most twice the optimum.
inline bool check_runners_up_bound(const Instance& inst) {
    int m = inst.ground_size();
    std::vector<Rational> totals = inst.scores.agent_totals();
    AgentSubset base = greedy_basis(inst.system, totals);
    AgentSubset uni = AgentSubset::empty(m);
    for (AgentId e = 0; e < m; ++e)
        uni = uni.unite(detail::argmax_matroid_greedy(inst.system, totals,
                                                      AgentSubset::full(m).without(e)));
    return uni.count() <= 2 * base.count();
}

// ---------------------------------------------------------------------------
// Vertex-partition expectations, enumerated exactly
// ---------------------------------------------------------------------------

struct VertexPartitionExpectations {
    Rational vp_score;        // E[total score of the mechanism's choice]
    Rational induced_max_sum; // E[sum over parts of the max induced score]
    Rational bp_induced;      // E[induced score of best-from-partition on induced scores]
    Rational bp_actual;       // E over vertex orders of the actual-score best-from-partition
};

inline VertexPartitionExpectations vp_expectations(const Instance& inst) {
    const auto& gm = inst.system.payload<GraphicMatroid>();
    int m = inst.ground_size();
    VertexPartitionExpectations ex;
    std::int64_t pair_count = 0, eta_count = 0;
    std::vector<Rational> actual_totals = inst.scores.agent_totals();

    std::vector<int> eta(static_cast<std::size_t>(gm.vertex_count));
    std::iota(eta.begin(), eta.end(), 0);
    do {
        ++eta_count;
        std::vector<AgentSubset> parts = induced_partition(inst, eta);
        ex.bp_actual += score_from(inst.scores, AgentSubset::full(m),
                                   best_from_partition(m, parts, actual_totals));

        std::vector<AgentId> pi(static_cast<std::size_t>(m));
        std::iota(pi.begin(), pi.end(), 0);
        do {
            ++pair_count;
            PermutationPair pp(eta, pi);
            ScoreMatrix induced = induced_matrix(inst, pp);
            std::vector<Rational> induced_totals = induced.agent_totals();

            ex.vp_score += score_from(inst.scores, AgentSubset::full(m),
                                      vertex_partition_run(inst, pp));
            for (const AgentSubset& part : parts) {
                Rational best;
                for (AgentId e : part.members()) best = std::max(best, induced_totals[e]);
                ex.induced_max_sum += best;
            }
            AgentSubset bp = best_from_partition(m, parts, induced_totals);
            for (AgentId e : bp.members()) ex.bp_induced += induced_totals[e];
        } while (std::next_permutation(pi.begin(), pi.end()));
    } while (std::next_permutation(eta.begin(), eta.end()));

    Rational pairs(pair_count), etas(eta_count);
    ex.vp_score /= pairs;
    ex.induced_max_sum /= pairs;
    ex.bp_induced /= pairs;
    ex.bp_actual /= etas;
    return ex;
}

// ---------------------------------------------------------------------------
// Suite runner
// ---------------------------------------------------------------------------

inline std::vector<LemmaCheckResult> run_lemma_suite(std::uint64_t seed = 2000) {
    std::vector<LemmaCheckResult> results;
    auto add = [&](const std::string& name, bool pass, const std::string& detail = "") {
        results.push_back({name, pass, detail});
    };

    // Knapsack greedy bounds on random d-sparse instances.
    {
        bool prefix_ok = true, covered_ok = true;
        for (int t = 0; t < 40; ++t) {
            Instance inst = gen_random(SystemKind::knapsack, 4 + t % 7, 1 + t % 3, t % 2 == 0,
                                       seed + static_cast<std::uint64_t>(t)).instance;
            if (!opt_score(inst).is_zero())
                prefix_ok = prefix_ok && check_greedy_prefix_bound(inst);
            covered_ok = covered_ok && check_extended_greedy_covered(inst);
        }
        for (char v : {'a', 'b'}) {
            Instance fig = gen_fig4(v).instance;
            prefix_ok = prefix_ok && check_greedy_prefix_bound(fig);
            covered_ok = covered_ok && check_extended_greedy_covered(fig);
        }
        add("greedy_prefix_bound", prefix_ok);
        add("extended_greedy_covered", covered_ok);
    }

    // Matroid structure on random matroids of all three kinds.
    {
        bool exchange_ok = true, span_ok = true, member_ok = true, opt_ok = true, runners_ok = true;
        SystemKind kinds[] = {SystemKind::uniform, SystemKind::partition, SystemKind::graphic};
        for (int t = 0; t < 24; ++t) {
            int m = t < 12 ? 6 : 8;
            Instance inst = gen_random(kinds[t % 3], m, 1, t % 2 == 0,
                                       seed + 100 + static_cast<std::uint64_t>(t)).instance;
            if (m <= 6) {
                exchange_ok = exchange_ok && check_strong_base_exchange(inst.system);
                span_ok = span_ok && check_span_monotone(inst.system);
            }
            member_ok = member_ok && check_greedy_span_membership(inst);
            opt_ok = opt_ok && check_opt_is_greedy(inst);
            runners_ok = runners_ok && check_runners_up_bound(inst);
        }
        add("strong_base_exchange", exchange_ok);
        add("span_monotone", span_ok);
        add("greedy_span_membership", member_ok);
        add("opt_equals_greedy_basis", opt_ok);
        add("runners_up_within_twice_basis", runners_ok);
    }

    // Vertex-partition inequalities on tiny binary graphs.
    {
        bool vp_ok = true, bp_obs_ok = true, bp_half_ok = true, equiv_ok = true;
        std::vector<Instance> graphs;
        {
            IndependenceSystem sys(2, GraphicMatroid{3, {{0, 1}, {1, 2}}, true});
            ScoreMatrix w(2);
            w.set(0, 1, Rational(1));
            w.set(1, 0, Rational(1));
            graphs.push_back(Instance(std::move(sys), std::move(w)));
        }
        for (int t = 0; t < 6; ++t)
            graphs.push_back(gen_random(SystemKind::graphic, 4 + t % 2, 2, true,
                                        seed + 200 + static_cast<std::uint64_t>(t)).instance);
        for (const Instance& inst : graphs) {
            VertexPartitionExpectations ex = vp_expectations(inst);
            vp_ok = vp_ok && !(ex.vp_score < ex.induced_max_sum);
            equiv_ok = equiv_ok && ex.bp_induced == ex.induced_max_sum;
            bp_obs_ok = bp_obs_ok && !(ex.bp_induced < Rational(2, 3) * ex.bp_actual);
            Rational opt = opt_score(inst);
            bp_half_ok = bp_half_ok && !(ex.bp_actual < Rational(1, 2) * opt);
        }
        add("vp_dominates_induced_max", vp_ok);
        add("bp_induced_equals_partwise_max", equiv_ok);
        add("bp_induced_two_thirds_of_actual", bp_obs_ok);
        add("bp_actual_half_of_opt", bp_half_ok);
    }

    return results;
}

} // namespace impartial
