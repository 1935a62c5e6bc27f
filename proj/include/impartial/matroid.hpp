#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "impartial/distribution.hpp"
#include "impartial/systems.hpp"

namespace impartial {

namespace detail {

inline void require_matroid(const IndependenceSystem& sys, const char* what) {
    if (!sys.is_matroid_kind())
        throw contract_error(std::string(what) + " requires a matroid kind (uniform, partition or graphic)");
}

} // namespace detail

/// Elements whose addition to S does not increase its rank. Contains S.
inline AgentSubset span(const IndependenceSystem& sys, const AgentSubset& s) {
    detail::require_matroid(sys, "span");
    int r = sys.rank(s);
    AgentSubset out = AgentSubset::empty(sys.ground_size());
    for (AgentId e = 0; e < sys.ground_size(); ++e)
        if (sys.rank(s.with(e)) == r) out = out.with(e);
    return out;
}

/// Maximum-weight basis by the greedy rule: elements in decreasing weight,
/// ties to the lower index, keeping whatever stays independent. On a matroid
/// instance this reproduces the canonically tie-broken optimum exactly.
inline AgentSubset greedy_basis(const IndependenceSystem& sys, const std::vector<Rational>& weights) {
    detail::require_matroid(sys, "greedy_basis");
    if (static_cast<int>(weights.size()) != sys.ground_size())
        throw contract_error("greedy_basis weight vector length mismatch");
    for (const Rational& w : weights)
        if (w.sign() < 0) throw contract_error("greedy_basis weights must be nonnegative");
    return detail::argmax_matroid_greedy(sys, weights, AgentSubset::full(sys.ground_size()));
}

namespace detail {

// One round of the matroid-partition augmenting search: place `e` into one
// of the two classes, reshuffling along a shortest exchange path. Classes
// stay independent and disjoint. Returns false when no path exists, which
// by the matroid union theorem certifies infeasibility.
inline bool partition_insert(const IndependenceSystem& sys, AgentSubset cls[2], AgentId e) {
    int m = sys.ground_size();
    auto free_class = [&](AgentId x) -> int {
        for (int c = 0; c < 2; ++c)
            if (!cls[c].contains(x) && sys.is_independent(cls[c].with(x))) return c;
        return -1;
    };

    std::vector<AgentId> parent(static_cast<std::size_t>(m), -1);
    std::vector<int> owner(static_cast<std::size_t>(m), -1); // class holding the element when discovered
    std::vector<bool> seen(static_cast<std::size_t>(m), false);
    std::vector<AgentId> queue{e};
    seen[e] = true;

    AgentId target = -1;
    int target_class = -1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        AgentId x = queue[head];
        int fc = free_class(x);
        if (fc >= 0) {
            target = x;
            target_class = fc;
            break;
        }
        for (int c = 0; c < 2; ++c) {
            if (cls[c].contains(x)) continue;
            // x cannot enter class c freely; it may evict a member of its
            // circuit there.
            for (AgentId y : cls[c].members()) {
                if (seen[y]) continue;
                if (sys.is_independent(cls[c].without(y).with(x))) {
                    seen[y] = true;
                    parent[y] = x;
                    owner[y] = c;
                    queue.push_back(y);
                }
            }
        }
    }
    if (target < 0) return false;

    // Shift every path element into the slot its successor vacated; the
    // shortest-path discipline keeps all swaps simultaneously valid.
    cls[target_class] = cls[target_class].with(target);
    for (AgentId cur = target; cur != e; cur = parent[cur])
        cls[owner[cur]] = cls[owner[cur]].without(cur).with(parent[cur]);
    return true;
}

} // namespace detail

/// Splits S into two independent sets covering it, or reports infeasibility.
/// Feasible precisely when |T| <= 2 r(T) for every subset T of S.
inline std::optional<std::pair<AgentSubset, AgentSubset>> two_partition(const IndependenceSystem& sys,
                                                                        const AgentSubset& s) {
    detail::require_matroid(sys, "two_partition");
    if (s.ground != sys.ground_size()) throw contract_error("two_partition ground size mismatch");
    AgentSubset cls[2] = {AgentSubset::empty(s.ground), AgentSubset::empty(s.ground)};
    for (AgentId e : s.members()) {
        if (!detail::partition_insert(sys, cls, e)) return std::nullopt;
        if (!sys.is_independent(cls[0]) || !sys.is_independent(cls[1]) ||
            !cls[0].intersect(cls[1]).is_empty())
            throw std::logic_error("two_partition internal invariant violated");
    }
    return std::make_pair(cls[0], cls[1]);
}

/// Smallest subset T of s with |T| > 2 r(T); used to report why a
/// half-integral marginal vector admits no decomposition.
inline std::optional<AgentSubset> find_union_violator(const IndependenceSystem& sys, const AgentSubset& s) {
    if (s.count() > 20) return s;
    std::optional<AgentSubset> best;
    std::uint64_t sub = s.bits;
    while (true) {
        AgentSubset t(sub, s.ground);
        if (t.count() > 2 * sys.rank(t) && (!best || t.count() < best->count())) best = t;
        if (sub == 0) break;
        sub = (sub - 1) & s.bits;
    }
    return best;
}

/// Realizes a half-integral marginal vector (entries 0 or 1/2) as a lottery
/// over two independent sets with exactly those marginals. Marginals of any
/// other shape are out of contract.
inline SelectionDistribution decompose_marginals(const IndependenceSystem& sys, const MarginalVector& p) {
    detail::require_matroid(sys, "decompose_marginals");
    if (p.size() != sys.ground_size()) throw contract_error("marginal vector length mismatch");
    const Rational half(1, 2);
    AgentSubset support = AgentSubset::empty(sys.ground_size());
    for (AgentId i = 0; i < p.size(); ++i) {
        if (p[i] == half)
            support = support.with(i);
        else if (!p[i].is_zero())
            throw contract_error("decompose_marginals supports only marginals in {0, 1/2}");
    }
    if (support.is_empty())
        return SelectionDistribution::point_mass(AgentSubset::empty(sys.ground_size()));
    auto parts = two_partition(sys, support);
    if (!parts) {
        auto violator = find_union_violator(sys, support);
        throw contract_error("marginals violate the rank condition on set " +
                             (violator ? violator->str() : support.str()));
    }
    return SelectionDistribution(sys.ground_size(), {{parts->first, half}, {parts->second, half}});
}

} // namespace impartial
