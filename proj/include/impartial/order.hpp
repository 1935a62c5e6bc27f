#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "impartial/score_matrix.hpp"

namespace impartial {

/// True iff (fs, s) precedes (ft, t) in the scored order: smaller value
/// first, ties resolved by the canonical set order.
inline bool scored_less(const Rational& fs, const AgentSubset& s, const Rational& ft,
                        const AgentSubset& t) {
    if (fs != ft) return fs < ft;
    return lex_set_compare(s, t) == std::strong_ordering::less;
}

/// Unique maximum of phi over the candidates: maximal value, and among ties
/// the canonically greatest set. Callers must pass at least one candidate.
template <typename Phi>
AgentSubset scored_argmax(const std::vector<AgentSubset>& candidates, Phi&& phi) {
    if (candidates.empty()) throw contract_error("scored_argmax over empty candidates");
    const AgentSubset* best = &candidates.front();
    Rational best_value = phi(*best);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        Rational value = phi(candidates[i]);
        if (scored_less(best_value, *best, value, candidates[i])) {
            best = &candidates[i];
            best_value = value;
        }
    }
    return *best;
}

/// Unique minimum: minimal value, and among ties the canonically least set.
template <typename Phi>
AgentSubset scored_argmin(const std::vector<AgentSubset>& candidates, Phi&& phi) {
    if (candidates.empty()) throw contract_error("scored_argmin over empty candidates");
    const AgentSubset* best = &candidates.front();
    Rational best_value = phi(*best);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        Rational value = phi(candidates[i]);
        if (scored_less(value, candidates[i], best_value, *best)) {
            best = &candidates[i];
            best_value = value;
        }
    }
    return *best;
}

/// Score density of agent i: total received score divided by its size.
inline Rational density(const ScoreMatrix& w, const std::vector<Rational>& sizes, AgentId i) {
    if (static_cast<int>(sizes.size()) != w.size())
        throw contract_error("size vector length mismatch");
    if (sizes[i].sign() <= 0) throw contract_error("density requires a positive size");
    return w.agent_total(i) / sizes[i];
}

/// Agents sorted by strictly decreasing density; equal densities keep the
/// lower index first (the singleton tie-break of the canonical order).
inline std::vector<AgentId> greedy_order(const ScoreMatrix& w, const std::vector<Rational>& sizes) {
    std::vector<Rational> rho(static_cast<std::size_t>(w.size()));
    for (AgentId i = 0; i < w.size(); ++i) rho[i] = density(w, sizes, i);
    std::vector<AgentId> order(static_cast<std::size_t>(w.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](AgentId a, AgentId b) {
        if (rho[a] != rho[b]) return rho[b] < rho[a];
        return a < b;
    });
    return order;
}

} // namespace impartial
