#pragma once

#include <optional>
#include <string>
#include <vector>

#include "impartial/engine.hpp"
#include "impartial/generators.hpp"

namespace impartial {

/// Candidate replacement rows for one agent. Every row must keep the
/// instance inside the mechanism's declared class.
struct DeviationPlan {
    AgentId agent = 0;
    std::vector<std::vector<Rational>> rows;
};

/// Throws a contract error naming the violated class constraint when the
/// replacement row would leave the mechanism's instance class.
inline void validate_deviation_row(const Instance& inst, const Mechanism& mech, AgentId agent,
                                   const std::vector<Rational>& row) {
    int m = inst.ground_size();
    if (static_cast<int>(row.size()) != m)
        throw contract_error("deviation row has wrong length");
    int support = 0;
    for (AgentId j = 0; j < m; ++j) {
        if (row[j].sign() < 0) throw contract_error("deviation row violates nonnegativity");
        if (j == agent && !row[j].is_zero())
            throw contract_error("deviation row violates the zero self-score constraint");
        if (!row[j].is_zero()) ++support;
    }
    switch (mech.kind) {
        case Mechanism::Kind::kpr:
        case Mechanism::Kind::dkpr:
            if (support > mech.d)
                throw contract_error("deviation row violates " + std::to_string(mech.d) +
                                     "-sparsity (support " + std::to_string(support) + ")");
            break;
        case Mechanism::Kind::mpr:
            if (support > 1) throw contract_error("deviation row violates 1-sparsity");
            break;
        case Mechanism::Kind::vertex_partition:
            if (!mech.permissive)
                for (const Rational& v : row)
                    if (!v.is_zero() && v != Rational(1))
                        throw contract_error("deviation row violates the binary score constraint");
            break;
        case Mechanism::Kind::partition:
            break; // any nonnegative row is in class
    }
}

/// The standard battery: the zero row, the original row, five seeded
/// in-class random rows, and every single-vote row when the ground is small
/// (which makes the battery exhaustive for binary 1-sparse classes).
inline DeviationPlan standard_deviation_plan(const Instance& inst, const Mechanism& mech, AgentId agent,
                                             std::uint64_t seed = 7) {
    int m = inst.ground_size();
    DeviationPlan plan;
    plan.agent = agent;
    plan.rows.push_back(std::vector<Rational>(static_cast<std::size_t>(m)));
    plan.rows.push_back(inst.scores.row(agent));

    bool binary_class = mech.kind == Mechanism::Kind::vertex_partition && !mech.permissive;
    int d_cap = mech.kind == Mechanism::Kind::mpr                                     ? 1
                : mech.kind == Mechanism::Kind::kpr || mech.kind == Mechanism::Kind::dkpr ? mech.d
                                                                                          : m - 1;
    detail::TrialRng rng(seed, static_cast<std::uint64_t>(agent));
    for (int r = 0; r < 5; ++r) {
        std::vector<Rational> row(static_cast<std::size_t>(m));
        int support = d_cap == 0 ? 0 : static_cast<int>(rng.below(static_cast<std::uint64_t>(d_cap) + 1));
        int placed = 0;
        while (placed < support) {
            AgentId j = static_cast<AgentId>(rng.below(static_cast<std::uint64_t>(m)));
            if (j == agent || !row[static_cast<std::size_t>(j)].is_zero()) continue;
            row[static_cast<std::size_t>(j)] = binary_class
                                                   ? Rational(1)
                                                   : Rational(1 + static_cast<std::int64_t>(rng.below(9)),
                                                              1 + static_cast<std::int64_t>(rng.below(3)));
            ++placed;
        }
        plan.rows.push_back(std::move(row));
    }

    if (m <= 8 && d_cap >= 1) {
        for (AgentId j = 0; j < m; ++j) {
            if (j == agent) continue;
            std::vector<Rational> row(static_cast<std::size_t>(m));
            row[static_cast<std::size_t>(j)] = Rational(1);
            plan.rows.push_back(std::move(row));
        }
    }
    return plan;
}

struct ImpartialityReport {
    bool pass = true;
    AgentId agent = 0;
    std::size_t witness_row = 0;
    Rational base_marginal;
    Rational deviant_marginal;
};

/// Exact per-agent probability equality across every replacement row.
inline ImpartialityReport check_impartiality(const Instance& inst, const Mechanism& mech,
                                             const DeviationPlan& plan) {
    Rational base = exact_distribution(inst, mech).marginal(plan.agent);
    for (std::size_t r = 0; r < plan.rows.size(); ++r) {
        validate_deviation_row(inst, mech, plan.agent, plan.rows[r]);
        Instance deviant(inst.system, inst.scores.with_row(plan.agent, plan.rows[r]));
        Rational p = exact_distribution(deviant, mech).marginal(plan.agent);
        if (p != base) return {false, plan.agent, r, base, p};
    }
    return {true, plan.agent, 0, base, base};
}

struct FeasibilityReport {
    bool pass = true;
    std::optional<AgentSubset> witness;
};

/// Every support set of the mechanism's exact lottery must be independent
/// (total mass one is enforced by the distribution type).
inline FeasibilityReport check_feasibility(const Instance& inst, const Mechanism& mech) {
    SelectionDistribution dist = exact_distribution(inst, mech);
    for (const auto& [set, prob] : dist.support())
        if (!inst.system.is_independent(set)) return {false, set};
    return {true, std::nullopt};
}

struct RankMarginalsReport {
    bool pass = true;
    std::optional<AgentSubset> witness;
    Rational mass;
    int rank = 0;
};

/// For every subset S, the marginal mass inside S may not exceed its rank.
inline RankMarginalsReport check_rank_marginals(const Instance& inst, const SelectionDistribution& dist) {
    int m = inst.ground_size();
    if (m > 12) throw budget_error("check_rank_marginals enumerates all subsets; limited to m <= 12");
    MarginalVector p = dist.marginals();
    for (std::uint64_t mask = 0, end = std::uint64_t{1} << m; mask < end; ++mask) {
        AgentSubset s(mask, m);
        Rational mass;
        for (AgentId i : s.members()) mass += p[i];
        int r = inst.system.rank(s);
        if (Rational(r) < mass) return {false, s, mass, r};
    }
    return {true, std::nullopt, Rational(0), 0};
}

/// Exact approximation-ratio record for one (instance, mechanism) pair.
struct RatioReport {
    std::string instance_id;
    std::string mechanism;
    int m = 0;
    Rational expected;
    Rational opt;
    Rational ratio;
    Rational bound;
    bool pass = false;
};

inline RatioReport ratio(const Instance& inst, const Mechanism& mech, const Rational& bound,
                         const std::string& instance_id = "") {
    Rational opt = opt_score(inst);
    if (opt.is_zero()) throw contract_error("ratio undefined: the optimum scores zero");
    Rational expected = expected_score(exact_distribution(inst, mech), inst.scores);
    RatioReport rep;
    rep.instance_id = instance_id;
    rep.mechanism = mech.name();
    rep.m = inst.ground_size();
    rep.expected = expected;
    rep.opt = opt;
    rep.ratio = expected / opt;
    rep.bound = bound;
    rep.pass = !(rep.ratio < bound);
    return rep;
}

/// The theorem-backed lower bound a mechanism promises on its instance class.
inline Rational guarantee_bound(const Instance& inst, const Mechanism& mech) {
    switch (mech.kind) {
        case Mechanism::Kind::partition: return Rational(1, 4);
        case Mechanism::Kind::kpr: return Rational(1, mech.d + 2);
        case Mechanism::Kind::dkpr: {
            const auto& ks = inst.system.payload<KnapsackSystem>();
            Rational s_max = effective_smax(inst, mech);
            return Rational(1) - s_max / ks.capacity * Rational(mech.d + 1);
        }
        case Mechanism::Kind::mpr: return Rational(1, 2);
        case Mechanism::Kind::vertex_partition: return Rational(1, 3);
    }
    throw contract_error("unknown mechanism kind");
}

} // namespace impartial
