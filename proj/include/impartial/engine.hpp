#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "impartial/mechanisms.hpp"
#include "impartial/rng.hpp"

namespace impartial {

/// A mechanism identity: the procedure plus the class parameters that are
/// part of its guarantee (sparsity bound d, size cap s_max, permissive
/// scoring for the vertex mechanism).
struct Mechanism {
    enum class Kind { partition, kpr, dkpr, mpr, vertex_partition };

    Kind kind = Kind::partition;
    int d = 1;
    std::optional<Rational> s_max; // dkpr only; defaults to max agent size
    bool permissive = false;       // vertex_partition only

    static Mechanism partition() { return {Kind::partition, 1, std::nullopt, false}; }
    static Mechanism kpr(int d) { return {Kind::kpr, d, std::nullopt, false}; }
    static Mechanism dkpr(int d, std::optional<Rational> s_max = std::nullopt) {
        return {Kind::dkpr, d, s_max, false};
    }
    static Mechanism mpr() { return {Kind::mpr, 1, std::nullopt, false}; }
    static Mechanism vertex_partition(bool permissive = false) {
        return {Kind::vertex_partition, 1, std::nullopt, permissive};
    }

    std::string name() const {
        switch (kind) {
            case Kind::partition: return "partition";
            case Kind::kpr: return "kpr_d" + std::to_string(d);
            case Kind::dkpr: return "dkpr_d" + std::to_string(d);
            case Kind::mpr: return "mpr";
            case Kind::vertex_partition: return permissive ? "vertex_partition_permissive" : "vertex_partition";
        }
        return "?";
    }
};

inline Rational effective_smax(const Instance& inst, const Mechanism& mech) {
    if (mech.s_max) return *mech.s_max;
    const auto& ks = detail::knapsack_of(inst, "dkpr");
    Rational mx = ks.sizes.front();
    for (const Rational& s : ks.sizes)
        if (mx < s) mx = s;
    return mx;
}

/// Shape and cardinality of the randomness a mechanism consumes on a given
/// instance.
struct RandomnessSpec {
    enum class Kind { bipartitions, permutation_pairs, deterministic, direct_distribution };
    Kind kind;
    std::uint64_t cardinality; // saturates at UINT64_MAX
};

namespace detail {

inline std::uint64_t saturating_factorial_product(std::uint64_t acc, int n) {
    for (int i = 2; i <= n; ++i) {
        if (acc > UINT64_MAX / static_cast<std::uint64_t>(i)) return UINT64_MAX;
        acc *= static_cast<std::uint64_t>(i);
    }
    return acc;
}

} // namespace detail

inline RandomnessSpec randomness_spec(const Instance& inst, const Mechanism& mech) {
    switch (mech.kind) {
        case Mechanism::Kind::partition: {
            int m = inst.ground_size();
            std::uint64_t card = m >= 64 ? UINT64_MAX : (std::uint64_t{1} << m);
            return {RandomnessSpec::Kind::bipartitions, card};
        }
        case Mechanism::Kind::vertex_partition: {
            const auto& gm = detail::graphic_of(inst, "vertex_partition");
            std::uint64_t card = detail::saturating_factorial_product(1, gm.vertex_count);
            card = card == UINT64_MAX ? UINT64_MAX
                                      : detail::saturating_factorial_product(card, inst.ground_size());
            return {RandomnessSpec::Kind::permutation_pairs, card};
        }
        case Mechanism::Kind::dkpr:
            return {RandomnessSpec::Kind::deterministic, 1};
        case Mechanism::Kind::kpr:
        case Mechanism::Kind::mpr:
            return {RandomnessSpec::Kind::direct_distribution, 1};
    }
    throw contract_error("unknown mechanism kind");
}

constexpr std::uint64_t kBipartitionBudget = std::uint64_t{1} << 20;
constexpr std::uint64_t kPermutationBudget = 10'000'000;

/// Exact output lottery of a mechanism: uniform weight on every realization
/// of its internal randomness, support sets merged, mass exactly one.
inline SelectionDistribution exact_distribution(const Instance& inst, const Mechanism& mech) {
    int m = inst.ground_size();
    switch (mech.kind) {
        case Mechanism::Kind::kpr:
            return kpr(inst, mech.d);
        case Mechanism::Kind::mpr:
            return mpr(inst);
        case Mechanism::Kind::dkpr:
            return SelectionDistribution::point_mass(dkpr(inst, mech.d, effective_smax(inst, mech)));
        case Mechanism::Kind::partition: {
            RandomnessSpec spec = randomness_spec(inst, mech);
            if (spec.cardinality > kBipartitionBudget)
                throw budget_error("2^m bipartitions exceed the exact budget; use monte_carlo");
            std::vector<std::pair<AgentSubset, Rational>> entries;
            Rational weight(1, static_cast<std::int64_t>(spec.cardinality));
            for (std::uint64_t r = 0; r < spec.cardinality; ++r)
                entries.push_back({partition_run(inst, Bipartition::from_bits(r, m)), weight});
            return SelectionDistribution(m, std::move(entries));
        }
        case Mechanism::Kind::vertex_partition: {
            RandomnessSpec spec = randomness_spec(inst, mech);
            if (spec.cardinality > kPermutationBudget)
                throw budget_error("n! * m! permutation pairs exceed the exact budget; use monte_carlo");
            const auto& gm = detail::graphic_of(inst, "vertex_partition");
            Rational weight(1, static_cast<std::int64_t>(spec.cardinality));
            std::vector<std::pair<AgentSubset, Rational>> entries;
            std::vector<int> eta(static_cast<std::size_t>(gm.vertex_count));
            std::iota(eta.begin(), eta.end(), 0);
            do {
                std::vector<AgentId> pi(static_cast<std::size_t>(m));
                std::iota(pi.begin(), pi.end(), 0);
                do {
                    entries.push_back(
                        {vertex_partition_run(inst, PermutationPair(eta, pi), mech.permissive), weight});
                } while (std::next_permutation(pi.begin(), pi.end()));
            } while (std::next_permutation(eta.begin(), eta.end()));
            return SelectionDistribution(m, std::move(entries));
        }
    }
    throw contract_error("unknown mechanism kind");
}

/// Expected total score of a lottery, exactly.
inline Rational expected_score(const SelectionDistribution& dist, const ScoreMatrix& w) {
    if (dist.ground_size() != w.size()) throw contract_error("expected_score ground size mismatch");
    std::vector<Rational> totals = w.agent_totals();
    Rational out;
    for (const auto& [set, prob] : dist.support()) {
        Rational sc;
        for (AgentId j : set.members()) sc += totals[j];
        out += prob * sc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Seeded Monte Carlo
// ---------------------------------------------------------------------------

/// Marginal and score estimates from seeded sampling, with Hoeffding 99%
/// half-widths. Counts and the exact score sum are included so that equal
/// (seed, trials) runs can be compared bit for bit.
struct EstimateReport {
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> selection_counts;
    Rational score_sum;
    std::vector<double> marginal_estimate;
    double expected_score_estimate = 0.0;
    double marginal_halfwidth99 = 0.0;
    double score_halfwidth99 = 0.0;
};

/// One seeded realization of the mechanism, by trial index.
inline AgentSubset sample_once(const Instance& inst, const Mechanism& mech, std::uint64_t seed,
                               std::uint64_t trial,
                               const SelectionDistribution* direct = nullptr) {
    detail::TrialRng rng(seed, trial);
    int m = inst.ground_size();
    switch (mech.kind) {
        case Mechanism::Kind::partition: {
            std::uint64_t bits = m == 0 ? 0 : rng.next() & AgentSubset::full(m).bits;
            return partition_run(inst, Bipartition::from_bits(bits, m));
        }
        case Mechanism::Kind::vertex_partition: {
            const auto& gm = detail::graphic_of(inst, "vertex_partition");
            std::vector<int> eta = rng.permutation(gm.vertex_count);
            std::vector<AgentId> pi = rng.permutation(m);
            return vertex_partition_run(inst, PermutationPair(std::move(eta), std::move(pi)),
                                        mech.permissive);
        }
        case Mechanism::Kind::dkpr:
            return dkpr(inst, mech.d, effective_smax(inst, mech));
        case Mechanism::Kind::kpr:
        case Mechanism::Kind::mpr: {
            std::optional<SelectionDistribution> computed;
            if (!direct) computed = exact_distribution(inst, mech);
            const SelectionDistribution& local = direct ? *direct : *computed;
            std::uint64_t u = rng.next();
            Rational cum;
            for (const auto& [set, prob] : local.support()) {
                cum += prob;
                if (detail::below_fraction(u, cum)) return set;
            }
            return local.support().back().first;
        }
    }
    throw contract_error("unknown mechanism kind");
}

/// Seeded estimate of marginals and expected score. Trials are independent
/// and indexed; with `threads > 1` the index range is split and the exact
/// tallies merged, which reproduces the sequential report bit for bit.
inline EstimateReport monte_carlo(const Instance& inst, const Mechanism& mech, std::uint64_t trials,
                                  std::uint64_t seed, int threads = 1) {
    if (trials < 1) throw contract_error("monte_carlo requires at least one trial");
    int m = inst.ground_size();
    std::vector<Rational> totals = inst.scores.agent_totals();

    // Direct-distribution mechanisms are computed once and sampled per trial.
    std::optional<SelectionDistribution> direct;
    if (mech.kind == Mechanism::Kind::kpr || mech.kind == Mechanism::Kind::mpr)
        direct = exact_distribution(inst, mech);

    struct Tally {
        std::vector<std::uint64_t> counts;
        Rational score_sum;
    };
    auto run_range = [&](std::uint64_t lo, std::uint64_t hi, Tally& t) {
        t.counts.assign(static_cast<std::size_t>(m), 0);
        for (std::uint64_t trial = lo; trial < hi; ++trial) {
            AgentSubset s = sample_once(inst, mech, seed, trial, direct ? &*direct : nullptr);
            Rational sc;
            for (AgentId j : s.members()) {
                ++t.counts[static_cast<std::size_t>(j)];
                sc += totals[j];
            }
            t.score_sum += sc;
        }
    };

    int workers = std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::uint64_t>(trials, 64))));
    std::vector<Tally> tallies(static_cast<std::size_t>(workers));
    if (workers == 1) {
        run_range(0, trials, tallies[0]);
    } else {
        std::vector<std::thread> pool;
        std::uint64_t chunk = trials / static_cast<std::uint64_t>(workers);
        for (int w = 0; w < workers; ++w) {
            std::uint64_t lo = chunk * static_cast<std::uint64_t>(w);
            std::uint64_t hi = w == workers - 1 ? trials : lo + chunk;
            pool.emplace_back(run_range, lo, hi, std::ref(tallies[static_cast<std::size_t>(w)]));
        }
        for (auto& th : pool) th.join();
    }

    EstimateReport rep;
    rep.trials = trials;
    rep.seed = seed;
    rep.selection_counts.assign(static_cast<std::size_t>(m), 0);
    for (const Tally& t : tallies) {
        for (int j = 0; j < m; ++j) rep.selection_counts[static_cast<std::size_t>(j)] += t.counts[static_cast<std::size_t>(j)];
        rep.score_sum += t.score_sum;
    }
    rep.marginal_estimate.resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
        rep.marginal_estimate[static_cast<std::size_t>(j)] =
            static_cast<double>(rep.selection_counts[static_cast<std::size_t>(j)]) / static_cast<double>(trials);
    rep.expected_score_estimate = rep.score_sum.to_double() / static_cast<double>(trials);

    // Hoeffding at 99%: half-width sqrt(ln(2/delta) / 2N), scaled by the
    // score range for the score estimate.
    double base = std::sqrt(std::log(2.0 / 0.01) / (2.0 * static_cast<double>(trials)));
    Rational range;
    for (const Rational& t : totals) range += t;
    rep.marginal_halfwidth99 = base;
    rep.score_halfwidth99 = range.to_double() * base;
    return rep;
}

} // namespace impartial
