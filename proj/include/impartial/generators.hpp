#pragma once

#include <string>
#include <vector>

#include "impartial/rng.hpp"
#include "impartial/systems.hpp"

namespace impartial {

namespace detail {

// Numerically smallest dependent set of the system's girth size.
inline AgentSubset min_dependent_set(const IndependenceSystem& sys) {
    auto g = sys.girth();
    if (!g) throw contract_error("system has no dependent set");
    int m = sys.ground_size();
    enumeration_guard(m, "min_dependent_set");
    // Gosper's hack: masks of popcount g in increasing numeric order.
    std::uint64_t mask = (std::uint64_t{1} << *g) - 1;
    std::uint64_t end = std::uint64_t{1} << m;
    while (mask < end) {
        AgentSubset s(mask, m);
        if (!sys.is_independent(s)) return s;
        std::uint64_t c = mask & (~mask + 1);
        std::uint64_t r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    throw std::logic_error("girth reported but no dependent set of that size found");
}

} // namespace detail

/// An instance together with the id the report files use for it.
struct GeneratedInstance {
    std::string id;
    Instance instance;
};

/// Unit votes around a minimum dependent set.
struct CycleConstruction {
    std::string id;
    Instance instance;
    AgentSubset dependent_set;
    int girth;
};

/// Outside agent voting for a whole minimum dependent set, plus the variant
/// where one member additionally votes for the rest of the set.
struct StarConstruction {
    std::string id;
    Instance base;
    Instance augmented;
    AgentSubset dependent_set;
    AgentId outside_voter;
    AgentId designated;
    int girth;
};

/// Installs the directed unit-vote cycle on a minimum dependent set S: each
/// member votes for the next one, wrapping around. The optimum then scores
/// exactly |S| - 1.
inline CycleConstruction gen_cycle_girth(IndependenceSystem system, const std::string& id = "cycle") {
    AgentSubset s = detail::min_dependent_set(system);
    int g = s.count();
    ScoreMatrix w(system.ground_size());
    std::vector<AgentId> ring = s.members();
    for (std::size_t i = 0; i < ring.size(); ++i)
        w.set(ring[i], ring[(i + 1) % ring.size()], Rational(1));
    return {id, Instance(std::move(system), std::move(w)), s, g};
}

/// Base instance: the lowest-indexed agent outside a minimum dependent set S
/// votes 1 for every member of S, so the optimum scores |S| - 1. Augmented
/// instance: the lowest-indexed member of S additionally votes 1 for every
/// other member, doubling the optimum.
inline StarConstruction gen_star_dependent(IndependenceSystem system, const std::string& id = "star") {
    AgentSubset s = detail::min_dependent_set(system);
    int m = system.ground_size();
    int g = s.count();
    if (g > m - 1) throw contract_error("gen_star_dependent needs an agent outside the dependent set");
    AgentId outside = -1;
    for (AgentId i = 0; i < m; ++i)
        if (!s.contains(i)) {
            outside = i;
            break;
        }
    AgentId designated = s.members().front();

    ScoreMatrix base(m);
    for (AgentId t : s.members()) base.set(outside, t, Rational(1));
    ScoreMatrix augmented = base;
    for (AgentId t : s.members())
        if (t != designated) augmented.set(designated, t, Rational(1));

    return {id, Instance(system, std::move(base)), Instance(std::move(system), std::move(augmented)),
            s, outside, designated, g};
}

/// The two knapsack-plurality showcases: five visible agents of sizes
/// (3, 11/2, 10, 1, 8) with capacity 10, the size-8 agent voting 15 for the
/// size-10 agent, and the size-1 agent voting 3 (variant a) or 10
/// (variant b) for it. Five zero-score voters of size 10 top the totals up
/// to (10, 15, 25, 2, 10); in variant a one of them votes 7 for the size-10
/// agent, in variant b that vote disappears, so the totals agree in both.
/// Fillers have size exactly equal to the capacity: with zero in-score they
/// sit behind the visible agents in every greedy order, and the visible
/// prefix already overflows the capacity before any filler is reached, so
/// no filler ever enters the selection set under its own vote's removal.
inline GeneratedInstance gen_fig4(char variant) {
    if (variant != 'a' && variant != 'b') throw contract_error("fig4 variant must be 'a' or 'b'");
    const int m = 10;
    std::vector<Rational> sizes{3, {11, 2}, 10, 1, 8, 10, 10, 10, 10, 10};
    IndependenceSystem sys(m, KnapsackSystem{std::move(sizes), Rational(10)});
    ScoreMatrix w(m);
    w.set(4, 2, Rational(15));
    w.set(3, 2, variant == 'a' ? Rational(3) : Rational(10));
    w.set(5, 0, Rational(10));
    w.set(6, 1, Rational(15));
    if (variant == 'a') w.set(7, 2, Rational(7));
    w.set(8, 3, Rational(2));
    w.set(9, 4, Rational(10));
    return {std::string("fig4") + variant, Instance(std::move(sys), std::move(w))};
}

/// Hub-and-rim graph on n vertices: agents 0..n-2 are the spokes, agents
/// n-1..2n-3 the rim cycle, and rim edge j casts the single unit vote for
/// spoke j. The optimum (all spokes) scores n - 1.
inline GeneratedInstance gen_wheel(int n) {
    if (n < 4) throw contract_error("gen_wheel needs n >= 4 for a simple rim");
    int spokes = n - 1;
    int m = 2 * spokes;
    std::vector<std::pair<int, int>> edges;
    for (int j = 1; j <= spokes; ++j) edges.push_back({0, j});                       // spoke j
    for (int j = 1; j <= spokes; ++j) edges.push_back({j, j == spokes ? 1 : j + 1}); // rim j
    IndependenceSystem sys(m, GraphicMatroid{n, std::move(edges), true});
    ScoreMatrix w(m);
    for (int j = 0; j < spokes; ++j) w.set(spokes + j, j, Rational(1));
    return {"wheel_n" + std::to_string(n), Instance(std::move(sys), std::move(w))};
}

/// Tightness showcase for the deterministic knapsack mechanism at d = 1,
/// capacity 20 and size cap 4: nine unit-density agents sized
/// (2, 1, 4, 2, 3+eps, 4, 1, 3-eps, 3) plus one zero-score voter of size 4.
/// Votes chain forward through the instance, so removing any agent's vote
/// never promotes it. The mechanism keeps the first five agents, scoring
/// 12 + eps against an optimum of 20.
inline GeneratedInstance gen_unit_density(const Rational& eps = Rational(1, 100)) {
    if (eps.sign() <= 0 || Rational(1) <= eps) throw contract_error("unit_density needs 0 < eps < 1");
    const int m = 10;
    std::vector<Rational> sizes{2, 1, 4, 2, Rational(3) + eps, 4, 1, Rational(3) - eps, 3, 4};
    IndependenceSystem sys(m, KnapsackSystem{sizes, Rational(20)});
    ScoreMatrix w(m);
    w.set(9, 0, sizes[0]);
    for (AgentId i = 0; i + 1 <= 8; ++i) w.set(i, i + 1, sizes[static_cast<std::size_t>(i) + 1]);
    return {"unit_density", Instance(std::move(sys), std::move(w))};
}

/// Seeded random instance of the requested kind with row support at most d.
/// Knapsack sizes are integers in [1, 6] against capacity 20, so the
/// deterministic mechanism's size condition holds for d <= 2.
inline GeneratedInstance gen_random(SystemKind kind, int m, int d, bool binary, std::uint64_t seed) {
    if (m < 1 || m > 24) throw contract_error("gen_random needs 1 <= m <= 24");
    if (d < 0 || d > m - 1) throw contract_error("gen_random needs 0 <= d <= m-1");
    detail::TrialRng rng(seed, 0xC0FFEE);

    auto make_system = [&]() -> IndependenceSystem {
        switch (kind) {
            case SystemKind::uniform:
                return IndependenceSystem(m, UniformMatroid{static_cast<int>(rng.below(static_cast<std::uint64_t>(m) + 1))});
            case SystemKind::partition: {
                int nblocks = 1 + static_cast<int>(rng.below(std::min(m, 4)));
                std::vector<std::vector<AgentId>> blocks(static_cast<std::size_t>(nblocks));
                for (AgentId i = 0; i < m; ++i)
                    blocks[rng.below(static_cast<std::uint64_t>(nblocks))].push_back(i);
                std::vector<int> caps;
                for (auto& b : blocks) caps.push_back(static_cast<int>(rng.below(b.size() + 1)));
                return IndependenceSystem(m, PartitionMatroid{std::move(blocks), std::move(caps)});
            }
            case SystemKind::graphic: {
                int n = 2;
                while (n * (n - 1) / 2 < m) ++n;
                n += static_cast<int>(rng.below(2)); // sometimes a sparser graph
                std::vector<std::pair<int, int>> edges;
                std::set<std::pair<int, int>> used;
                while (static_cast<int>(edges.size()) < m) {
                    int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
                    int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
                    if (u == v) continue;
                    auto key = std::minmax(u, v);
                    if (!used.insert({key.first, key.second}).second) continue;
                    edges.push_back({key.first, key.second});
                }
                return IndependenceSystem(m, GraphicMatroid{n, std::move(edges), true});
            }
            case SystemKind::knapsack: {
                std::vector<Rational> sizes;
                for (int i = 0; i < m; ++i) sizes.push_back(Rational(1 + static_cast<std::int64_t>(rng.below(6))));
                return IndependenceSystem(m, KnapsackSystem{std::move(sizes), Rational(20)});
            }
            case SystemKind::explicit_list: {
                std::vector<AgentSubset> sets;
                int count = 1 + static_cast<int>(rng.below(6));
                for (int i = 0; i < count; ++i)
                    sets.push_back(AgentSubset(rng.below(std::uint64_t{1} << m), m));
                return IndependenceSystem(m, sets);
            }
        }
        throw contract_error("gen_random: unknown system kind");
    };

    IndependenceSystem sys = make_system();
    ScoreMatrix w(m);
    for (AgentId i = 0; i < m; ++i) {
        int support = d == 0 ? 0 : static_cast<int>(rng.below(static_cast<std::uint64_t>(d) + 1));
        AgentSubset targets = AgentSubset::empty(m);
        while (targets.count() < support) {
            AgentId j = static_cast<AgentId>(rng.below(static_cast<std::uint64_t>(m)));
            if (j != i) targets = targets.with(j);
        }
        for (AgentId j : targets.members()) {
            Rational weight = binary ? Rational(1)
                                     : Rational(1 + static_cast<std::int64_t>(rng.below(9)),
                                                1 + static_cast<std::int64_t>(rng.below(3)));
            w.set(i, j, weight);
        }
    }

    std::string kind_name = kind == SystemKind::uniform     ? "uniform"
                            : kind == SystemKind::partition ? "partition"
                            : kind == SystemKind::graphic   ? "graphic"
                            : kind == SystemKind::knapsack  ? "knapsack"
                                                            : "explicit";
    std::string id = "random_" + kind_name + "_m" + std::to_string(m) + "_d" + std::to_string(d) +
                     (binary ? "_bin" : "_rat") + "_s" + std::to_string(seed);
    return {id, Instance(std::move(sys), std::move(w))};
}

} // namespace impartial
