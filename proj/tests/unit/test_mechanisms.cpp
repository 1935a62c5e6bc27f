#include <doctest.h>

#include "impartial/engine.hpp"
#include "impartial/generators.hpp"
#include "test_util.hpp"

using namespace impartial;
using impartial::testing::matrix_from_rows;
using impartial::testing::mutual_pair_instance;
using impartial::testing::path_instance;
using impartial::testing::triangle_instance;

namespace {

Rational prob_of(const SelectionDistribution& dist, const AgentSubset& set) {
    for (const auto& [s, p] : dist.support())
        if (s == set) return p;
    return Rational(0);
}

} // namespace

TEST_CASE("partition_run selects from the eligible side only") {
    Instance pair = mutual_pair_instance();
    CHECK(partition_run(pair, Bipartition(AgentSubset::full(2), AgentSubset::empty(2))) ==
          AgentSubset::empty(2));
    CHECK(partition_run(pair, Bipartition(AgentSubset::of({0}, 2), AgentSubset::of({1}, 2))) ==
          AgentSubset::of({1}, 2));
    CHECK(partition_run(pair, Bipartition(AgentSubset::empty(2), AgentSubset::full(2))) ==
          AgentSubset::of({0}, 2));
}

TEST_CASE("knapsack_greedy computes prefix sets and their membership rules") {
    // Everything fits: both greedy sets are the whole ground.
    {
        IndependenceSystem sys(3, KnapsackSystem{{Rational(1), Rational(2), Rational(3)}, Rational(10)});
        Instance inst(std::move(sys), ScoreMatrix(3));
        GreedyState st = knapsack_greedy(inst);
        CHECK(st.k == 3);
        CHECK(st.kgr == AgentSubset::full(3));
        CHECK(st.ekgr == AgentSubset::full(3));
    }

    // The knapsack showcase: sizes 3 and 11/2 fit, the size-10 agent is the
    // fractional extension.
    {
        Instance fig = gen_fig4('a').instance;
        GreedyState st = knapsack_greedy(fig);
        CHECK(st.k == 2);
        CHECK(st.kgr == AgentSubset::of({0, 1}, 10));
        CHECK(st.ekgr == AgentSubset::of({0, 1, 2}, 10));
    }

    // Two agents of size 6 against capacity 10.
    {
        IndependenceSystem sys(2, KnapsackSystem{{Rational(6), Rational(6)}, Rational(10)});
        ScoreMatrix w(2);
        w.set(1, 0, Rational(2));
        w.set(0, 1, Rational(1));
        Instance inst(std::move(sys), std::move(w));
        GreedyState st = knapsack_greedy(inst);
        CHECK(st.kgr == AgentSubset::of({0}, 2));
        CHECK(st.ekgr == AgentSubset::full(2));
    }

    // Membership rules: i in the greedy set iff its predecessors plus
    // itself fit; i in the extended set iff its predecessors alone fit.
    for (int t = 0; t < 25; ++t) {
        Instance inst = gen_random(SystemKind::knapsack, 8, 2, false, 3100 + static_cast<std::uint64_t>(t)).instance;
        const auto& ks = inst.system.payload<KnapsackSystem>();
        GreedyState st = knapsack_greedy(inst);
        for (AgentId i = 0; i < 8; ++i) {
            Rational before;
            for (AgentId j : st.preceding(i).members()) before += ks.sizes[j];
            CHECK(st.kgr.contains(i) == (before + ks.sizes[i] <= ks.capacity));
            CHECK(st.ekgr.contains(i) == (before <= ks.capacity));
        }
    }
}

TEST_CASE("kpr reproduces the knapsack showcase lotteries") {
    const Rational third(1, 3);

    Instance a = gen_fig4('a').instance;
    SelectionDistribution da = kpr(a, 1);
    CHECK(da.support().size() == 3);
    CHECK(prob_of(da, AgentSubset::of({0, 1}, 10)) == third);
    CHECK(prob_of(da, AgentSubset::of({2}, 10)) == third);
    CHECK(prob_of(da, AgentSubset::of({4}, 10)) == third);

    Instance b = gen_fig4('b').instance;
    SelectionDistribution db = kpr(b, 1);
    CHECK(db.support().size() == 3);
    CHECK(prob_of(db, AgentSubset::of({0, 1, 3}, 10)) == third);
    CHECK(prob_of(db, AgentSubset::of({2}, 10)) == third);
    CHECK(prob_of(db, AgentSubset::of({4}, 10)) == third);
}

TEST_CASE("kpr handles degenerate shapes and rejects sparsity violations") {
    // Single agent, no votes: it is drawn with probability 1/3.
    {
        IndependenceSystem sys(1, KnapsackSystem{{Rational(1)}, Rational(2)});
        Instance inst(std::move(sys), ScoreMatrix(1));
        SelectionDistribution dist = kpr(inst, 1);
        CHECK(prob_of(dist, AgentSubset::of({0}, 1)) == Rational(1, 3));
        CHECK(prob_of(dist, AgentSubset::empty(1)) == Rational(2, 3));
    }

    // Sparsity above d is out of class.
    {
        IndependenceSystem sys(3, KnapsackSystem{{Rational(1), Rational(1), Rational(1)}, Rational(3)});
        ScoreMatrix w(3);
        w.set(0, 1, Rational(1));
        w.set(0, 2, Rational(1));
        Instance inst(std::move(sys), std::move(w));
        CHECK_THROWS_AS(kpr(inst, 1), contract_error);
        CHECK_NOTHROW(kpr(inst, 2));
    }

    // Support sets fit the knapsack and the extended greedy set is covered,
    // for random d-sparse instances.
    for (int d : {1, 2}) {
        for (int t = 0; t < 20; ++t) {
            Instance inst =
                gen_random(SystemKind::knapsack, 9, d, t % 2 == 0, 7700 + static_cast<std::uint64_t>(10 * d + t)).instance;
            SelectionDistribution dist = kpr(inst, d);
            Rational mass;
            for (const auto& [set, prob] : dist.support()) {
                CHECK(inst.system.is_independent(set));
                mass += prob;
            }
            CHECK(mass == Rational(1));
            CHECK(dist.support().size() <= static_cast<std::size_t>(d) + 3);
        }
    }
}

TEST_CASE("dkpr returns the documented deterministic sets") {
    // No votes: the reduced-capacity greedy set filled in index order.
    {
        IndependenceSystem sys(5, KnapsackSystem{{Rational(2), Rational(2), Rational(2), Rational(2), Rational(2)}, Rational(7)});
        Instance inst(std::move(sys), ScoreMatrix(5));
        // reduced capacity 7 - 2 = 5: two agents of size 2 fit
        CHECK(dkpr(inst, 1, Rational(2)) == AgentSubset::of({0, 1}, 5));
    }

    // Chain of descending votes: sizes 2, capacity 10, reduced capacity 8.
    {
        IndependenceSystem sys(6, KnapsackSystem{
                                       {Rational(2), Rational(2), Rational(2), Rational(2), Rational(2), Rational(2)},
                                       Rational(10)});
        ScoreMatrix w = matrix_from_rows({
            {0, 0, 0, 0, 0, 1}, // a1 -> a6: 1
            {6, 0, 0, 0, 0, 0}, // a2 -> a1: 6
            {0, 5, 0, 0, 0, 0}, // a3 -> a2: 5
            {0, 0, 4, 0, 0, 0}, // a4 -> a3: 4
            {0, 0, 0, 3, 0, 0}, // a5 -> a4: 3
            {0, 0, 0, 0, 2, 0}, // a6 -> a5: 2
        });
        Instance inst(std::move(sys), std::move(w));
        AgentSubset out = dkpr(inst, 1, Rational(2));
        CHECK(out == AgentSubset::of({0, 1, 2, 3, 4}, 6));
        Rational sc = score_from(inst.scores, AgentSubset::full(6), out);
        CHECK(sc == Rational(20));
        CHECK(sc == opt_score(inst));
    }

    // Unit-density tightness instance: the first five agents are kept and
    // the exact ratio lands just above 3/5.
    {
        Rational eps(1, 100);
        Instance inst = gen_unit_density(eps).instance;
        AgentSubset out = dkpr(inst, 1, Rational(4));
        CHECK(out == AgentSubset::of({0, 1, 2, 3, 4}, 10));
        Rational sc = score_from(inst.scores, AgentSubset::full(10), out);
        CHECK(sc == Rational(12) + eps);
        CHECK(opt_score(inst) == Rational(20));
        Rational achieved = sc / Rational(20);
        CHECK(Rational(3, 5) <= achieved);
        CHECK(achieved <= Rational(3, 5) + Rational(1, 10));
    }

    // Preconditions are typed errors.
    {
        IndependenceSystem sys(2, KnapsackSystem{{Rational(2), Rational(4)}, Rational(10)});
        Instance inst(std::move(sys), ScoreMatrix(2));
        CHECK_THROWS_AS(dkpr(inst, 1, Rational(2)), contract_error);  // a size exceeds s_max
        CHECK_THROWS_AS(dkpr(inst, 2, Rational(4)), contract_error);  // s_max * (d+1) not below C
        CHECK_NOTHROW(dkpr(inst, 1, Rational(4)));
    }
}

TEST_CASE("mpr marginals put one half on the robust optimum members") {
    // No votes: the canonically greatest basis gets all the mass.
    {
        Instance zero(IndependenceSystem(3, UniformMatroid{2}), ScoreMatrix(3));
        MarginalVector p = mpr_marginals(zero);
        CHECK(p[0] == Rational(1, 2));
        CHECK(p[1] == Rational(1, 2));
        CHECK(p[2] == Rational(0));
        SelectionDistribution dist = mpr(zero);
        CHECK(prob_of(dist, AgentSubset::of({0, 1}, 3)) == Rational(1, 2));
        CHECK(prob_of(dist, AgentSubset::empty(3)) == Rational(1, 2));
    }

    {
        Instance tri = triangle_instance();
        MarginalVector p = mpr_marginals(tri);
        for (AgentId e = 0; e < 3; ++e) CHECK(p[e] == Rational(1, 2));
        SelectionDistribution dist = mpr(tri);
        CHECK(prob_of(dist, AgentSubset::of({0, 1}, 3)) == Rational(1, 2));
        CHECK(prob_of(dist, AgentSubset::of({2}, 3)) == Rational(1, 2));
    }

    {
        Instance pair = mutual_pair_instance();
        MarginalVector p = mpr_marginals(pair);
        CHECK(p[0] == Rational(1, 2));
        CHECK(p[1] == Rational(1, 2));
        SelectionDistribution dist = mpr(pair);
        CHECK(prob_of(dist, AgentSubset::of({0}, 2)) == Rational(1, 2));
        CHECK(prob_of(dist, AgentSubset::of({1}, 2)) == Rational(1, 2));
    }

    // 2-sparse rows are out of class.
    {
        ScoreMatrix w(3);
        w.set(0, 1, Rational(1));
        w.set(0, 2, Rational(1));
        Instance inst(IndependenceSystem(3, UniformMatroid{2}), std::move(w));
        CHECK_THROWS_AS(mpr_marginals(inst), contract_error);
    }
}

TEST_CASE("induced partition and matrix follow the vertex order") {
    Instance path = path_instance();

    // Identity order: singleton parts, nothing zeroed.
    {
        std::vector<AgentSubset> parts = induced_partition(path, {0, 1, 2});
        CHECK(parts[0] == AgentSubset::of({0}, 2));
        CHECK(parts[1] == AgentSubset::of({1}, 2));
        CHECK(parts[2] == AgentSubset::empty(2));
        for (std::vector<AgentId> pi : {std::vector<AgentId>{0, 1}, std::vector<AgentId>{1, 0}})
            CHECK(induced_matrix(path, PermutationPair({0, 1, 2}, pi)) == path.scores);
    }

    // Middle vertex first: both edges share a part and the later edge's
    // vote for the earlier one is zeroed.
    {
        std::vector<AgentSubset> parts = induced_partition(path, {1, 0, 2});
        CHECK(parts[0] == AgentSubset::full(2));
        ScoreMatrix w = induced_matrix(path, PermutationPair({1, 0, 2}, {0, 1}));
        CHECK(w.at(0, 1) == Rational(1));  // earlier-in-pi vote kept
        CHECK(w.at(1, 0) == Rational(0));  // later-in-pi vote dropped
    }

    // Zero scores stay zero.
    {
        Instance zero(IndependenceSystem(2, GraphicMatroid{3, {{0, 1}, {1, 2}}, true}), ScoreMatrix(2));
        CHECK(induced_matrix(zero, PermutationPair({1, 0, 2}, {0, 1})) == zero.scores);
    }
}

TEST_CASE("vertex_partition_run follows the candidate replacement rule") {
    Instance path = path_instance();

    // Singleton parts: both edges selected whatever the edge order.
    CHECK(vertex_partition_run(path, PermutationPair({0, 1, 2}, {0, 1})) == AgentSubset::full(2));
    CHECK(vertex_partition_run(path, PermutationPair({0, 1, 2}, {1, 0})) == AgentSubset::full(2));

    // Shared part with zero observed scores: the tie replaces the
    // candidate, so the edge later in pi wins.
    CHECK(vertex_partition_run(path, PermutationPair({1, 0, 2}, {0, 1})) == AgentSubset::of({1}, 2));
    CHECK(vertex_partition_run(path, PermutationPair({1, 0, 2}, {1, 0})) == AgentSubset::of({0}, 2));

    // Binary enforcement with a permissive escape hatch.
    Instance tri = triangle_instance();
    PermutationPair id3({0, 1, 2}, {0, 1, 2});
    CHECK_THROWS_AS(vertex_partition_run(tri, id3), contract_error);
    CHECK_NOTHROW(vertex_partition_run(tri, id3, true));

    // Every realization on a random simple graph returns a forest.
    for (int t = 0; t < 6; ++t) {
        Instance inst = gen_random(SystemKind::graphic, 5, 3, true, 9000 + static_cast<std::uint64_t>(t)).instance;
        const auto& gm = inst.system.payload<GraphicMatroid>();
        std::vector<int> eta(static_cast<std::size_t>(gm.vertex_count));
        std::iota(eta.begin(), eta.end(), 0);
        do {
            std::vector<AgentId> pi{0, 1, 2, 3, 4};
            do {
                AgentSubset out = vertex_partition_run(inst, PermutationPair(eta, pi));
                CHECK(inst.system.is_independent(out));
            } while (std::next_permutation(pi.begin(), pi.end()));
        } while (std::next_permutation(eta.begin(), eta.end()));
    }
}

TEST_CASE("the selected edge of each part maximizes the induced score") {
    // Ties the candidate walk to the induced matrix: whatever edge survives
    // a part scores the part-wise maximum of the induced totals.
    for (int t = 0; t < 5; ++t) {
        Instance inst = gen_random(SystemKind::graphic, 4, 2, true, 11000 + static_cast<std::uint64_t>(t)).instance;
        const auto& gm = inst.system.payload<GraphicMatroid>();
        std::vector<int> eta(static_cast<std::size_t>(gm.vertex_count));
        std::iota(eta.begin(), eta.end(), 0);
        do {
            std::vector<AgentId> pi{0, 1, 2, 3};
            do {
                PermutationPair pp(eta, pi);
                AgentSubset out = vertex_partition_run(inst, pp);
                std::vector<Rational> induced = induced_matrix(inst, pp).agent_totals();
                for (const AgentSubset& part : induced_partition(inst, eta)) {
                    if (part.is_empty()) continue;
                    AgentSubset chosen = out.intersect(part);
                    REQUIRE(chosen.count() == 1);
                    Rational best;
                    for (AgentId e : part.members())
                        if (best < induced[static_cast<std::size_t>(e)]) best = induced[static_cast<std::size_t>(e)];
                    CHECK(induced[static_cast<std::size_t>(chosen.members().front())] == best);
                }
            } while (std::next_permutation(pi.begin(), pi.end()));
        } while (std::next_permutation(eta.begin(), eta.end()));
    }
}

TEST_CASE("partition_run membership is invariant per bipartition under own-row changes") {
    // Stronger than the aggregated marginal equality: for every fixed
    // bipartition, the deviating agent's membership is unchanged.
    detail::TrialRng rng(31, 7);
    SystemKind kinds[] = {SystemKind::uniform, SystemKind::graphic, SystemKind::knapsack,
                          SystemKind::explicit_list};
    for (int t = 0; t < 12; ++t) {
        Instance inst = gen_random(kinds[t % 4], 6, 2, false, 5200 + static_cast<std::uint64_t>(t)).instance;
        AgentId agent = static_cast<AgentId>(rng.below(6));
        std::vector<Rational> row(6);
        for (AgentId j = 0; j < 6; ++j)
            if (j != agent && rng.below(2) == 0)
                row[static_cast<std::size_t>(j)] = Rational(1 + static_cast<std::int64_t>(rng.below(5)));
        Instance deviant(inst.system, inst.scores.with_row(agent, row));
        for (std::uint64_t bits = 0; bits < 64; ++bits) {
            Bipartition b = Bipartition::from_bits(bits, 6);
            CHECK(partition_run(inst, b).contains(agent) ==
                  partition_run(deviant, b).contains(agent));
        }
    }
}

TEST_CASE("wheel ratio follows the measured one-third plus one-over-n law") {
    // Pinned from full enumeration (17,280 realizations at n=4); the
    // hub's part contributes one unit-score spoke whenever the hub is not
    // last in the vertex order.
    Instance wheel4 = gen_wheel(4).instance;
    SelectionDistribution dist = exact_distribution(wheel4, Mechanism::vertex_partition());
    CHECK(expected_score(dist, wheel4.scores) == Rational(7, 4));
    for (AgentId spoke = 0; spoke < 3; ++spoke) CHECK(dist.marginal(spoke) == Rational(7, 12));
    CHECK(expected_score(dist, wheel4.scores) / opt_score(wheel4) ==
          Rational(1, 3) + Rational(1, 4));
}

TEST_CASE("mpr runs on grounds too large to enumerate") {
    // 30 edges on 16 vertices: brute force over subsets is out of reach,
    // so this exercises the greedy and augmenting-path routes end to end.
    const int m = 30;
    detail::TrialRng rng(77, 30);
    std::vector<std::pair<int, int>> edges;
    std::set<std::pair<int, int>> used;
    while (static_cast<int>(edges.size()) < m) {
        int u = static_cast<int>(rng.below(16));
        int v = static_cast<int>(rng.below(16));
        if (u == v) continue;
        auto key = std::minmax(u, v);
        if (used.insert(key).second) edges.push_back(key);
    }
    IndependenceSystem sys(m, GraphicMatroid{16, std::move(edges), true});
    ScoreMatrix w(m);
    for (AgentId i = 0; i < m; ++i) {
        AgentId j = static_cast<AgentId>(rng.below(m));
        if (j != i) w.set(i, j, Rational(1 + static_cast<std::int64_t>(rng.below(5))));
    }
    Instance inst(std::move(sys), std::move(w));

    CHECK_THROWS_AS(brute_opt(inst), budget_error);
    MarginalVector p = mpr_marginals(inst);
    SelectionDistribution dist = mpr(inst);
    for (const auto& [set, prob] : dist.support()) CHECK(inst.system.is_independent(set));
    for (AgentId i = 0; i < m; ++i) CHECK(dist.marginal(i) == p[i]);

    // The guarantee holds against the structural optimum (greedy basis).
    Rational opt = score_from(inst.scores, AgentSubset::full(m),
                              greedy_basis(inst.system, inst.scores.agent_totals()));
    CHECK(opt == opt_score(inst));
    CHECK(Rational(1, 2) * opt <= expected_score(dist, inst.scores));
}

TEST_CASE("best_from_partition picks one best agent per nonempty part") {
    std::vector<AgentSubset> singletons{AgentSubset::of({0}, 3), AgentSubset::of({1}, 3),
                                        AgentSubset::of({2}, 3)};
    std::vector<Rational> zero(3);
    CHECK(best_from_partition(3, singletons, zero) == AgentSubset::full(3));

    std::vector<AgentSubset> joint{AgentSubset::of({0, 1}, 2)};
    CHECK(best_from_partition(2, joint, {Rational(0), Rational(0)}) == AgentSubset::of({0}, 2));

    std::vector<AgentSubset> parts{AgentSubset::of({0, 1}, 3), AgentSubset::of({2}, 3)};
    CHECK(best_from_partition(3, parts, {Rational(1), Rational(2), Rational(0)}) ==
          AgentSubset::of({1, 2}, 3));
}
