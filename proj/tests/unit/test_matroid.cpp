#include <doctest.h>

#include "impartial/generators.hpp"
#include "impartial/matroid.hpp"
#include "test_util.hpp"

using namespace impartial;
using impartial::testing::all_subsets;
using impartial::testing::triangle_system;

namespace {

std::vector<IndependenceSystem> sample_matroids(int m, int count, std::uint64_t seed0) {
    std::vector<IndependenceSystem> out;
    SystemKind kinds[] = {SystemKind::uniform, SystemKind::partition, SystemKind::graphic};
    for (int t = 0; t < count; ++t)
        out.push_back(gen_random(kinds[t % 3], m, 1, false, seed0 + static_cast<std::uint64_t>(t)).instance.system);
    return out;
}

std::vector<AgentSubset> bases_of(const IndependenceSystem& sys) {
    int r = sys.rank(AgentSubset::full(sys.ground_size()));
    std::vector<AgentSubset> out;
    for (const AgentSubset& s : all_subsets(sys.ground_size()))
        if (s.count() == r && sys.is_independent(s)) out.push_back(s);
    return out;
}

bool two_partition_feasible_oracle(const IndependenceSystem& sys, const AgentSubset& s) {
    std::uint64_t sub = s.bits;
    while (true) {
        AgentSubset t(sub, s.ground);
        if (t.count() > 2 * sys.rank(t)) return false;
        if (sub == 0) break;
        sub = (sub - 1) & s.bits;
    }
    return true;
}

} // namespace

TEST_CASE("span matches its definition") {
    IndependenceSystem tri = triangle_system();
    CHECK(span(tri, AgentSubset::empty(3)) == AgentSubset::empty(3));
    // Two edges of the triangle span the third.
    CHECK(span(tri, AgentSubset::of({0, 1}, 3)) == AgentSubset::full(3));

    IndependenceSystem uni(5, UniformMatroid{2});
    CHECK(span(uni, AgentSubset::of({0, 3}, 5)) == AgentSubset::full(5));

    IndependenceSystem knap(2, KnapsackSystem{{Rational(1), Rational(1)}, Rational(2)});
    CHECK_THROWS_AS(span(knap, AgentSubset::empty(2)), contract_error);

    // Monotone: S subset of T implies span(S) subset of span(T).
    for (const IndependenceSystem& sys : sample_matroids(6, 9, 321))
        for (const AgentSubset& s : all_subsets(6))
            for (AgentId extra = 0; extra < 6; ++extra)
                CHECK(span(sys, s).subset_of(span(sys, s.with(extra))));
}

TEST_CASE("strong base exchange holds on small matroids") {
    for (const IndependenceSystem& sys : sample_matroids(6, 9, 77)) {
        std::vector<AgentSubset> bases = bases_of(sys);
        for (const AgentSubset& b1 : bases)
            for (const AgentSubset& b2 : bases)
                for (AgentId x : b1.minus(b2).members()) {
                    bool found = false;
                    for (AgentId y : b2.minus(b1).members()) {
                        AgentSubset c1 = b2.with(x).without(y);
                        AgentSubset c2 = b1.with(y).without(x);
                        if (sys.is_independent(c1) && sys.is_independent(c2)) {
                            found = true;
                            break;
                        }
                    }
                    CHECK(found);
                }
    }
}

TEST_CASE("greedy_basis follows the canonical tie-breaks") {
    // All weights zero: the canonically greatest basis wins.
    IndependenceSystem uni(3, UniformMatroid{2});
    std::vector<Rational> zero(3);
    CHECK(greedy_basis(uni, zero) == AgentSubset::of({0, 1}, 3));

    IndependenceSystem tri = triangle_system();
    std::vector<Rational> tri_w{Rational(3), Rational(2), Rational(1)};
    CHECK(greedy_basis(tri, tri_w) == AgentSubset::of({0, 1}, 3));

    std::vector<Rational> uw{Rational(5), Rational(5), Rational(1)};
    CHECK(greedy_basis(uni, uw) == AgentSubset::of({0, 1}, 3));

    std::vector<Rational> neg{Rational(-1), Rational(0), Rational(0)};
    CHECK_THROWS_AS(greedy_basis(uni, neg), contract_error);
}

TEST_CASE("runners-up never exceed twice the basis") {
    // Delete one element at a time; the union of the greedy bases of the
    // deletions stays within twice the original basis.
    SystemKind kinds[] = {SystemKind::uniform, SystemKind::partition, SystemKind::graphic};
    for (int t = 0; t < 15; ++t) {
        Instance inst = gen_random(kinds[t % 3], 8, 1, false, 2400 + static_cast<std::uint64_t>(t)).instance;
        const IndependenceSystem& sys = inst.system;
        std::vector<Rational> weights = inst.scores.agent_totals();
        AgentSubset base = greedy_basis(sys, weights);
        AgentSubset uni = AgentSubset::empty(8);
        for (AgentId e = 0; e < 8; ++e) {
            AgentSubset rest = AgentSubset::full(8).without(e);
            uni = uni.unite(detail::argmax_matroid_greedy(sys, weights, rest));
        }
        CHECK(uni.count() <= 2 * base.count());
    }
}

TEST_CASE("two_partition splits or certifies infeasibility") {
    IndependenceSystem tri = triangle_system();
    auto ind = two_partition(tri, AgentSubset::of({0, 1}, 3));
    REQUIRE(ind.has_value());
    CHECK(ind->first == AgentSubset::of({0, 1}, 3));
    CHECK(ind->second == AgentSubset::empty(3));

    auto split = two_partition(tri, AgentSubset::full(3));
    REQUIRE(split.has_value());
    CHECK(split->first.unite(split->second) == AgentSubset::full(3));
    CHECK(split->first.intersect(split->second).is_empty());
    CHECK(tri.is_independent(split->first));
    CHECK(tri.is_independent(split->second));

    IndependenceSystem one(3, UniformMatroid{1});
    CHECK(!two_partition(one, AgentSubset::full(3)).has_value());

    // K4: the complement of a star spanning tree is a triangle, so the
    // reshuffling path is actually exercised.
    IndependenceSystem k4(6, GraphicMatroid{4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, true});
    auto k4split = two_partition(k4, AgentSubset::full(6));
    REQUIRE(k4split.has_value());
    CHECK(k4.is_independent(k4split->first));
    CHECK(k4.is_independent(k4split->second));
    CHECK(k4split->first.unite(k4split->second) == AgentSubset::full(6));

    CHECK_THROWS_AS(
        two_partition(IndependenceSystem(2, KnapsackSystem{{Rational(1), Rational(1)}, Rational(2)}),
                      AgentSubset::full(2)),
        contract_error);

    // Feasibility must coincide with the rank criterion on every subset.
    for (const IndependenceSystem& sys : sample_matroids(8, 18, 5150)) {
        detail::TrialRng rng(5150, 99);
        for (int t = 0; t < 12; ++t) {
            AgentSubset s(rng.below(256), 8);
            auto got = two_partition(sys, s);
            CHECK(got.has_value() == two_partition_feasible_oracle(sys, s));
            if (got) {
                CHECK(got->first.unite(got->second) == s);
                CHECK(got->first.intersect(got->second).is_empty());
                CHECK(sys.is_independent(got->first));
                CHECK(sys.is_independent(got->second));
            }
        }
    }
}

TEST_CASE("decompose_marginals realizes half-integral marginals exactly") {
    IndependenceSystem tri = triangle_system();

    MarginalVector zero(3);
    SelectionDistribution trivial = decompose_marginals(tri, zero);
    REQUIRE(trivial.support().size() == 1);
    CHECK(trivial.support()[0].first == AgentSubset::empty(3));
    CHECK(trivial.support()[0].second == Rational(1));

    MarginalVector half(3);
    half[0] = half[1] = half[2] = Rational(1, 2);
    SelectionDistribution dist = decompose_marginals(tri, half);
    Rational total;
    for (const auto& [set, prob] : dist.support()) {
        CHECK(tri.is_independent(set));
        total += prob;
    }
    CHECK(total == Rational(1));
    for (AgentId i = 0; i < 3; ++i) CHECK(dist.marginal(i) == Rational(1, 2));

    IndependenceSystem one(2, UniformMatroid{1});
    MarginalVector p(2);
    p[0] = p[1] = Rational(1, 2);
    SelectionDistribution singles = decompose_marginals(one, p);
    REQUIRE(singles.support().size() == 2);
    CHECK(singles.support()[0].first == AgentSubset::of({0}, 2));
    CHECK(singles.support()[1].first == AgentSubset::of({1}, 2));

    // Marginal shape outside {0, 1/2} is out of contract.
    MarginalVector bad(2);
    bad[0] = Rational(1, 3);
    CHECK_THROWS_AS(decompose_marginals(one, bad), contract_error);

    // Infeasible half-integral marginals name a violating set.
    IndependenceSystem tight(3, UniformMatroid{1});
    MarginalVector over(3);
    over[0] = over[1] = over[2] = Rational(1, 2);
    CHECK_THROWS_WITH_AS(decompose_marginals(tight, over),
                         doctest::Contains("rank condition"), contract_error);
}
