#include <doctest.h>

#include "impartial/io.hpp"
#include "impartial/verify.hpp"
#include "test_util.hpp"

using namespace impartial;
using impartial::testing::mutual_pair_instance;
using impartial::testing::path_instance;
using impartial::testing::triangle_instance;

TEST_CASE("check_impartiality accepts the mechanisms and finds planted bias") {
    // Identity deviation trivially passes.
    {
        Instance pair = mutual_pair_instance();
        DeviationPlan plan{0, {pair.scores.row(0)}};
        CHECK(check_impartiality(pair, Mechanism::partition(), plan).pass);
    }

    // The size-1 agent of the knapsack showcase stays unselected when its
    // vote grows to weight 10 (its removal analysis is unchanged).
    {
        Instance fig = gen_fig4('a').instance;
        std::vector<Rational> row(10);
        row[2] = Rational(10);
        DeviationPlan plan{3, {row}};
        ImpartialityReport rep = check_impartiality(fig, Mechanism::kpr(1), plan);
        CHECK(rep.pass);
        CHECK(rep.base_marginal == Rational(0));
    }

    // Rescaling an existing vote never moves the voter's own marginal.
    {
        Instance tri = triangle_instance();
        std::vector<Rational> row(3);
        row[0] = Rational(100);
        DeviationPlan plan{2, {row}};
        ImpartialityReport rep = check_impartiality(tri, Mechanism::mpr(), plan);
        CHECK(rep.pass);
        CHECK(rep.base_marginal == Rational(1, 2));
    }

    // Standard battery across every mechanism on matching instances.
    {
        Instance pair = mutual_pair_instance();
        for (AgentId i = 0; i < 2; ++i)
            CHECK(check_impartiality(pair, Mechanism::partition(), standard_deviation_plan(pair, Mechanism::partition(), i)).pass);

        Instance fig = gen_fig4('b').instance;
        for (AgentId i = 0; i < 10; ++i)
            CHECK(check_impartiality(fig, Mechanism::kpr(1), standard_deviation_plan(fig, Mechanism::kpr(1), i)).pass);

        Instance path = path_instance();
        Mechanism vp = Mechanism::vertex_partition();
        for (AgentId i = 0; i < 2; ++i)
            CHECK(check_impartiality(path, vp, standard_deviation_plan(path, vp, i)).pass);
    }

    // The raw optimum is not impartial: on the mutual pair, the loser can
    // flip its own selection by withdrawing its vote. The exact-equality
    // check is what catches this shape of bias.
    {
        Instance pair = mutual_pair_instance();
        SelectionDistribution before = SelectionDistribution::point_mass(brute_opt(pair));
        Instance after(pair.system, pair.scores.with_row(1, std::vector<Rational>(2)));
        SelectionDistribution after_dist = SelectionDistribution::point_mass(brute_opt(after));
        CHECK(before.marginal(1) == Rational(0));
        CHECK(after_dist.marginal(1) == Rational(1));
    }

    // Class-violating deviations are named.
    {
        Instance fig = gen_fig4('a').instance;
        std::vector<Rational> wide(10);
        wide[0] = wide[1] = Rational(1);
        DeviationPlan plan{4, {wide}};
        CHECK_THROWS_WITH_AS(check_impartiality(fig, Mechanism::kpr(1), plan),
                             doctest::Contains("sparsity"), contract_error);

        Instance path = path_instance();
        std::vector<Rational> frac(2);
        frac[1] = Rational(1, 2);
        DeviationPlan plan2{0, {frac}};
        CHECK_THROWS_WITH_AS(check_impartiality(path, Mechanism::vertex_partition(), plan2),
                             doctest::Contains("binary"), contract_error);
    }
}

TEST_CASE("check_feasibility covers all realizations") {
    Instance fig = gen_fig4('a').instance;
    CHECK(check_feasibility(fig, Mechanism::kpr(1)).pass);
    CHECK(check_feasibility(gen_unit_density().instance, Mechanism::dkpr(1, Rational(4))).pass);

    Instance tri = triangle_instance();
    CHECK(check_feasibility(tri, Mechanism::mpr()).pass);

    Instance wheel = gen_wheel(4).instance;
    CHECK(check_feasibility(wheel, Mechanism::vertex_partition()).pass);
}

TEST_CASE("check_rank_marginals is the exact subset inequality") {
    Instance tri = triangle_instance();
    CHECK(check_rank_marginals(tri, SelectionDistribution::point_mass(AgentSubset::of({0, 1}, 3))).pass);

    SelectionDistribution half = mpr(tri);
    RankMarginalsReport rep = check_rank_marginals(tri, half);
    CHECK(rep.pass);

    // Mass one on the full (dependent) triangle violates the inequality.
    RankMarginalsReport bad =
        check_rank_marginals(tri, SelectionDistribution::point_mass(AgentSubset::full(3)));
    CHECK(!bad.pass);
    REQUIRE(bad.witness.has_value());
    CHECK(Rational(bad.rank) < bad.mass);
}

TEST_CASE("ratio reports exact quotients against bounds") {
    Instance pair = mutual_pair_instance();
    RatioReport partition_rep = ratio(pair, Mechanism::partition(), Rational(1, 4), "pair");
    CHECK(partition_rep.ratio == Rational(3, 4));
    CHECK(partition_rep.pass);

    Instance tri = triangle_instance();
    RatioReport mpr_rep = ratio(tri, Mechanism::mpr(), Rational(1, 2), "triangle");
    CHECK(mpr_rep.expected == Rational(3));
    CHECK(mpr_rep.opt == Rational(5));
    CHECK(mpr_rep.ratio == Rational(3, 5));
    CHECK(mpr_rep.pass);

    Instance path = path_instance();
    RatioReport vp_rep = ratio(path, Mechanism::vertex_partition(), Rational(1, 3), "path");
    CHECK(vp_rep.ratio == Rational(5, 6));
    CHECK(vp_rep.pass);

    Instance zero(IndependenceSystem(2, UniformMatroid{1}), ScoreMatrix(2));
    CHECK_THROWS_AS(ratio(zero, Mechanism::partition(), Rational(1, 4)), contract_error);
}

TEST_CASE("cycle construction installs unit votes on a minimum dependent set") {
    CycleConstruction c = gen_cycle_girth(IndependenceSystem(4, UniformMatroid{2}));
    CHECK(c.girth == 3);
    CHECK(c.dependent_set == AgentSubset::of({0, 1, 2}, 4));
    CHECK(c.instance.scores.at(0, 1) == Rational(1));
    CHECK(c.instance.scores.at(1, 2) == Rational(1));
    CHECK(c.instance.scores.at(2, 0) == Rational(1));
    CHECK(opt_score(c.instance) == Rational(c.girth - 1));

    CycleConstruction tri = gen_cycle_girth(impartial::testing::triangle_system());
    CHECK(tri.dependent_set == AgentSubset::full(3));
    CHECK(opt_score(tri.instance) == Rational(2));

    // Every proper subset of the found set is independent.
    for (AgentId i : c.dependent_set.members())
        CHECK(c.instance.system.is_independent(c.dependent_set.without(i)));
    CHECK(!c.instance.system.is_independent(c.dependent_set));

    std::vector<AgentSubset> all{AgentSubset::full(2)};
    CHECK_THROWS_AS(gen_cycle_girth(IndependenceSystem(2, all)), contract_error);
}

TEST_CASE("star construction doubles the optimum in its augmented variant") {
    StarConstruction s = gen_star_dependent(IndependenceSystem(4, UniformMatroid{2}));
    CHECK(s.girth == 3);
    CHECK(s.dependent_set == AgentSubset::of({0, 1, 2}, 4));
    CHECK(s.outside_voter == 3);
    CHECK(s.designated == 0);
    CHECK(s.base.scores.at(3, 0) == Rational(1));
    CHECK(s.augmented.scores.at(0, 1) == Rational(1));
    CHECK(s.augmented.scores.at(0, 2) == Rational(1));
    CHECK(opt_score(s.base) == Rational(s.girth - 1));
    CHECK(opt_score(s.augmented) == Rational(2 * (s.girth - 1)));

    // Needs an agent outside the dependent set.
    CHECK_THROWS_AS(gen_star_dependent(IndependenceSystem(3, UniformMatroid{2})), contract_error);
}

TEST_CASE("wheel construction counts out correctly") {
    GeneratedInstance w4 = gen_wheel(4);
    CHECK(w4.instance.ground_size() == 6);
    int votes = 0;
    for (AgentId i = 0; i < 6; ++i) votes += w4.instance.scores.row_support(i);
    CHECK(votes == 3);
    CHECK(opt_score(w4.instance) == Rational(3));

    GeneratedInstance w9 = gen_wheel(9);
    CHECK(w9.instance.ground_size() == 16);
    CHECK(opt_score(w9.instance) == Rational(8));

    CHECK_THROWS_AS(gen_wheel(3), contract_error);
}

TEST_CASE("random generator is reproducible and in class") {
    GeneratedInstance a = gen_random(SystemKind::knapsack, 8, 1, false, 77);
    GeneratedInstance b = gen_random(SystemKind::knapsack, 8, 1, false, 77);
    CHECK(write_instance(a.instance) == write_instance(b.instance));

    for (int t = 0; t < 10; ++t) {
        Instance inst = gen_random(SystemKind::graphic, 6, 1, true, 600 + static_cast<std::uint64_t>(t)).instance;
        CHECK(inst.scores.sparsity() <= 1);
        CHECK(inst.scores.is_binary());
    }
    Instance rat = gen_random(SystemKind::uniform, 6, 3, false, 5).instance;
    CHECK(rat.scores.sparsity() <= 3);
}
