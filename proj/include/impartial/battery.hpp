#pragma once

#include <string>
#include <vector>

#include "impartial/engine.hpp"
#include "impartial/generators.hpp"

namespace impartial {

/// One (instance, mechanism) pair of a guarantee battery.
struct BatteryEntry {
    std::string id;
    Instance instance;
    Mechanism mechanism;
};

namespace detail {

inline Instance chain_knapsack() {
    IndependenceSystem sys(
        6, KnapsackSystem{{Rational(2), Rational(2), Rational(2), Rational(2), Rational(2), Rational(2)},
                          Rational(10)});
    ScoreMatrix w(6);
    w.set(1, 0, Rational(6));
    w.set(2, 1, Rational(5));
    w.set(3, 2, Rational(4));
    w.set(4, 3, Rational(3));
    w.set(5, 4, Rational(2));
    w.set(0, 5, Rational(1));
    return Instance(std::move(sys), std::move(w));
}

inline Instance triangle_votes() {
    IndependenceSystem sys(3, GraphicMatroid{3, {{0, 1}, {1, 2}, {0, 2}}, true});
    ScoreMatrix w(3);
    w.set(0, 1, Rational(2));
    w.set(1, 2, Rational(1));
    w.set(2, 0, Rational(3));
    return Instance(std::move(sys), std::move(w));
}

inline Instance unit_path() {
    IndependenceSystem sys(2, GraphicMatroid{3, {{0, 1}, {1, 2}}, true});
    ScoreMatrix w(2);
    w.set(0, 1, Rational(1));
    w.set(1, 0, Rational(1));
    return Instance(std::move(sys), std::move(w));
}

} // namespace detail

/// The generated instances a mechanism's guarantees are exercised on:
/// handcrafted showcases plus `random_count` seeded random instances of the
/// mechanism's class. All entries admit exact guarantee checks except the
/// larger vertex-partition graphs, whose randomness exceeds the exact
/// budget (callers consult randomness_spec and fall back to sampling).
inline std::vector<BatteryEntry> guarantee_battery(Mechanism::Kind kind, int d, int random_count,
                                                   std::uint64_t seed0 = 1000) {
    std::vector<BatteryEntry> out;
    switch (kind) {
        case Mechanism::Kind::partition: {
            Mechanism mech = Mechanism::partition();
            out.push_back({"cycle_uniform_k2_m4",
                           gen_cycle_girth(IndependenceSystem(4, UniformMatroid{2})).instance, mech});
            out.push_back({"cycle_triangle",
                           gen_cycle_girth(IndependenceSystem(3, GraphicMatroid{3, {{0, 1}, {1, 2}, {0, 2}}, true}))
                               .instance,
                           mech});
            out.push_back({"star_uniform_base",
                           gen_star_dependent(IndependenceSystem(4, UniformMatroid{2})).base, mech});
            out.push_back({"star_uniform_augmented",
                           gen_star_dependent(IndependenceSystem(4, UniformMatroid{2})).augmented, mech});
            SystemKind kinds[] = {SystemKind::uniform, SystemKind::partition, SystemKind::graphic,
                                  SystemKind::knapsack, SystemKind::explicit_list};
            for (int t = 0; t < random_count; ++t) {
                GeneratedInstance g = gen_random(kinds[t % 5], 4 + t % 6, 1 + t % 3, t % 2 == 0,
                                                 seed0 + static_cast<std::uint64_t>(t));
                out.push_back({g.id, std::move(g.instance), mech});
            }
            break;
        }
        case Mechanism::Kind::kpr: {
            Mechanism mech = Mechanism::kpr(d);
            if (d == 1) {
                out.push_back({"fig4a", gen_fig4('a').instance, mech});
                out.push_back({"fig4b", gen_fig4('b').instance, mech});
            }
            {
                // Everything fits: the whole ground is one support set.
                IndependenceSystem sys(3, KnapsackSystem{{Rational(1), Rational(2), Rational(3)}, Rational(10)});
                ScoreMatrix w(3);
                w.set(0, 1, Rational(1));
                out.push_back({"kpr_allfit", Instance(std::move(sys), std::move(w)), mech});
            }
            for (int t = 0; t < random_count; ++t) {
                GeneratedInstance g = gen_random(SystemKind::knapsack, 4 + t % 7, d, t % 2 == 0,
                                                 seed0 + 50 + static_cast<std::uint64_t>(t));
                out.push_back({g.id, std::move(g.instance), mech});
            }
            break;
        }
        case Mechanism::Kind::dkpr: {
            if (d == 1) {
                out.push_back({"unit_density", gen_unit_density().instance, Mechanism::dkpr(1, Rational(4))});
                out.push_back({"chain", detail::chain_knapsack(), Mechanism::dkpr(1, Rational(2))});
            }
            // Random sizes are in [1, 6] against capacity 20, so s_max = 6
            // keeps the size condition for d <= 2.
            Mechanism mech = Mechanism::dkpr(d, Rational(6));
            for (int t = 0; t < random_count; ++t) {
                GeneratedInstance g = gen_random(SystemKind::knapsack, 4 + t % 7, d, t % 2 == 0,
                                                 seed0 + 150 + static_cast<std::uint64_t>(t));
                out.push_back({g.id, std::move(g.instance), mech});
            }
            break;
        }
        case Mechanism::Kind::mpr: {
            Mechanism mech = Mechanism::mpr();
            out.push_back({"triangle_votes", detail::triangle_votes(), mech});
            {
                IndependenceSystem sys(2, UniformMatroid{1});
                ScoreMatrix w(2);
                w.set(0, 1, Rational(1));
                w.set(1, 0, Rational(1));
                out.push_back({"mutual_pair", Instance(std::move(sys), std::move(w)), mech});
            }
            SystemKind kinds[] = {SystemKind::uniform, SystemKind::partition, SystemKind::graphic};
            for (int t = 0; t < random_count; ++t) {
                GeneratedInstance g = gen_random(kinds[t % 3], 4 + t % 7, 1, t % 2 == 0,
                                                 seed0 + 300 + static_cast<std::uint64_t>(t));
                out.push_back({g.id, std::move(g.instance), mech});
            }
            break;
        }
        case Mechanism::Kind::vertex_partition: {
            Mechanism mech = Mechanism::vertex_partition();
            out.push_back({"unit_path", detail::unit_path(), mech});
            out.push_back({"wheel_n4", gen_wheel(4).instance, mech});
            for (int t = 0; t < random_count; ++t) {
                // Small simple graphs stay within the exact permutation
                // budget; a few rim sizes beyond it exercise sampling.
                if (t % 4 == 3) {
                    GeneratedInstance g = gen_wheel(6 + (t / 4) % 4);
                    out.push_back({g.id, std::move(g.instance), mech});
                } else {
                    GeneratedInstance g = gen_random(SystemKind::graphic, 3 + t % 3, 2, true,
                                                     seed0 + 450 + static_cast<std::uint64_t>(t));
                    out.push_back({g.id, std::move(g.instance), mech});
                }
            }
            break;
        }
    }
    return out;
}

/// Batteries for all mechanisms of the standard grid, in report order.
inline std::vector<BatteryEntry> full_battery(int random_count, std::uint64_t seed0 = 1000) {
    std::vector<BatteryEntry> all;
    auto append = [&](std::vector<BatteryEntry> v) {
        for (BatteryEntry& e : v) all.push_back(std::move(e));
    };
    append(guarantee_battery(Mechanism::Kind::partition, 1, random_count, seed0));
    append(guarantee_battery(Mechanism::Kind::kpr, 1, random_count, seed0 + 1));
    append(guarantee_battery(Mechanism::Kind::kpr, 2, random_count, seed0 + 2));
    append(guarantee_battery(Mechanism::Kind::dkpr, 1, random_count, seed0 + 3));
    append(guarantee_battery(Mechanism::Kind::mpr, 1, random_count, seed0 + 4));
    append(guarantee_battery(Mechanism::Kind::vertex_partition, 1, random_count, seed0 + 5));
    return all;
}

} // namespace impartial
