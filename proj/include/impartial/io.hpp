#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "impartial/verify.hpp"

namespace impartial {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Instance files
//
// {
//   "m": 3,
//   "system": {"kind": "uniform", "k": 2},
//   "scores": [[0, 1, "3/2"], [2, 0, "1/1"]]
// }
//
// Scores are a sparse triplet list with rationals as "num/den" strings;
// omitted entries are zero. Keys serialize in sorted order, so identical
// content yields identical bytes.
// ---------------------------------------------------------------------------

namespace detail {

inline json rational_to_json(const Rational& r) { return r.str(); }

inline Rational rational_from_json(const json& j, const std::string& where) {
    if (!j.is_string()) throw contract_error(where + ": rationals must be \"num/den\" strings");
    return Rational::parse(j.get<std::string>());
}

inline json system_to_json(const IndependenceSystem& sys) {
    json out;
    switch (sys.kind()) {
        case SystemKind::uniform:
            out["kind"] = "uniform";
            out["k"] = sys.payload<UniformMatroid>().k;
            break;
        case SystemKind::partition: {
            const auto& pm = sys.payload<PartitionMatroid>();
            out["kind"] = "partition";
            out["blocks"] = pm.blocks;
            out["capacities"] = pm.capacities;
            break;
        }
        case SystemKind::graphic: {
            const auto& gm = sys.payload<GraphicMatroid>();
            out["kind"] = "graphic";
            out["vertices"] = gm.vertex_count;
            json edges = json::array();
            for (auto& [u, v] : gm.edges) edges.push_back(json::array({u, v}));
            out["edges"] = edges;
            out["simple"] = gm.simple;
            break;
        }
        case SystemKind::knapsack: {
            const auto& ks = sys.payload<KnapsackSystem>();
            out["kind"] = "knapsack";
            json sizes = json::array();
            for (const Rational& s : ks.sizes) sizes.push_back(rational_to_json(s));
            out["sizes"] = sizes;
            out["capacity"] = rational_to_json(ks.capacity);
            break;
        }
        case SystemKind::explicit_list: {
            const auto& ex = sys.payload<ExplicitSystem>();
            out["kind"] = "explicit";
            json sets = json::array();
            for (std::uint64_t mask : ex.independent)
                sets.push_back(AgentSubset(mask, sys.ground_size()).members());
            out["independent_sets"] = sets;
            break;
        }
    }
    return out;
}

inline IndependenceSystem system_from_json(const json& j, int m) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw contract_error("system: missing string field 'kind'");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform") {
        if (!j.contains("k") || !j.at("k").is_number_integer())
            throw contract_error("system: uniform kind needs integer 'k'");
        return IndependenceSystem(m, UniformMatroid{j.at("k").get<int>()});
    }
    if (kind == "partition") {
        PartitionMatroid pm;
        pm.blocks = j.at("blocks").get<std::vector<std::vector<AgentId>>>();
        pm.capacities = j.at("capacities").get<std::vector<int>>();
        return IndependenceSystem(m, std::move(pm));
    }
    if (kind == "graphic") {
        GraphicMatroid gm;
        gm.vertex_count = j.at("vertices").get<int>();
        for (const json& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2)
                throw contract_error("system: each edge must be a pair [u, v]");
            gm.edges.push_back({e[0].get<int>(), e[1].get<int>()});
        }
        gm.simple = j.value("simple", true);
        return IndependenceSystem(m, std::move(gm));
    }
    if (kind == "knapsack") {
        KnapsackSystem ks;
        int idx = 0;
        for (const json& s : j.at("sizes"))
            ks.sizes.push_back(rational_from_json(s, "system.sizes[" + std::to_string(idx++) + "]"));
        ks.capacity = rational_from_json(j.at("capacity"), "system.capacity");
        return IndependenceSystem(m, std::move(ks));
    }
    if (kind == "explicit") {
        std::vector<AgentSubset> sets;
        for (const json& s : j.at("independent_sets")) {
            AgentSubset sub = AgentSubset::empty(m);
            for (const json& i : s) sub = sub.with(i.get<int>());
            sets.push_back(sub);
        }
        return IndependenceSystem(m, sets);
    }
    throw contract_error("system: unknown kind '" + kind + "'");
}

} // namespace detail

inline std::string write_instance(const Instance& inst) {
    json out;
    out["m"] = inst.ground_size();
    out["system"] = detail::system_to_json(inst.system);
    json scores = json::array();
    for (AgentId i = 0; i < inst.ground_size(); ++i)
        for (AgentId j = 0; j < inst.ground_size(); ++j)
            if (!inst.scores.at(i, j).is_zero())
                scores.push_back(json::array({i, j, detail::rational_to_json(inst.scores.at(i, j))}));
    out["scores"] = scores;
    return out.dump(2) + "\n";
}

inline Instance parse_instance(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw contract_error(std::string("instance file is not valid JSON: ") + e.what());
    }
    try {
        if (!j.contains("m") || !j.at("m").is_number_integer())
            throw contract_error("instance: missing integer field 'm'");
        int m = j.at("m").get<int>();
        IndependenceSystem sys = detail::system_from_json(j.at("system"), m);
        ScoreMatrix w(m);
        int idx = 0;
        for (const json& t : j.at("scores")) {
            std::string where = "scores[" + std::to_string(idx++) + "]";
            if (!t.is_array() || t.size() != 3)
                throw contract_error(where + ": expected a triplet [i, j, \"num/den\"]");
            if (!t[0].is_number_integer() || !t[1].is_number_integer())
                throw contract_error(where + ": agent ids must be integers");
            int i = t[0].get<int>();
            int jj = t[1].get<int>();
            if (i < 0 || i >= m || jj < 0 || jj >= m)
                throw contract_error(where + ": agent index out of range in (" + std::to_string(i) +
                                     ", " + std::to_string(jj) + ")");
            if (i == jj)
                throw contract_error(where + ": diagonal entry (" + std::to_string(i) + ", " +
                                     std::to_string(jj) + ") must be absent");
            Rational v = detail::rational_from_json(t[2], where);
            if (v.sign() < 0) throw contract_error(where + ": negative score");
            w.set(i, jj, v);
        }
        return Instance(std::move(sys), std::move(w));
    } catch (const json::exception& e) {
        throw contract_error(std::string("instance: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Distribution files: {"support": [{"set": [0, 2], "prob": "1/2"}, ...]}
// ---------------------------------------------------------------------------

inline SelectionDistribution parse_distribution(const std::string& text, int m) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw contract_error(std::string("distribution file is not valid JSON: ") + e.what());
    }
    try {
        std::vector<std::pair<AgentSubset, Rational>> entries;
        int idx = 0;
        for (const json& item : j.at("support")) {
            std::string where = "support[" + std::to_string(idx++) + "]";
            AgentSubset set = AgentSubset::empty(m);
            for (const json& i : item.at("set")) {
                int id = i.get<int>();
                if (id < 0 || id >= m)
                    throw contract_error(where + ": agent index " + std::to_string(id) + " out of range");
                set = set.with(id);
            }
            entries.push_back({set, detail::rational_from_json(item.at("prob"), where)});
        }
        return SelectionDistribution(m, std::move(entries));
    } catch (const json::exception& e) {
        throw contract_error(std::string("distribution: ") + e.what());
    }
}

inline std::string write_distribution(const SelectionDistribution& dist) {
    json support = json::array();
    for (const auto& [set, prob] : dist.support()) {
        json item;
        item["set"] = set.members();
        item["prob"] = detail::rational_to_json(prob);
        support.push_back(item);
    }
    json out;
    out["support"] = support;
    return out.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// CSV reports
// ---------------------------------------------------------------------------

inline std::string mechanism_class_name(const Mechanism& mech) {
    switch (mech.kind) {
        case Mechanism::Kind::partition: return "general";
        case Mechanism::Kind::kpr: return "knapsack_" + std::to_string(mech.d) + "sparse";
        case Mechanism::Kind::dkpr: return "knapsack_small_" + std::to_string(mech.d) + "sparse";
        case Mechanism::Kind::mpr: return "matroid_1sparse";
        case Mechanism::Kind::vertex_partition:
            return mech.permissive ? "graphic_simple_any" : "graphic_simple_binary";
    }
    return "?";
}

struct ReportRow {
    std::string instance_id;
    std::string mechanism;
    int m = 0;
    std::string instance_class;
    Rational ratio;
    Rational bound;
    bool pass = false;
    Rational expected_score;
    Rational opt_score;
    std::int64_t runtime_ms = 0;
};

inline ReportRow report_row(const RatioReport& rr, const std::string& cls, std::int64_t runtime_ms) {
    return {rr.instance_id, rr.mechanism, rr.m,       cls,     rr.ratio,
            rr.bound,       rr.pass,      rr.expected, rr.opt, runtime_ms};
}

inline std::string write_report_csv(const std::vector<ReportRow>& rows) {
    std::string out =
        "instance_id,mechanism,m,class,exact_ratio_num,exact_ratio_den,bound_num,bound_den,pass,"
        "expected_score,opt_score,runtime_ms\n";
    for (const ReportRow& r : rows) {
        out += r.instance_id + "," + r.mechanism + "," + std::to_string(r.m) + "," + r.instance_class +
               "," + std::to_string(r.ratio.num()) + "," + std::to_string(r.ratio.den()) + "," +
               std::to_string(r.bound.num()) + "," + std::to_string(r.bound.den()) + "," +
               (r.pass ? "true" : "false") + "," + r.expected_score.str() + "," + r.opt_score.str() +
               "," + std::to_string(r.runtime_ms) + "\n";
    }
    return out;
}

} // namespace impartial
