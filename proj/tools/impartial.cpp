// Command-line front end: run mechanisms on instance files, verify their
// guarantees, generate benchmark instances and produce CSV reports.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "impartial/battery.hpp"
#include "impartial/io.hpp"
#include "impartial/lemmas.hpp"
#include "impartial/verify.hpp"

namespace {

using namespace impartial;

constexpr int kExitPass = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw contract_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw contract_error("cannot write file: " + path);
    out << content;
}

int thread_count_from_env() {
    const char* v = std::getenv("IMPARTIAL_THREADS");
    if (!v) return 1;
    int n = std::atoi(v);
    return n >= 1 ? n : 1;
}

struct MechanismFlags {
    std::string name = "partition";
    int d = 1;
    std::string smax;
    bool permissive = false;
};

Mechanism mechanism_from_flags(const MechanismFlags& f, const Instance* inst, std::ostream& warn) {
    if (f.name == "partition") return Mechanism::partition();
    if (f.name == "kpr") return Mechanism::kpr(f.d);
    if (f.name == "mpr") return Mechanism::mpr();
    if (f.name == "vertex_partition") return Mechanism::vertex_partition(f.permissive);
    if (f.name == "dkpr") {
        if (!f.smax.empty()) return Mechanism::dkpr(f.d, Rational::parse(f.smax));
        if (inst) {
            Mechanism mech = Mechanism::dkpr(f.d);
            warn << "warning: --smax not given; defaulting to the maximum agent size "
                 << effective_smax(*inst, mech).str() << " (the guarantee class fixes s_max)\n";
            return mech;
        }
        return Mechanism::dkpr(f.d);
    }
    throw contract_error("unknown mechanism '" + f.name +
                         "' (expected partition|kpr|dkpr|mpr|vertex_partition)");
}

void print_distribution(const SelectionDistribution& dist) {
    for (const auto& [set, prob] : dist.support())
        std::cout << "P[" << set.str() << "] = " << prob.str() << "\n";
}

void print_estimate(const EstimateReport& rep) {
    std::cout << "trials = " << rep.trials << ", seed = " << rep.seed << "\n";
    for (std::size_t i = 0; i < rep.marginal_estimate.size(); ++i)
        std::cout << "marginal[" << i << "] = " << rep.marginal_estimate[i] << " +/- "
                  << rep.marginal_halfwidth99 << " (99%)\n";
    std::cout << "expected_score = " << rep.expected_score_estimate << " +/- "
              << rep.score_halfwidth99 << " (99%)\n";
}

std::int64_t ms_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 start)
        .count();
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

int cmd_run(const std::string& instance_path, const MechanismFlags& flags, const std::string& mode,
            std::uint64_t trials, std::uint64_t seed, const std::string& report_path) {
    Instance inst = parse_instance(read_file(instance_path));
    Mechanism mech = mechanism_from_flags(flags, &inst, std::cerr);

    if (mode == "mc") {
        print_estimate(monte_carlo(inst, mech, trials, seed, thread_count_from_env()));
        return kExitPass;
    }
    if (mode != "exact") throw contract_error("unknown mode '" + mode + "' (expected exact|mc)");

    auto start = std::chrono::steady_clock::now();
    SelectionDistribution dist = exact_distribution(inst, mech);
    print_distribution(dist);

    if (!report_path.empty()) {
        RatioReport rr = ratio(inst, mech, guarantee_bound(inst, mech), instance_path);
        write_file(report_path,
                   write_report_csv({report_row(rr, mechanism_class_name(mech), ms_since(start))}));
    }
    return kExitPass;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

std::vector<BatteryEntry> entries_for_verify(const std::string& instance_path,
                                             const MechanismFlags& flags, int random_count,
                                             std::uint64_t seed) {
    if (!instance_path.empty()) {
        Instance inst = parse_instance(read_file(instance_path));
        Mechanism mech = mechanism_from_flags(flags, &inst, std::cerr);
        return {{instance_path, std::move(inst), mech}};
    }
    Mechanism proto = mechanism_from_flags(flags, nullptr, std::cerr);
    return guarantee_battery(proto.kind, proto.d, random_count, seed);
}

int cmd_verify(const std::string& instance_path, const std::string& suite,
               const MechanismFlags& flags, const std::string& dist_path, int random_count,
               std::uint64_t seed, std::uint64_t trials, const std::string& report_path) {
    if (suite == "lemmas") {
        bool all = true;
        for (const LemmaCheckResult& r : run_lemma_suite(seed)) {
            std::cout << (r.pass ? "pass" : "FAIL") << "  " << r.name << "\n";
            all = all && r.pass;
        }
        return all ? kExitPass : kExitVerifyFailure;
    }

    std::vector<BatteryEntry> entries = entries_for_verify(instance_path, flags, random_count, seed);
    bool all = true;
    std::vector<ReportRow> rows;

    for (const BatteryEntry& entry : entries) {
        auto start = std::chrono::steady_clock::now();
        bool enumerable = true;
        if (entry.mechanism.kind == Mechanism::Kind::partition ||
            entry.mechanism.kind == Mechanism::Kind::vertex_partition) {
            RandomnessSpec spec = randomness_spec(entry.instance, entry.mechanism);
            enumerable = spec.cardinality <= (entry.mechanism.kind == Mechanism::Kind::partition
                                                  ? kBipartitionBudget
                                                  : kPermutationBudget);
        }

        if (suite == "feasibility") {
            if (!enumerable) {
                // Sampling sanity pass over the realizations.
                for (std::uint64_t t = 0; t < trials; ++t) {
                    AgentSubset s = sample_once(entry.instance, entry.mechanism, seed, t);
                    if (!entry.instance.system.is_independent(s)) {
                        std::cout << "FAIL " << entry.id << ": dependent realization " << s.str()
                                  << "\n";
                        all = false;
                        break;
                    }
                }
                continue;
            }
            FeasibilityReport rep = check_feasibility(entry.instance, entry.mechanism);
            if (!rep.pass) {
                std::cout << "FAIL " << entry.id << ": dependent support set " << rep.witness->str()
                          << "\n";
                all = false;
            }
        } else if (suite == "impartiality") {
            if (!enumerable) {
                std::cout << "skip " << entry.id
                          << ": exact enumeration infeasible for the impartiality check; rerun the "
                             "mechanism via monte_carlo for estimates\n";
                continue;
            }
            for (AgentId i = 0; i < entry.instance.ground_size(); ++i) {
                DeviationPlan plan = standard_deviation_plan(entry.instance, entry.mechanism, i, seed);
                ImpartialityReport rep = check_impartiality(entry.instance, entry.mechanism, plan);
                if (!rep.pass) {
                    std::cout << "FAIL " << entry.id << ": agent " << rep.agent << " row "
                              << rep.witness_row << " moved marginal " << rep.base_marginal.str()
                              << " -> " << rep.deviant_marginal.str() << "\n";
                    all = false;
                }
            }
        } else if (suite == "rank_marginals") {
            if (dist_path.empty() && (!enumerable || entry.instance.ground_size() > 12)) {
                if (!instance_path.empty())
                    std::cout << "skip " << entry.id
                              << ": exact enumeration infeasible for the rank check\n";
                continue;
            }
            SelectionDistribution dist =
                dist_path.empty()
                    ? exact_distribution(entry.instance, entry.mechanism)
                    : parse_distribution(read_file(dist_path), entry.instance.ground_size());
            RankMarginalsReport rep = check_rank_marginals(entry.instance, dist);
            if (!rep.pass) {
                std::cout << "FAIL " << entry.id << ": mass " << rep.mass.str() << " on set "
                          << rep.witness->str() << " exceeds rank " << rep.rank << "\n";
                all = false;
            }
        } else if (suite == "bounds") {
            if (!enumerable) continue;
            // Generated batteries skip zero-optimum instances (the ratio is
            // undefined there); a user-supplied file surfaces the error.
            if (instance_path.empty() && opt_score(entry.instance).is_zero()) continue;
            RatioReport rr = ratio(entry.instance, entry.mechanism,
                                   guarantee_bound(entry.instance, entry.mechanism), entry.id);
            rows.push_back(
                report_row(rr, mechanism_class_name(entry.mechanism), ms_since(start)));
            if (!rr.pass) {
                std::cout << "FAIL " << entry.id << ": ratio " << rr.ratio.str() << " below bound "
                          << rr.bound.str() << "\n";
                all = false;
            }
        } else {
            throw contract_error("unknown suite '" + suite +
                                 "' (expected feasibility|impartiality|rank_marginals|bounds|lemmas)");
        }
    }

    if (!report_path.empty() && !rows.empty()) write_file(report_path, write_report_csv(rows));
    std::cout << (all ? "all checks passed" : "checks FAILED") << "\n";
    return all ? kExitPass : kExitVerifyFailure;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

IndependenceSystem system_for_family(const std::string& kind, int m, int k) {
    if (kind == "uniform") return IndependenceSystem(m, UniformMatroid{k});
    if (kind == "knapsack") {
        std::vector<Rational> sizes(static_cast<std::size_t>(m), Rational(1));
        return IndependenceSystem(m, KnapsackSystem{std::move(sizes), Rational(k)});
    }
    if (kind == "graphic") {
        // Triangle plus pendant edges: girth 3 on any ground size >= 3.
        if (m < 3) throw contract_error("graphic family needs m >= 3");
        std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}, {0, 2}};
        for (int e = 3; e < m; ++e) edges.push_back({0, e});
        return IndependenceSystem(m, GraphicMatroid{m, std::move(edges), true});
    }
    throw contract_error("unknown system kind '" + kind + "' (expected uniform|knapsack|graphic)");
}

int cmd_gen(const std::string& family, const std::string& kind, int m, int k, int n, int d,
            bool binary, std::uint64_t seed, const std::string& variant, const std::string& eps,
            const std::string& out_path) {
    std::string text;
    if (family == "cycle") {
        text = write_instance(gen_cycle_girth(system_for_family(kind, m, k)).instance);
    } else if (family == "star") {
        StarConstruction s = gen_star_dependent(system_for_family(kind, m, k));
        if (variant == "base")
            text = write_instance(s.base);
        else if (variant == "augmented")
            text = write_instance(s.augmented);
        else
            throw contract_error("star variant must be base|augmented");
    } else if (family == "fig4a") {
        text = write_instance(gen_fig4('a').instance);
    } else if (family == "fig4b") {
        text = write_instance(gen_fig4('b').instance);
    } else if (family == "unit_density") {
        text = write_instance(gen_unit_density(eps.empty() ? Rational(1, 100) : Rational::parse(eps)).instance);
    } else if (family == "wheel") {
        text = write_instance(gen_wheel(n).instance);
    } else if (family == "random") {
        SystemKind sk = kind == "uniform"     ? SystemKind::uniform
                        : kind == "partition" ? SystemKind::partition
                        : kind == "graphic"   ? SystemKind::graphic
                        : kind == "knapsack"  ? SystemKind::knapsack
                        : kind == "explicit"  ? SystemKind::explicit_list
                                              : throw contract_error("unknown kind '" + kind + "'");
        text = write_instance(gen_random(sk, m, d, binary, seed).instance);
    } else {
        throw contract_error("unknown family '" + family +
                             "' (expected cycle|star|fig4a|fig4b|unit_density|wheel|random)");
    }
    write_file(out_path, text);
    std::cout << "wrote " << out_path << "\n";
    return kExitPass;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

int cmd_bench(const std::string& matrix_path, int random_count, std::uint64_t seed,
              const std::string& report_path) {
    struct MatrixRow {
        Mechanism::Kind kind;
        int d = 1;
    };
    std::vector<MatrixRow> matrix;
    if (matrix_path.empty()) {
        matrix = {{Mechanism::Kind::partition, 1},
                  {Mechanism::Kind::kpr, 1},
                  {Mechanism::Kind::dkpr, 1},
                  {Mechanism::Kind::mpr, 1},
                  {Mechanism::Kind::vertex_partition, 1}};
    } else {
        json j = json::parse(read_file(matrix_path));
        for (const json& row : j.at("rows")) {
            std::string name = row.at("mechanism").get<std::string>();
            MatrixRow mr;
            mr.d = row.value("d", 1);
            if (name == "partition") mr.kind = Mechanism::Kind::partition;
            else if (name == "kpr") mr.kind = Mechanism::Kind::kpr;
            else if (name == "dkpr") mr.kind = Mechanism::Kind::dkpr;
            else if (name == "mpr") mr.kind = Mechanism::Kind::mpr;
            else if (name == "vertex_partition") mr.kind = Mechanism::Kind::vertex_partition;
            else throw contract_error("matrix row with unknown mechanism '" + name + "'");
            matrix.push_back(mr);
        }
    }

    std::vector<ReportRow> rows;
    bool all = true;
    for (const MatrixRow& mr : matrix) {
        auto start = std::chrono::steady_clock::now();
        std::optional<RatioReport> worst;
        std::string cls;
        for (const BatteryEntry& entry : guarantee_battery(mr.kind, mr.d, random_count, seed)) {
            cls = mechanism_class_name(entry.mechanism);
            if (entry.mechanism.kind == Mechanism::Kind::vertex_partition &&
                randomness_spec(entry.instance, entry.mechanism).cardinality > kPermutationBudget)
                continue;
            if (opt_score(entry.instance).is_zero()) continue;
            RatioReport rr = ratio(entry.instance, entry.mechanism,
                                   guarantee_bound(entry.instance, entry.mechanism), entry.id);
            if (!worst || rr.ratio - rr.bound < worst->ratio - worst->bound) worst = rr;
        }
        if (!worst) continue;
        rows.push_back(report_row(*worst, cls, ms_since(start)));
        all = all && worst->pass;
        std::cout << worst->mechanism << ": worst ratio " << worst->ratio.str() << " vs bound "
                  << worst->bound.str() << " on " << worst->instance_id
                  << (worst->pass ? " (pass)" : " (FAIL)") << "\n";
    }
    if (!report_path.empty()) write_file(report_path, write_report_csv(rows));
    return all ? kExitPass : kExitVerifyFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"impartial selection mechanisms under combinatorial constraints"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run a mechanism on an instance file");
    std::string run_instance, run_mode = "exact", run_report;
    MechanismFlags run_flags;
    std::uint64_t run_trials = 100000, run_seed = 1;
    run->add_option("instance", run_instance, "instance JSON file")->required();
    run->add_option("--mechanism", run_flags.name, "partition|kpr|dkpr|mpr|vertex_partition")->required();
    run->add_option("--mode", run_mode, "exact|mc (default exact)");
    run->add_option("--trials", run_trials, "Monte Carlo trials (mc mode)");
    run->add_option("--seed", run_seed, "Monte Carlo seed");
    run->add_option("--d", run_flags.d, "sparsity parameter for kpr/dkpr");
    run->add_option("--smax", run_flags.smax, "size cap for dkpr, as num/den");
    run->add_flag("--permissive", run_flags.permissive, "vertex_partition on non-binary scores");
    run->add_option("-o,--report", run_report, "write a one-row CSV ratio report");

    // verify
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    std::string verify_instance, verify_suite, verify_dist, verify_report;
    MechanismFlags verify_flags;
    int verify_randoms = 50;
    std::uint64_t verify_seed = 1000, verify_trials = 2000;
    verify->add_option("instance", verify_instance, "instance JSON file (default: generated battery)");
    verify->add_option("--suite", verify_suite, "feasibility|impartiality|rank_marginals|bounds|lemmas")
        ->required();
    verify->add_option("--mechanism", verify_flags.name, "mechanism under test");
    verify->add_option("--d", verify_flags.d, "sparsity parameter");
    verify->add_option("--smax", verify_flags.smax, "size cap for dkpr");
    verify->add_flag("--permissive", verify_flags.permissive, "vertex_partition on non-binary scores");
    verify->add_option("--dist", verify_dist, "distribution JSON for rank_marginals");
    verify->add_option("--randoms", verify_randoms, "random instances per battery (default 50)");
    verify->add_option("--seed", verify_seed, "battery seed");
    verify->add_option("--trials", verify_trials, "sampling trials for out-of-budget instances");
    verify->add_option("-o,--report", verify_report, "write CSV report (bounds suite)");

    // gen
    auto* gen = app.add_subcommand("gen", "generate an instance file");
    std::string gen_family, gen_kind = "uniform", gen_variant = "base", gen_eps, gen_out;
    int gen_m = 4, gen_k = 2, gen_n = 4, gen_d = 1;
    bool gen_binary = false;
    std::uint64_t gen_seed = 1;
    gen->add_option("--family", gen_family, "cycle|star|fig4a|fig4b|unit_density|wheel|random")->required();
    gen->add_option("--kind", gen_kind, "system kind (cycle/star/random families)");
    gen->add_option("--m", gen_m, "ground size");
    gen->add_option("--k", gen_k, "uniform rank / knapsack capacity for cycle/star");
    gen->add_option("--n", gen_n, "vertex count (wheel family)");
    gen->add_option("--d", gen_d, "row sparsity (random family)");
    gen->add_flag("--binary", gen_binary, "binary scores (random family)");
    gen->add_option("--seed", gen_seed, "random family seed");
    gen->add_option("--variant", gen_variant, "base|augmented (star family)");
    gen->add_option("--eps", gen_eps, "epsilon for unit_density, as num/den");
    gen->add_option("-o,--out", gen_out, "output path")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "worst-case ratio grid over the guarantee batteries");
    std::string bench_matrix, bench_report;
    int bench_randoms = 25;
    std::uint64_t bench_seed = 1000;
    bench->add_option("--matrix", bench_matrix, "matrix config JSON (default: standard grid)");
    bench->add_option("--randoms", bench_randoms, "random instances per battery");
    bench->add_option("--seed", bench_seed, "battery seed");
    bench->add_option("-o,--report", bench_report, "output CSV path");

    try {
        app.parse(argc, argv);
        if (run->parsed())
            return cmd_run(run_instance, run_flags, run_mode, run_trials, run_seed, run_report);
        if (verify->parsed())
            return cmd_verify(verify_instance, verify_suite, verify_flags, verify_dist,
                              verify_randoms, verify_seed, verify_trials, verify_report);
        if (gen->parsed())
            return cmd_gen(gen_family, gen_kind, gen_m, gen_k, gen_n, gen_d, gen_binary, gen_seed,
                           gen_variant, gen_eps, gen_out);
        if (bench->parsed()) return cmd_bench(bench_matrix, bench_randoms, bench_seed, bench_report);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    } catch (const contract_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const budget_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitUsage;
    }
}
