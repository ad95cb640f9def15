#include "blockdd/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "blockdd/coclone.hpp"
#include "blockdd/compilers.hpp"
#include "blockdd/core.hpp"
#include "blockdd/diagrams.hpp"
#include "blockdd/dnnf.hpp"
#include "blockdd/hardgen.hpp"
#include "blockdd/rng.hpp"

namespace blockdd {

const char* kToolVersion = "blockdd 1.0";

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string content_hash(const std::string& s) {
    std::ostringstream out;
    out << std::hex << fnv1a64(s.data(), s.size());
    return out.str();
}

Language language_of(const Formula& f) {
    Language g;
    g.domain = f.domain;
    for (const auto& c : f.constraints) {
        bool seen = false;
        for (const auto& r : g.relations)
            if (r == c.rel) {
                seen = true;
                break;
            }
        if (!seen) g.add("R" + std::to_string(g.size()), c.rel);
    }
    return g;
}

bool satisfies(const Formula& f, const Assignment& a) {
    for (const auto& c : f.constraints) {
        Tuple t;
        for (const auto& v : c.scope) t.push_back(a.at(v));
        if (!c.rel.contains(t)) return false;
    }
    return true;
}

// Full oracle sweep when |D|^n fits, otherwise seeded sampling.
struct OracleCheck {
    bool pass = true;
    bool sampled = false;
    unsigned long long checked = 0;
    Assignment counterexample;
};

OracleCheck oracle_check(const Formula& f, const std::function<bool(const Assignment&)>& eval,
                         uint64_t seed, double fullLimit = 1e6, unsigned long long samples = 10000) {
    OracleCheck oc;
    const int n = (int)f.variables.size();
    const int dsz = f.domain->size();
    auto tryOne = [&](const Assignment& a) {
        ++oc.checked;
        if (eval(a) != satisfies(f, a)) {
            oc.pass = false;
            oc.counterexample = a;
            return false;
        }
        return true;
    };
    if (std::pow((double)dsz, n) <= fullLimit) {
        std::vector<Value> vals(n, 0);
        while (true) {
            Assignment a;
            for (int i = 0; i < n; ++i) a[f.variables[i]] = vals[i];
            if (!tryOne(a)) return oc;
            int i = n - 1;
            while (i >= 0 && vals[i] == dsz - 1) vals[i--] = 0;
            if (i < 0) break;
            ++vals[i];
        }
        return oc;
    }
    oc.sampled = true;
    SplitMix64 rng(seed);
    for (unsigned long long t = 0; t < samples; ++t) {
        Assignment a;
        for (int i = 0; i < n; ++i) a[f.variables[i]] = (Value)rng.below((uint64_t)dsz);
        if (!tryOne(a)) return oc;
    }
    return oc;
}

json assignment_json(const Formula& f, const Assignment& a) {
    json j;
    for (const auto& [v, val] : a) j[v] = f.domain->name(val);
    return j;
}

void render_text(std::ostream& out, const std::string& prefix, const json& j) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            render_text(out, prefix.empty() ? k : prefix + "." + k, v);
    } else if (j.is_string()) {
        out << prefix << ": " << j.get<std::string>() << "\n";
    } else {
        out << prefix << ": " << j.dump() << "\n";
    }
}

struct ReportBuilder {
    json rep;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    ReportBuilder(const std::string& command, uint64_t seed) {
        rep["command"] = command;
        rep["version"] = kToolVersion;
        rep["seed"] = seed;
        rep["inputs"] = json::object();
        rep["result"] = json::object();
    }
    void input(const std::string& path, const std::string& content) {
        rep["inputs"][path] = content_hash(content);
    }
    json& result() { return rep["result"]; }
    std::string render(bool asJson) {
        rep["timings"]["total_millis"] =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        if (asJson) return rep.dump(2) + "\n";
        std::ostringstream out;
        render_text(out, "", rep);
        return out.str();
    }
};

int verdict_exit(Verdict v) { return (int)v; }

}  // namespace

CliResult run_command(const std::vector<std::string>& args) {
    CLI::App app{"block-structure analyzer and diagram compiler"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    uint64_t seed = 0;
    bool asJson = false;
    long long budgetCapture = (long long)kCaptureBudget;
    long long budgetMembership = MembershipBudget{}.max_indicator_vars;
    app.add_option("--seed", seed, "PRNG seed (default 0, never entropy)");
    app.add_flag("--json", asJson, "machine-readable report");
    app.add_option("--budget-capture", budgetCapture, "DNNF capture budget");
    app.add_option("--budget-membership", budgetMembership, "membership indicator budget");

    std::string langFile, instFile, circFile, format = "odd", outFile, relFile;
    bool force = false, noVerify = false, emitTree = false;
    int genN = 4, genR = 18, xPos = 0, yPos = 1;
    long long enumLimit = 0;
    std::vector<int> benchNs;

    CLI::App* analyze = app.add_subcommand("analyze", "classify a constraint language");
    analyze->add_option("language", langFile)->required();

    CLI::App* compile = app.add_subcommand("compile", "compile an instance to a diagram");
    compile->add_option("instance", instFile)->required();
    compile->add_option("--format", format)->check(CLI::IsMember({"odd", "fdd", "dnnf"}));
    compile->add_option("--out", outFile);
    compile->add_flag("--force", force, "run the baseline OBDD compiler regardless of class");
    compile->add_flag("--no-verify", noVerify);
    compile->add_flag("--emit-tree", emitTree, "include the structure tree as DOT");

    CLI::App* verify = app.add_subcommand("verify", "check a diagram/circuit against the oracle");
    verify->add_option("instance", instFile)->required();
    verify->add_option("circuit", circFile)->required();

    CLI::App* count = app.add_subcommand("count", "count solutions by brute force");
    count->add_option("instance", instFile)->required();

    CLI::App* enumc = app.add_subcommand("enum", "enumerate solutions by brute force");
    enumc->add_option("instance", instFile)->required();
    enumc->add_option("--limit", enumLimit, "cap on emitted solutions (0 = all)");

    CLI::App* bench = app.add_subcommand("bench", "growth benchmark, hard vs tractable");
    bench->add_option("--ns", benchNs, "graph sizes")->required();

    CLI::App* genHard = app.add_subcommand("gen-hard", "emit a matching-union hard instance");
    genHard->add_option("--relation", relFile)->required();
    genHard->add_option("--n", genN)->required();
    genHard->add_option("--r", genR);
    genHard->add_option("--x-pos", xPos);
    genHard->add_option("--y-pos", yPos);
    genHard->add_option("--out", outFile);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        std::ostringstream out;
        int code = app.exit(e, out, out);
        return {code, out.str()};
    }

    try {
        if (*analyze) {
            ReportBuilder rb("analyze", seed);
            std::string text = read_file(langFile);
            rb.input(langFile, text);
            Language g = parse_language(text);
            Pi2Budget budget;
            budget.membership.max_indicator_vars = budgetMembership;
            LanguageClass lc = classify_language(g, budget);
            rb.result()["verdict"] = verdict_name(lc.verdict);
            if (!lc.pi2_certified) rb.result()["pi2_certified"] = false;
            if (lc.verdict == Verdict::HARD) rb.result()["hard_definition"] = lc.hard_definition;
            if (lc.failing_triple)
                rb.result()["failing_pivots"] = {lc.failing_triple->pivot1,
                                                 lc.failing_triple->pivot2};
            if (!lc.note.empty()) rb.result()["note"] = lc.note;
            return {verdict_exit(lc.verdict), rb.render(asJson)};
        }

        if (*compile) {
            ReportBuilder rb("compile", seed);
            std::string text = read_file(instFile);
            rb.input(instFile, text);
            Formula f = parse_instance(text);
            LanguageClass lc = classify_language(language_of(f));
            rb.result()["verdict"] = verdict_name(lc.verdict);
            rb.result()["format"] = force ? "obdd-baseline" : format;

            bool allowed = force || (format == "odd" ? lc.verdict == Verdict::UNIFORM_ODD
                                                     : lc.verdict == Verdict::UNIFORM_ODD ||
                                                           lc.verdict == Verdict::NONUNIFORM_FDD);
            if (!allowed) {
                rb.result()["refused"] = true;
                if (lc.verdict == Verdict::HARD)
                    rb.result()["hard_definition"] = lc.hard_definition;
                if (lc.failing_triple)
                    rb.result()["failing_pivots"] = {lc.failing_triple->pivot1,
                                                     lc.failing_triple->pivot2};
                return {1, rb.render(asJson)};
            }

            std::string artifact;
            std::function<bool(const Assignment&)> eval;
            if (force) {
                DecisionDiagram d = compile_obdd_baseline(f, f.variables);
                rb.result()["nodes"] = d.size();
                artifact = diagram_to_json(d);
                eval = [d](const Assignment& a) { return evaluate(d, a); };
            } else if (format == "dnnf") {
                DnnfCircuit o = lc.verdict == Verdict::UNIFORM_ODD
                                    ? odd_to_structured_dnnf(compile_odd(f)).first
                                    : fdd_to_dnnf(compile_fdd(f));
                rb.result()["gates"] = o.size();
                rb.result()["structured"] = lc.verdict == Verdict::UNIFORM_ODD;
                artifact = circuit_to_json(o);
                eval = [o](const Assignment& a) { return accepts(o, a); };
            } else {
                DecisionDiagram d = format == "odd" ? compile_odd(f) : compile_fdd(f);
                rb.result()["nodes"] = d.size();
                artifact = diagram_to_json(d);
                eval = [d](const Assignment& a) { return evaluate(d, a); };
            }

            if (!noVerify) {
                OracleCheck oc = oracle_check(f, eval, seed);
                rb.result()["verified"] = oc.sampled ? "sampled" : "full";
                rb.result()["checked"] = oc.checked;
                if (!oc.pass) {
                    rb.result()["verified"] = "FAIL";
                    rb.result()["counterexample"] = assignment_json(f, oc.counterexample);
                    return {2, rb.render(asJson)};
                }
            }
            if (emitTree) rb.result()["tree_dot"] = tree_to_dot(tree_structure(f));
            if (!outFile.empty()) {
                write_file(outFile, artifact);
                rb.result()["out"] = outFile;
                rb.result()["out_hash"] = content_hash(artifact);
            }
            return {0, rb.render(asJson)};
        }

        if (*verify) {
            ReportBuilder rb("verify", seed);
            std::string itext = read_file(instFile), ctext = read_file(circFile);
            rb.input(instFile, itext);
            rb.input(circFile, ctext);
            Formula f = parse_instance(itext);
            std::string kind = json::parse(ctext).value("kind", "");
            std::function<bool(const Assignment&)> eval;
            if (kind == "dnnf") {
                DnnfCircuit o = circuit_from_json(ctext);
                rb.result()["gates"] = o.size();
                try {
                    rb.result()["captured"] = capture(o, (size_t)budgetCapture).size();
                } catch (const std::runtime_error&) {
                    rb.result()["captured"] = "budget exceeded";
                }
                eval = [o](const Assignment& a) { return accepts(o, a); };
            } else {
                DecisionDiagram d = diagram_from_json(ctext);
                rb.result()["nodes"] = d.size();
                eval = [d](const Assignment& a) { return evaluate(d, a); };
            }
            OracleCheck oc = oracle_check(f, eval, seed);
            rb.result()["checked"] = oc.checked;
            rb.result()["status"] = oc.pass ? (oc.sampled ? "PASS(sampled)" : "PASS") : "FAIL";
            if (!oc.pass) rb.result()["counterexample"] = assignment_json(f, oc.counterexample);
            return {oc.pass ? 0 : 1, rb.render(asJson)};
        }

        if (*count) {
            ReportBuilder rb("count", seed);
            std::string text = read_file(instFile);
            rb.input(instFile, text);
            rb.result()["count"] = count_solutions(parse_instance(text));
            return {0, rb.render(asJson)};
        }

        if (*enumc) {
            ReportBuilder rb("enum", seed);
            std::string text = read_file(instFile);
            rb.input(instFile, text);
            Formula f = parse_instance(text);
            std::vector<Assignment> sols = enumerate_solutions(f);
            rb.result()["count"] = sols.size();
            json list = json::array();
            for (const auto& a : sols) {
                if (enumLimit > 0 && (long long)list.size() >= enumLimit) break;
                list.push_back(assignment_json(f, a));
            }
            rb.result()["solutions"] = std::move(list);
            return {0, rb.render(asJson)};
        }

        if (*bench) {
            ReportBuilder rb("bench", seed);
            // hard side: monotone 2-clauses over a matching-union graph,
            // compiled by the baseline; tractable side: equality chains of
            // matching variable count, compiled as ODDs
            DomainPtr dom2 = Domain::make({"0", "1"});
            Relation or2(2, {{0, 1}, {1, 0}, {1, 1}});
            auto hardGen = [&](int n, uint64_t s) {
                return build_hard_formula(random_matching_union(n, 4, s), dom2, or2, 0, 1);
            };
            auto eqGen = [&](int n, uint64_t) {
                Formula f;
                f.domain = dom2;
                for (int i = 0; i < 2 * n; ++i) f.variables.push_back("v" + std::to_string(i));
                for (int i = 0; i + 1 < 2 * n; ++i)
                    f.constraints.emplace_back(
                        std::vector<std::string>{f.variables[i], f.variables[i + 1]},
                        Relation::equality(2));
                return f;
            };
            auto baseline = [](const Formula& f) { return compile_obdd_baseline(f, f.variables); };
            auto odd = [](const Formula& f) { return compile_odd(f); };
            rb.result()["hard_csv"] = bench_csv(growth_bench(hardGen, baseline, benchNs, seed));
            rb.result()["tractable_csv"] = bench_csv(growth_bench(eqGen, odd, benchNs, seed));
            return {0, rb.render(asJson)};
        }

        // gen-hard
        ReportBuilder rb("gen-hard", seed);
        std::string text = read_file(relFile);
        rb.input(relFile, text);
        Language g = parse_language(text);
        if (g.size() == 0) throw std::runtime_error("gen-hard: language has no relation");
        BipartiteGraph graph = random_matching_union(genN, genR, seed);
        Formula f = build_hard_formula(graph, g.domain, g.relations[0], xPos, yPos);
        std::string artifact = serialize_instance(f);
        rb.result()["edges"] = graph.edges.size();
        rb.result()["vars"] = f.variables.size();
        rb.result()["constraints"] = f.constraints.size();
        if (!outFile.empty()) {
            write_file(outFile, artifact);
            rb.result()["out"] = outFile;
        }
        rb.result()["out_hash"] = content_hash(artifact);
        return {0, rb.render(asJson)};
    } catch (const std::exception& e) {
        json err;
        err["command"] = args.empty() ? "" : args[0];
        err["error"] = e.what();
        return {4, asJson ? err.dump(2) + "\n" : "error: " + std::string(e.what()) + "\n"};
    }
}

}  // namespace blockdd
