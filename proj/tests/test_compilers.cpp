#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "blockdd/compilers.hpp"
#include "blockdd/rng.hpp"
#include "support/catalog.hpp"

using namespace blockdd;

namespace {

std::vector<Assignment> all_totals(const std::vector<std::string>& vars, int dsize) {
    std::vector<Assignment> out;
    unsigned long long total = 1;
    for (size_t i = 0; i < vars.size(); ++i) total *= dsize;
    for (unsigned long long m = 0; m < total; ++m) {
        Assignment a;
        unsigned long long v = m;
        for (const auto& x : vars) {
            a[x] = (Value)(v % dsize);
            v /= dsize;
        }
        out.push_back(std::move(a));
    }
    return out;
}

// exhaustive agreement between a compiled diagram and the formula
void check_agreement(const DecisionDiagram& d, const Formula& f) {
    REQUIRE(!validate(d));
    for (const auto& a : all_totals(f.variables, f.domain->size()))
        CHECK(evaluate(d, a) == satisfiable(f, a));
}

Formula chain_formula(DomainPtr dom, int n, const Relation& r, const std::string& prefix = "v") {
    Formula f;
    f.domain = dom;
    for (int i = 0; i < n; ++i) f.variables.push_back(prefix + std::to_string(i));
    for (int i = 0; i + 1 < n; ++i)
        f.constraints.emplace_back(std::vector<std::string>{f.variables[i], f.variables[i + 1]}, r);
    return f;
}

Formula star_formula(DomainPtr dom, int leaves, const Relation& r) {
    Formula f;
    f.domain = dom;
    f.variables.push_back("c");
    for (int i = 0; i < leaves; ++i) {
        std::string l = "l" + std::to_string(i);
        f.variables.push_back(l);
        f.constraints.emplace_back(std::vector<std::string>{l, "c"}, r);
    }
    return f;
}

// random instance over the Boolean language {=, !=}
Formula random_eq_neq(SplitMix64& rng, int n) {
    Formula f;
    f.domain = catalog::dom2();
    for (int i = 0; i < n; ++i) f.variables.push_back("v" + std::to_string(i));
    int m = 1 + (int)rng.below((uint64_t)n);
    for (int c = 0; c < m; ++c) {
        int i = (int)rng.below((uint64_t)n);
        int j = (int)rng.below((uint64_t)n);
        if (i == j) continue;
        f.constraints.emplace_back(std::vector<std::string>{f.variables[i], f.variables[j]},
                                   rng.below(2) ? catalog::eq2() : catalog::neq2());
    }
    return f;
}

}  // namespace

TEST_CASE("find_uniform_split on the worked example") {
    Constraint c({"x", "y", "u", "v"}, catalog::sepR1());
    UniformSplit sp = find_uniform_split(c, "x", "y");
    CHECK(sp.v_side == std::vector<std::string>{"u"});
    CHECK(sp.w_side == std::vector<std::string>{"v"});

    // binary pivot: both sides empty
    Constraint bin({"x", "y"}, catalog::eq2());
    UniformSplit sb = find_uniform_split(bin, "x", "y");
    CHECK(sb.v_side.empty());
    CHECK(sb.w_side.empty());
}

TEST_CASE("find_uniform_split separates an equality chain") {
    Formula f = chain_formula(catalog::dom2(), 3, catalog::eq2());
    UniformSplit sp = find_uniform_split(f, "v0", "v2");
    // the middle variable lands on one side; identity is verified internally
    CHECK(sp.v_side.size() + sp.w_side.size() == 1);
    std::vector<std::string> mid =
        sp.v_side.empty() ? sp.w_side : sp.v_side;
    CHECK(mid == std::vector<std::string>{"v1"});
}

TEST_CASE("find_uniform_split fails on non-decomposable pivots") {
    Constraint parity = relation_constraint(catalog::xor3());
    CHECK_THROWS_AS(find_uniform_split(parity, "x1", "x2"), SplitFailedError);
    // disequality over a 3-element domain: selection matrix not proper
    Relation neq3(2, {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}});
    Formula star = star_formula(catalog::dom3(), 2, neq3);
    CHECK_THROWS_AS(tree_structure(star), SplitFailedError);
}

TEST_CASE("tree_structure") {
    {
        Formula f = catalog::singleton(catalog::dom2(), {"x", "y"}, catalog::eq2(), {"x", "y"});
        StructureTree t = tree_structure(f);
        REQUIRE(t.edges.size() == 1);
        CHECK(t.edge("x", "y").rel == catalog::eq2());
    }
    {
        // equality path on 5 variables: spanning tree, oracle equivalence
        Formula f = chain_formula(catalog::dom2(), 5, catalog::eq2());
        StructureTree t = tree_structure(f);
        CHECK(t.edges.size() == 4);
        Formula ft;
        ft.domain = f.domain;
        ft.variables = f.variables;
        for (const auto& e : t.edges)
            ft.constraints.emplace_back(std::vector<std::string>{e.p, e.q}, e.rel);
        for (const auto& a : all_totals(f.variables, 2))
            CHECK(satisfiable(f, a) == satisfiable(ft, a));
    }
    {
        // chain over the uniformly decomposable binary member R'
        Formula f = chain_formula(catalog::dom4(), 4, catalog::rPrime());
        StructureTree t = tree_structure(f);
        CHECK(t.edges.size() == 3);
        Formula ft;
        ft.domain = f.domain;
        ft.variables = f.variables;
        for (const auto& e : t.edges)
            ft.constraints.emplace_back(std::vector<std::string>{e.p, e.q}, e.rel);
        for (const auto& a : all_totals(f.variables, 4))
            CHECK(satisfiable(f, a) == satisfiable(ft, a));
    }
    CHECK(tree_to_dot(tree_structure(chain_formula(catalog::dom2(), 2, catalog::eq2()))) ==
          "graph structure {\n"
          "  \"v0\";\n"
          "  \"v1\";\n"
          "  \"v0\" -- \"v1\" [label=\"00 11\"];\n"
          "}\n");
}

TEST_CASE("compile_odd on an equality chain") {
    Formula f = chain_formula(catalog::dom2(), 8, catalog::eq2());
    DecisionDiagram d = compile_odd(f);
    CHECK(d.nodes.size() <= 64);  // n |D|^(log2 n) = 8 * 2^3
    CHECK(count_models(d, 8) == 2);
    check_agreement(d, f);
}

TEST_CASE("compile_odd on stars") {
    // Boolean disequality star
    Formula f = star_formula(catalog::dom2(), 5, catalog::neq2());
    check_agreement(compile_odd(f), f);
    // equality star over a 3-element domain, all 3^6 assignments
    Formula g = star_formula(catalog::dom3(), 5, Relation::equality(3));
    DecisionDiagram d = compile_odd(g);
    CHECK(count_models(d, 6) == 3);
    check_agreement(d, g);
}

TEST_CASE("compile_odd on random equality/disequality instances") {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 2 + (int)rng.below(11);  // up to 12 variables
        Formula f = random_eq_neq(rng, n);
        DecisionDiagram d = compile_odd(f);
        double bound = (double)n * std::pow(2.0, std::log2((double)n));
        CHECK((double)d.nodes.size() <= bound + 1e-9);
        check_agreement(d, f);
    }
}

TEST_CASE("compile_odd order depends only on the tree") {
    Formula f = chain_formula(catalog::dom2(), 6, catalog::eq2());
    DecisionDiagram d1 = compile_odd(f);
    // solution-equivalent formula with a duplicated constraint
    Formula g = f;
    g.constraints.push_back(g.constraints[0]);
    DecisionDiagram d2 = compile_odd(g);
    CHECK(d1.order == d2.order);
    CHECK(compile_odd(f).order == d1.order);
}

TEST_CASE("compile_odd of a single unary constraint") {
    Formula f = catalog::singleton(catalog::dom2(), {"x"}, catalog::u1(), {"x"});
    DecisionDiagram d = compile_odd(f);
    CHECK(d.nodes.size() == 1);
    CHECK(evaluate(d, {{"x", 1}}));
    CHECK(!evaluate(d, {{"x", 0}}));
}

TEST_CASE("compile_fdd on instances over the separating language") {
    // single constraint
    Formula one = catalog::singleton(catalog::dom4(), {"x", "y", "u", "v"}, catalog::sepR(),
                                     {"x", "y", "u", "v"});
    DecisionDiagram d1 = compile_fdd(one);
    CHECK((double)d1.nodes.size() <= 2.0 * 4.0 * std::pow(4.0, 9.0));
    check_agreement(d1, one);

    // two disjoint copies
    Formula grid;
    grid.domain = catalog::dom4();
    grid.variables = {"x1", "y1", "u1", "v1", "x2", "y2", "u2", "v2"};
    grid.constraints.emplace_back(std::vector<std::string>{"x1", "y1", "u1", "v1"}, catalog::sepR());
    grid.constraints.emplace_back(std::vector<std::string>{"x2", "y2", "u2", "v2"}, catalog::sepR());
    check_agreement(compile_fdd(grid), grid);

    // chain sharing a variable
    Formula chain;
    chain.domain = catalog::dom4();
    chain.variables = {"x1", "y1", "u1", "v1", "y2", "u2", "v2"};
    chain.constraints.emplace_back(std::vector<std::string>{"x1", "y1", "u1", "v1"},
                                   catalog::sepR());
    chain.constraints.emplace_back(std::vector<std::string>{"v1", "y2", "u2", "v2"},
                                   catalog::sepR());
    check_agreement(compile_fdd(chain), chain);
}

TEST_CASE("compile_fdd of a fully decomposable formula is a linear splice") {
    Formula f;
    f.domain = catalog::dom2();
    f.variables = {"a", "b", "c", "d", "e", "g"};
    f.constraints.emplace_back(std::vector<std::string>{"a", "b"}, catalog::eq2());
    f.constraints.emplace_back(std::vector<std::string>{"c", "d"}, catalog::eq2());
    f.constraints.emplace_back(std::vector<std::string>{"e", "g"}, catalog::eq2());
    DecisionDiagram d = compile_fdd(f);
    check_agreement(d, f);
    CHECK(count_models(d, 6) == 8);
}

TEST_CASE("compile_fdd of a single unary constraint") {
    Formula f = catalog::singleton(catalog::dom2(), {"x"}, catalog::u1(), {"x"});
    DecisionDiagram d = compile_fdd(f);
    CHECK(d.nodes.size() == 1);
    check_agreement(d, f);
}

TEST_CASE("compile_fdd raises MISCLASSIFIED on an unsuitable language") {
    // implication: the branching step excludes no value of y after fixing x
    Formula f = catalog::singleton(catalog::dom2(), {"x", "y"}, catalog::impl2(), {"x", "y"});
    CHECK_THROWS_AS(compile_fdd(f), MisclassifiedError);
}

TEST_CASE("compile_fdd also covers uniformly decomposable inputs") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        Formula f = random_eq_neq(rng, 2 + (int)rng.below(6));
        check_agreement(compile_fdd(f), f);
    }
}

TEST_CASE("compile_obdd_baseline on an equality chain") {
    Formula f = chain_formula(catalog::dom2(), 10, catalog::eq2());
    DecisionDiagram d = compile_obdd_baseline(f, f.variables);
    CHECK(d.nodes.size() <= 2 * 10 + 2);
    CHECK(count_models(d, 10) == 2);
    check_agreement(d, f);
}

TEST_CASE("compile_obdd_baseline on a parity chain") {
    Formula f;
    f.domain = catalog::dom2();
    for (int i = 0; i < 9; ++i) f.variables.push_back("v" + std::to_string(i));
    for (int i = 0; i + 2 < 9; i += 2)
        f.constraints.emplace_back(
            std::vector<std::string>{f.variables[i], f.variables[i + 1], f.variables[i + 2]},
            catalog::xor3());
    DecisionDiagram d = compile_obdd_baseline(f, f.variables);
    CHECK(d.nodes.size() <= 2 * 9 + 2);
    check_agreement(d, f);
}

TEST_CASE("compile_obdd_baseline on random formulas") {
    SplitMix64 rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        int dsize = 2 + (int)rng.below(2);
        int n = 2 + (int)rng.below(5);
        Formula f;
        std::vector<std::string> syms;
        for (int v = 0; v < dsize; ++v) syms.push_back(std::to_string(v));
        f.domain = Domain::make(syms);
        for (int i = 0; i < n; ++i) f.variables.push_back("v" + std::to_string(i));
        int m = 1 + (int)rng.below(3);
        for (int c = 0; c < m; ++c) {
            int arity = 1 + (int)rng.below(3);
            std::vector<std::string> scope;
            for (int k = 0; k < arity; ++k)
                scope.push_back(f.variables[rng.below((uint64_t)n)]);
            std::vector<Tuple> tuples;
            int cells = 1;
            for (int k = 0; k < arity; ++k) cells *= dsize;
            for (int idx = 0; idx < cells; ++idx) {
                if (rng.below(3) == 0) continue;
                Tuple t;
                int v = idx;
                for (int k = 0; k < arity; ++k) {
                    t.push_back(v % dsize);
                    v /= dsize;
                }
                tuples.push_back(std::move(t));
            }
            f.constraints.emplace_back(scope, Relation(arity, std::move(tuples)));
        }
        DecisionDiagram d = compile_obdd_baseline(f, f.variables);
        check_agreement(d, f);
    }
    Formula f = chain_formula(catalog::dom2(), 3, catalog::eq2());
    CHECK_THROWS(compile_obdd_baseline(f, {"v0", "v1"}));
}

TEST_CASE("compile_obdd_baseline on an unsatisfiable formula") {
    Formula f;
    f.domain = catalog::dom2();
    f.variables = {"x", "y"};
    f.constraints.emplace_back(std::vector<std::string>{"x", "y"}, catalog::eq2());
    f.constraints.emplace_back(std::vector<std::string>{"x", "y"}, catalog::neq2());
    DecisionDiagram d = compile_obdd_baseline(f, f.variables);
    CHECK(count_models(d, 2) == 0);
    check_agreement(d, f);
}
