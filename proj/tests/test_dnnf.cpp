#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "blockdd/dnnf.hpp"
#include "blockdd/rng.hpp"
#include "support/catalog.hpp"

using namespace blockdd;

namespace {

// circuit for the single literal x -> a over the given universe
DnnfCircuit literal_circuit(DomainPtr dom, const std::vector<std::string>& vars,
                            const std::string& x, Value a) {
    DnnfCircuit o;
    o.domain = dom;
    o.variables = vars;
    o.output = o.add_input(x, a);
    return o;
}

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

std::set<Assignment> accepted_set(const DnnfCircuit& o, const std::vector<std::string>& vars) {
    std::set<Assignment> out;
    for (const auto& a : all_totals(vars, o.domain->size()))
        if (accepts(o, a)) out.insert(a);
    return out;
}

// a total assignment extends a partial one
bool extends(const Assignment& total, const Assignment& part) {
    for (const auto& [k, v] : part) {
        auto it = total.find(k);
        if (it == total.end() || it->second != v) return false;
    }
    return true;
}

// Random circuit that is decomposable by construction: AND-splits of the
// variable set, OR of alternatives over the same variable set, and inputs
// that always assign their variable. Every captured assignment is total
// over the sub-circuit's variables.
int random_sub(SplitMix64& rng, DnnfCircuit& o, std::vector<std::string> vars, int depth) {
    int dsize = o.domain->size();
    if (vars.size() == 1) {
        std::vector<int> lits;
        for (Value a = 0; a < dsize; ++a)
            if (rng.below(2)) lits.push_back(o.add_input(vars[0], a));
        if (lits.empty()) lits.push_back(o.add_input(vars[0], (Value)rng.below(dsize)));
        return o.add_or_comb(lits);
    }
    if (depth > 0 && rng.below(3) == 0)
        return o.add_or(random_sub(rng, o, vars, depth - 1), random_sub(rng, o, vars, depth - 1));
    size_t cut = 1 + rng.below(vars.size() - 1);
    std::vector<std::string> left(vars.begin(), vars.begin() + cut);
    std::vector<std::string> right(vars.begin() + cut, vars.end());
    return o.add_and(random_sub(rng, o, left, depth), random_sub(rng, o, right, depth));
}

DnnfCircuit random_circuit(SplitMix64& rng, int n_vars, int dsize) {
    DnnfCircuit o;
    std::vector<std::string> syms;
    for (int v = 0; v < dsize; ++v) syms.push_back(std::to_string(v));
    o.domain = Domain::make(syms);
    for (int i = 0; i < n_vars; ++i) o.variables.push_back("v" + std::to_string(i));
    o.output = random_sub(rng, o, o.variables, 2);
    return o;
}

// chain ODD over {0,1}: x1 = x2 and x3 = x4
DecisionDiagram eq_pairs_odd() {
    DecisionDiagram d;
    d.kind = DecisionDiagram::ODD;
    d.domain = catalog::dom2();
    d.order = {"x1", "x2", "x3", "x4"};
    int x4a = d.add_node("x4", {DecisionDiagram::sink1, DecisionDiagram::sink0});
    int x4b = d.add_node("x4", {DecisionDiagram::sink0, DecisionDiagram::sink1});
    int x3 = d.add_node("x3", {x4a, x4b});
    int x2a = d.add_node("x2", {x3, DecisionDiagram::sink0});
    int x2b = d.add_node("x2", {DecisionDiagram::sink0, x3});
    d.source = d.add_node("x1", {x2a, x2b});
    return d;
}

DecisionDiagram eq_odd() {
    DecisionDiagram d;
    d.kind = DecisionDiagram::ODD;
    d.domain = catalog::dom2();
    d.order = {"x", "y"};
    int y0 = d.add_node("y", {DecisionDiagram::sink1, DecisionDiagram::sink0});
    int y1 = d.add_node("y", {DecisionDiagram::sink0, DecisionDiagram::sink1});
    d.source = d.add_node("x", {y0, y1});
    return d;
}

DecisionDiagram random_odd(SplitMix64& rng, int n_vars, int dsize) {
    DecisionDiagram d;
    d.kind = DecisionDiagram::ODD;
    std::vector<std::string> syms;
    for (int v = 0; v < dsize; ++v) syms.push_back(std::to_string(v));
    d.domain = Domain::make(syms);
    for (int i = 0; i < n_vars; ++i) d.order.push_back("v" + std::to_string(i));
    std::vector<std::vector<int>> byVar(n_vars);
    for (int i = n_vars - 1; i >= 0; --i) {
        int count = (i == 0) ? 1 : 1 + (int)rng.below(2);
        for (int c = 0; c < count; ++c) {
            std::vector<int> edges;
            for (int v = 0; v < dsize; ++v) {
                std::vector<int> cands{DecisionDiagram::sink0, DecisionDiagram::sink1};
                for (int j = i + 1; j < n_vars; ++j)
                    for (int id : byVar[j]) cands.push_back(id);
                edges.push_back(cands[rng.below(cands.size())]);
            }
            byVar[i].push_back(d.add_node(d.order[i], edges));
        }
    }
    d.source = byVar[0][0];
    return d;
}

// total assignments accepted by a rectangle cover over its scope
std::set<Assignment> cover_accepted(const RectangleCover& cover, int dsize) {
    std::set<Assignment> out;
    auto totals = all_totals(cover.scope, dsize);
    for (const auto& r : cover.rectangles)
        for (const auto& x : r.xset)
            for (const auto& y : r.yset) {
                Assignment part = x;
                part.insert(y.begin(), y.end());
                for (const auto& t : totals)
                    if (extends(t, part)) out.insert(t);
            }
    return out;
}

void check_cover(const DnnfCircuit& o, const RectangleCover& cover) {
    CHECK(cover.rectangles.size() <= o.size());
    std::set<std::string> zset(cover.zvars.begin(), cover.zvars.end());
    size_t lower = (size_t)std::ceil(cover.beta / 2.0 * (double)zset.size());
    size_t upper = (size_t)std::floor(cover.beta * (double)zset.size());
    for (const auto& r : cover.rectangles) {
        // complementary sides over the scope
        std::set<std::string> xs(r.xvars.begin(), r.xvars.end());
        std::set<std::string> ys(r.yvars.begin(), r.yvars.end());
        CHECK(xs.size() + ys.size() == cover.scope.size());
        for (const auto& v : xs) CHECK(!ys.count(v));
        // each side assigns only its own variables
        for (const auto& a : r.xset)
            for (const auto& [k, v] : a) CHECK(xs.count(k));
        for (const auto& a : r.yset)
            for (const auto& [k, v] : a) CHECK(ys.count(k));
        // balance
        size_t zc = 0;
        for (const auto& v : xs) zc += zset.count(v);
        CHECK(zc >= lower);
        CHECK(zc <= upper);
    }
    // union over rectangles = the accepted set
    std::set<Assignment> expected;
    for (const auto& t : all_totals(cover.scope, o.domain->size()))
        if (accepts(o, t)) expected.insert(t);
    CHECK(cover_accepted(cover, o.domain->size()) == expected);
}

}  // namespace

TEST_CASE("capture and accepts") {
    auto dom = catalog::dom2();
    DnnfCircuit lit = literal_circuit(dom, {"x", "y"}, "x", 0);
    CHECK(capture(lit) == std::set<Assignment>{{{"x", 0}}});
    // extension semantics: y is free
    CHECK(accepts(lit, {{"x", 0}, {"y", 0}}));
    CHECK(accepts(lit, {{"x", 0}, {"y", 1}}));
    CHECK(!accepts(lit, {{"x", 1}, {"y", 0}}));
    CHECK_THROWS(accepts(lit, {{"x", 0}}));  // y unbound

    DnnfCircuit prod;
    prod.domain = dom;
    prod.variables = {"x", "y"};
    prod.output = prod.add_and(prod.add_input("x", 0), prod.add_input("y", 1));
    CHECK(capture(prod) == std::set<Assignment>{{{"x", 0}, {"y", 1}}});

    DnnfCircuit alt;
    alt.domain = dom;
    alt.variables = {"x"};
    alt.output = alt.add_or(alt.add_input("x", 0), alt.add_input("x", 1));
    CHECK(capture(alt).size() == 2);

    DnnfCircuit eps;
    eps.domain = dom;
    eps.variables = {"x"};
    eps.output = eps.add_epsilon();
    CHECK(capture(eps) == std::set<Assignment>{Assignment{}});
    CHECK(accepts(eps, {{"x", 1}}));

    DnnfCircuit emp;
    emp.domain = dom;
    emp.variables = {"x"};
    emp.output = emp.add_empty();
    CHECK(capture(emp).empty());
    CHECK(!accepts(emp, {{"x", 0}}));
}

TEST_CASE("capture respects the budget") {
    SplitMix64 rng(7);
    DnnfCircuit o = random_circuit(rng, 6, 3);
    CHECK_THROWS_AS((void)capture(o, 1), std::runtime_error);
}

TEST_CASE("accepts agrees with extension of some captured assignment") {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        DnnfCircuit o = random_circuit(rng, 2 + (int)rng.below(4), 2 + (int)rng.below(2));
        auto cap = capture(o);
        for (const auto& t : all_totals(o.variables, o.domain->size())) {
            bool inClosure = false;
            for (const auto& p : cap)
                if (extends(t, p)) inClosure = true;
            CHECK(accepts(o, t) == inClosure);
        }
    }
}

TEST_CASE("check_decomposable") {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 20; ++trial)
        CHECK(!check_decomposable(random_circuit(rng, 2 + (int)rng.below(4), 2)));

    DnnfCircuit bad;
    bad.domain = catalog::dom2();
    bad.variables = {"x"};
    int g = bad.add_and(bad.add_input("x", 0), bad.add_input("x", 1));
    bad.output = g;
    CHECK(check_decomposable(bad) == g);
}

TEST_CASE("eliminate_special_inputs") {
    auto dom = catalog::dom2();
    {
        // OR with an empty branch keeps the other branch
        DnnfCircuit o;
        o.domain = dom;
        o.variables = {"x"};
        o.output = o.add_or(o.add_empty(), o.add_input("x", 0));
        DnnfCircuit e = eliminate_special_inputs(o);
        CHECK(e.size() <= o.size());
        CHECK(capture(e) == std::set<Assignment>{{{"x", 0}}});
        for (const auto& g : e.gates) CHECK(g.kind == DnnfCircuit::INPUT);
    }
    {
        // AND with an epsilon branch keeps the other branch
        DnnfCircuit o;
        o.domain = dom;
        o.variables = {"x"};
        o.output = o.add_and(o.add_input("x", 0), o.add_epsilon());
        DnnfCircuit e = eliminate_special_inputs(o);
        CHECK(e.size() == 1);
        CHECK(e.gates[e.output].kind == DnnfCircuit::INPUT);
    }
    {
        // output collapsing to epsilon -> accept-all marker
        DnnfCircuit o;
        o.domain = dom;
        o.variables = {"x"};
        o.output = o.add_or(o.add_epsilon(), o.add_input("x", 0));
        DnnfCircuit e = eliminate_special_inputs(o);
        CHECK(is_accept_all(e));
        CHECK(accepts(e, {{"x", 1}}));
    }
    {
        // output collapsing to empty -> reject-all marker
        DnnfCircuit o;
        o.domain = dom;
        o.variables = {"x"};
        o.output = o.add_and(o.add_input("x", 0), o.add_empty());
        DnnfCircuit e = eliminate_special_inputs(o);
        CHECK(is_reject_all(e));
        CHECK(!accepts(e, {{"x", 0}}));
    }
}

TEST_CASE("restrict_values matches the selection oracle") {
    SplitMix64 rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        int dsize = 2 + (int)rng.below(2);
        DnnfCircuit o = random_circuit(rng, 2 + (int)rng.below(4), dsize);
        const std::string& x = o.variables[rng.below(o.variables.size())];
        std::vector<Value> allowed;
        for (Value a = 0; a < dsize; ++a)
            if (rng.below(2)) allowed.push_back(a);
        DnnfCircuit r = restrict_values(o, x, allowed);
        CHECK(r.size() <= o.size());
        for (const auto& t : all_totals(o.variables, dsize)) {
            bool inA = std::find(allowed.begin(), allowed.end(), t.at(x)) != allowed.end();
            CHECK(accepts(r, t) == (accepts(o, t) && inA));
        }
    }
    // restricting to the empty set rejects everything
    DnnfCircuit lit = literal_circuit(catalog::dom2(), {"x"}, "x", 0);
    CHECK(is_reject_all(restrict_values(lit, "x", {})));
    // restricting to the full domain changes nothing
    DnnfCircuit full = restrict_values(lit, "x", {0, 1});
    CHECK(accepted_set(full, {"x"}) == accepted_set(lit, {"x"}));
}

TEST_CASE("project_circuit matches the projection oracle") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        int dsize = 2 + (int)rng.below(2);
        DnnfCircuit o = random_circuit(rng, 2 + (int)rng.below(4), dsize);
        std::vector<std::string> keep;
        for (const auto& v : o.variables)
            if (rng.below(2)) keep.push_back(v);
        DnnfCircuit p = project_circuit(o, keep);
        CHECK(p.size() <= o.size());
        CHECK(p.variables == keep);
        for (const auto& t : all_totals(keep, dsize)) {
            bool exists = false;
            for (const auto& full : all_totals(o.variables, dsize))
                if (extends(full, t) && accepts(o, full)) exists = true;
            CHECK(accepts(p, t) == exists);
        }
    }
    // projecting the only variable away accepts everything
    DnnfCircuit lit = literal_circuit(catalog::dom2(), {"x"}, "x", 0);
    CHECK(is_accept_all(project_circuit(lit, {})));
    // projecting to the full scope keeps the accepted set
    DnnfCircuit same = project_circuit(lit, {"x"});
    CHECK(accepted_set(same, {"x"}) == accepted_set(lit, {"x"}));
}

TEST_CASE("proof trees") {
    auto dom = catalog::dom2();
    {
        // tree-shaped product: exactly one proof tree
        DnnfCircuit o;
        o.domain = dom;
        o.variables = {"x", "y"};
        o.output = o.add_and(o.add_input("x", 0), o.add_input("y", 1));
        auto trees = proof_trees(o);
        REQUIRE(trees.size() == 1);
        CHECK(tree_capture(o, trees[0]) == capture(o));
    }
    {
        // union of two inputs: two proof trees
        DnnfCircuit o;
        o.domain = dom;
        o.variables = {"x"};
        o.output = o.add_or(o.add_input("x", 0), o.add_input("x", 1));
        CHECK(proof_trees(o).size() == 2);
    }
    SplitMix64 rng(41);
    for (int trial = 0; trial < 40; ++trial) {
        DnnfCircuit o = random_circuit(rng, 2 + (int)rng.below(3), 2);
        std::set<Assignment> unionSet;
        for (const auto& t : proof_trees(o)) {
            auto s = tree_capture(o, t);
            unionSet.insert(s.begin(), s.end());
        }
        CHECK(unionSet == capture(o));
    }
}

TEST_CASE("check_structured") {
    auto dom = catalog::dom2();
    VTree comb = VTree::right_comb({"x", "y", "z"});
    CHECK(check_structured(literal_circuit(dom, {"x", "y", "z"}, "y", 0), comb));

    // {x,z} is not the variable set of any right-comb node
    DnnfCircuit mix;
    mix.domain = dom;
    mix.variables = {"x", "y", "z"};
    mix.output = mix.add_and(mix.add_input("x", 0), mix.add_input("z", 0));
    CHECK(!check_structured(mix, comb));

    auto [odd, vt] = odd_to_structured_dnnf(eq_pairs_odd());
    CHECK(check_structured(odd, vt));
}

TEST_CASE("fdd_to_dnnf acceptance") {
    DecisionDiagram eq = eq_odd();
    DnnfCircuit o = fdd_to_dnnf(eq);
    CHECK(o.size() <= 4 * eq.size() * eq.domain->size());
    CHECK(accepted_set(o, eq.order) ==
          std::set<Assignment>{{{"x", 0}, {"y", 0}}, {{"x", 1}, {"y", 1}}});

    SplitMix64 rng(53);
    for (int trial = 0; trial < 60; ++trial) {
        int dsize = 2 + (int)rng.below(2);
        DecisionDiagram d = random_odd(rng, 2 + (int)rng.below(4), dsize);
        DnnfCircuit c = fdd_to_dnnf(d);
        CHECK(!check_decomposable(c));
        for (const auto& t : all_totals(d.order, dsize)) CHECK(accepts(c, t) == evaluate(d, t));
    }
}

TEST_CASE("odd_to_structured_dnnf acceptance and structure") {
    SplitMix64 rng(61);
    for (int trial = 0; trial < 40; ++trial) {
        int dsize = 2 + (int)rng.below(2);
        int n = 2 + (int)rng.below(4);
        DecisionDiagram d = random_odd(rng, n, dsize);
        auto [c, vt] = odd_to_structured_dnnf(d);
        CHECK(check_structured(c, vt));
        CHECK(c.size() <= 4 * d.size() * (size_t)dsize * (size_t)(n + 1));
        for (const auto& t : all_totals(d.order, dsize)) CHECK(accepts(c, t) == evaluate(d, t));
    }
    DecisionDiagram fdd = eq_odd();
    fdd.kind = DecisionDiagram::FDD;
    CHECK_THROWS(odd_to_structured_dnnf(fdd));
}

TEST_CASE("rectangle cover of a product circuit") {
    DnnfCircuit o;
    o.domain = catalog::dom2();
    o.variables = {"x", "y"};
    o.output = o.add_and(o.add_input("x", 0), o.add_input("y", 1));
    RectangleCover cover = extract_rectangle_cover(o, {"x", "y"});
    CHECK(cover.rectangles.size() == 1);
    check_cover(o, cover);
}

TEST_CASE("rectangle cover of a union of two products") {
    DnnfCircuit o;
    o.domain = catalog::dom2();
    o.variables = {"x", "y"};
    int p1 = o.add_and(o.add_input("x", 0), o.add_input("y", 0));
    int p2 = o.add_and(o.add_input("x", 1), o.add_input("y", 1));
    o.output = o.add_or(p1, p2);
    RectangleCover cover = extract_rectangle_cover(o, {"x", "y"});
    CHECK(cover.rectangles.size() <= 2);
    check_cover(o, cover);
}

TEST_CASE("rectangle cover of random circuits") {
    SplitMix64 rng(71);
    for (int trial = 0; trial < 30; ++trial) {
        int dsize = 2 + (int)rng.below(2);
        DnnfCircuit o = random_circuit(rng, 3 + (int)rng.below(3), dsize);
        RectangleCover cover = extract_rectangle_cover(o, o.variables);
        check_cover(o, cover);
    }
}

TEST_CASE("structured rectangle covers share one partition") {
    auto [o, vt] = odd_to_structured_dnnf(eq_pairs_odd());
    RectangleCover cover = extract_rectangle_cover(o, o.variables, 2.0 / 3.0, &vt);
    check_cover(o, cover);
    REQUIRE(!cover.rectangles.empty());
    for (const auto& r : cover.rectangles) {
        CHECK(r.xvars == cover.rectangles[0].xvars);
        CHECK(r.yvars == cover.rectangles[0].yvars);
    }

    SplitMix64 rng(83);
    for (int trial = 0; trial < 15; ++trial) {
        DecisionDiagram d = random_odd(rng, 3 + (int)rng.below(3), 2);
        auto [c, tree] = odd_to_structured_dnnf(d);
        RectangleCover cv = extract_rectangle_cover(c, c.variables, 2.0 / 3.0, &tree);
        check_cover(c, cv);
        for (const auto& r : cv.rectangles) {
            CHECK(r.xvars == cv.rectangles[0].xvars);
            CHECK(r.yvars == cv.rectangles[0].yvars);
        }
    }
}

TEST_CASE("json round trip") {
    SplitMix64 rng(97);
    for (int trial = 0; trial < 20; ++trial) {
        DnnfCircuit o = random_circuit(rng, 2 + (int)rng.below(4), 2 + (int)rng.below(2));
        DnnfCircuit back = circuit_from_json(circuit_to_json(o));
        CHECK(back.size() == o.size());
        CHECK(back.variables == o.variables);
        CHECK(accepted_set(back, o.variables) == accepted_set(o, o.variables));
    }
    CHECK_THROWS(circuit_from_json("{\"kind\":\"dnnf\"}"));
    CHECK_THROWS(circuit_from_json("not json"));

    VTree vt = VTree::right_comb({"a", "b"});
    CHECK(vtree_to_json(vt).find("\"vtree\"") != std::string::npos);
}
