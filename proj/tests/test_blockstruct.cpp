#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "blockdd/blockstruct.hpp"
#include "blockdd/rng.hpp"
#include "support/catalog.hpp"

using namespace blockdd;

static Relation random_relation(SplitMix64& rng, int arity, int domSize, double density) {
    Relation r;
    r.arity = arity;
    int total = 1;
    for (int i = 0; i < arity; ++i) total *= domSize;
    for (int idx = 0; idx < total; ++idx) {
        if ((rng.next() >> 11) * 0x1.0p-53 < density) {
            Tuple t(arity);
            int v = idx;
            for (int i = arity - 1; i >= 0; --i) {
                t[i] = v % domSize;
                v /= domSize;
            }
            r.tuples.push_back(std::move(t));
        }
    }
    r.canonicalize();
    return r;
}

TEST_CASE("selection matrix of the block-matrix example (Eq. 5 data)") {
    Constraint c({"x", "y", "z", "v"}, catalog::blockmatrixR());
    SelectionMatrix m = selection_matrix(c, "x", "y");
    REQUIRE(m.dom_size == 3);
    // (a,a) = {(a,a)}
    CHECK(m.entries[0][0].rel == Relation(2, {{0, 0}}));
    // (b,b) = {(a,b),(a,c),(c,c)}
    CHECK(m.entries[1][1].rel == Relation(2, {{0, 1}, {0, 2}, {2, 2}}));
    // (c,b) = {(c,a)}
    CHECK(m.entries[2][1].rel == Relation(2, {{2, 0}}));
    int nonempty = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) nonempty += m.entries[a][b].rel.empty() ? 0 : 1;
    CHECK(nonempty == 3);

    GridBlocks gb = proper_block_partition(m);
    REQUIRE(gb.proper);
    REQUIRE(gb.partition.blocks.size() == 2);
    CHECK(gb.partition.blocks[0].rows == std::vector<int>{0});
    CHECK(gb.partition.blocks[0].cols == std::vector<int>{0});
    CHECK(gb.partition.blocks[1].rows == std::vector<int>{1, 2});
    CHECK(gb.partition.blocks[1].cols == std::vector<int>{1});
}

TEST_CASE("selection matrix trivial and parity examples") {
    Constraint full({"x", "y", "z"}, Relation::full(3, 2));
    SelectionMatrix m = selection_matrix(full, "x", "z");
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) CHECK(m.entries[a][b].rel.size() == 2);

    Constraint par({"x", "y", "z"}, catalog::xor3());
    SelectionMatrix p = selection_matrix(par, "x", "y");
    CHECK(p.entries[0][0].rel == Relation(1, {{1}}));
    CHECK(p.entries[0][1].rel == Relation(1, {{0}}));
    CHECK(p.entries[1][0].rel == Relation(1, {{0}}));
    CHECK(p.entries[1][1].rel == Relation(1, {{1}}));
    CHECK_THROWS(selection_matrix(par, "x", "x"));
}

TEST_CASE("proper_block_partition NOT_PROPER witness") {
    GridBlocks gb = grid_blocks({{1, 1}, {1, 0}});
    CHECK(!gb.proper);
    // witness must be a 2x2 submatrix with exactly one empty entry
    auto& w = gb.witness;
    std::vector<std::vector<char>> pat{{1, 1}, {1, 0}};
    int empty = (!pat[w.r1][w.c1]) + (!pat[w.r1][w.c2]) + (!pat[w.r2][w.c1]) + (!pat[w.r2][w.c2]);
    CHECK(empty == 1);
    CHECK(w.r1 != w.r2);
    CHECK(w.c1 != w.c2);

    GridBlocks one = grid_blocks({{1, 1}, {1, 1}});
    CHECK(one.proper);
    CHECK(one.partition.blocks.size() == 1);
}

TEST_CASE("witness agrees with exhaustive 2x2 scan on random grids") {
    SplitMix64 rng(3);
    for (int iter = 0; iter < 500; ++iter) {
        int nr = 2 + (int)rng.below(3), nc = 2 + (int)rng.below(3);
        std::vector<std::vector<char>> pat(nr, std::vector<char>(nc, 0));
        for (auto& row : pat)
            for (auto& cell : row) cell = rng.below(2) ? 1 : 0;
        bool witness2x2 = false;
        for (int r1 = 0; r1 < nr && !witness2x2; ++r1)
            for (int r2 = r1 + 1; r2 < nr && !witness2x2; ++r2)
                for (int c1 = 0; c1 < nc && !witness2x2; ++c1)
                    for (int c2 = c1 + 1; c2 < nc && !witness2x2; ++c2) {
                        int empty = (!pat[r1][c1]) + (!pat[r1][c2]) + (!pat[r2][c1]) +
                                    (!pat[r2][c2]);
                        if (empty == 1) witness2x2 = true;
                    }
        GridBlocks gb = grid_blocks(pat);
        CHECK(gb.proper == !witness2x2);
        if (!gb.proper) {
            auto& w = gb.witness;
            int empty = (!pat[w.r1][w.c1]) + (!pat[w.r1][w.c2]) + (!pat[w.r2][w.c1]) +
                        (!pat[w.r2][w.c2]);
            CHECK(empty == 1);
        }
    }
}

TEST_CASE("is_decomposable_wrt examples") {
    Constraint r1({"x", "y", "u", "v"}, catalog::sepR1());
    CHECK(is_decomposable_wrt(r1, {{"x", "u"}, {"y", "v"}}));
    CHECK(is_decomposable_wrt(r1, {{"x", "y", "u", "v"}}));
    Constraint par({"x", "y", "z"}, catalog::xor3());
    CHECK(!is_decomposable_wrt(par, {{"x"}, {"y", "z"}}));
    CHECK_THROWS(is_decomposable_wrt(par, {{"x"}, {"y"}}));
}

TEST_CASE("indecomposable_factors") {
    Constraint prod = conjoin(Constraint({"x", "y"}, catalog::eq2()),
                              Constraint({"u", "v"}, catalog::neq2()));
    FactorPartition fp = indecomposable_factors(prod);
    REQUIRE(fp.size() == 2);
    std::sort(fp.begin(), fp.end());
    CHECK(fp[0] == std::vector<std::string>{"u", "v"});
    CHECK(fp[1] == std::vector<std::string>{"x", "y"});

    Constraint sep({"x", "y", "u", "v"}, catalog::sepR());
    CHECK(indecomposable_factors(sep).size() == 1);

    Constraint un({"x"}, catalog::u1());
    CHECK(indecomposable_factors(un) == FactorPartition{{"x"}});
}

TEST_CASE("graph_factors: fast route agrees where blockwise, may differ elsewhere") {
    auto canon = [](FactorPartition p) {
        for (auto& cls : p) std::sort(cls.begin(), cls.end());
        std::sort(p.begin(), p.end());
        return p;
    };
    // pairwise blockwise decomposable inputs: both routes coincide
    Constraint prod = conjoin(Constraint({"x", "y"}, catalog::eq2()),
                              Constraint({"u", "v"}, catalog::neq2()));
    CHECK(canon(graph_factors(prod)) == canon(indecomposable_factors(prod)));
    Constraint chain = conjoin(Constraint({"x", "y"}, catalog::eq2()),
                               Constraint({"y", "z"}, catalog::eq2()));
    CHECK(canon(graph_factors(chain)) == canon(indecomposable_factors(chain)));
    SplitMix64 rng(321);
    for (int it = 0; it < 40; ++it) {
        Constraint c = conjoin(Constraint({"a", "b"}, rng.below(2) ? catalog::eq2() : catalog::neq2()),
                               Constraint({"c", "d"}, rng.below(2) ? catalog::eq2() : catalog::or2()));
        CHECK(canon(graph_factors(c)) == canon(indecomposable_factors(c)));
    }
    // parity: every pair pattern is one full block, so the graph route sees
    // no links — exactly why it needs external verification off the
    // blockwise regime
    Constraint par({"x", "y", "z"}, catalog::xor3());
    CHECK(graph_factors(par).size() == 3);
    CHECK(indecomposable_factors(par).size() == 1);
}

TEST_CASE("blockwise decomposability of the separating example") {
    Constraint sep({"x", "y", "u", "v"}, catalog::sepR());
    BlockwiseVerdict v = is_blockwise_decomposable(sep, "x", "y");
    REQUIRE(v.yes);
    REQUIRE(v.blocks.blocks.size() == 2);
    CHECK(v.blocks.blocks[0].rows == std::vector<int>{0, 1});  // {a,b}
    CHECK(v.blocks.blocks[1].rows == std::vector<int>{2, 3});  // {c,d}
    REQUIRE(v.partitions.size() == 2);
    CHECK(v.partitions[0].first == std::vector<std::string>{"x", "u"});
    CHECK(v.partitions[0].second == std::vector<std::string>{"y", "v"});
    CHECK(v.partitions[1].first == std::vector<std::string>{"x", "v"});
    CHECK(v.partitions[1].second == std::vector<std::string>{"y", "u"});

    BlockwiseVerdict u = is_uniformly_blockwise_decomposable(sep, "x", "y");
    CHECK(!u.yes);
    CHECK(u.reason == BlockwiseVerdict::UNSPLITTABLE_BLOCK);

    Constraint r1({"x", "y", "u", "v"}, catalog::sepR1());
    BlockwiseVerdict u1v = is_uniformly_blockwise_decomposable(r1, "x", "y");
    REQUIRE(u1v.yes);
    CHECK(u1v.partitions[0].first == std::vector<std::string>{"x", "u"});
    CHECK(u1v.partitions[0].second == std::vector<std::string>{"y", "v"});
}

TEST_CASE("parity is not blockwise decomposable; full relation is") {
    Constraint par({"x", "y", "z"}, catalog::xor3());
    BlockwiseVerdict v = is_blockwise_decomposable(par, "x", "y");
    CHECK(!v.yes);
    CHECK(v.reason == BlockwiseVerdict::UNSPLITTABLE_BLOCK);
    CHECK(v.blocks.blocks.size() == 1);

    Constraint full({"x", "y", "z"}, Relation::full(3, 2));
    CHECK(is_blockwise_decomposable(full, "x", "y").yes);
    CHECK(is_uniformly_blockwise_decomposable(full, "x", "y").yes);

    CHECK(is_relation_blockwise_decomposable(catalog::sepR()));
    CHECK(!is_relation_uniformly_blockwise_decomposable(catalog::sepR()));
    CHECK(is_relation_uniformly_blockwise_decomposable(catalog::sepR1()));
    CHECK(!is_relation_blockwise_decomposable(catalog::xor3()));

    // any binary relation: blockwise iff proper; uniform iff blockwise
    Constraint orc({"x", "y"}, catalog::or2());
    CHECK(!is_blockwise_decomposable(orc, "x", "y").yes);
    Constraint eqc({"x", "y"}, catalog::eq2());
    CHECK(is_uniformly_blockwise_decomposable(eqc, "x", "y").yes);
}

TEST_CASE("set-decomposability examples and equivalence sweep") {
    CHECK(is_blockwise_set_decomposable(catalog::sepR()));
    CHECK(!is_blockwise_set_decomposable(catalog::xor3()));
    CHECK(is_blockwise_set_decomposable(Relation::full(2, 3)));
    CHECK_THROWS(is_blockwise_set_decomposable(Relation::full(6, 2)));

    SplitMix64 rng(99);
    for (int iter = 0; iter < 300; ++iter) {
        int domSize = 2 + (int)rng.below(2);
        int arity = 2 + (int)rng.below(3);
        Relation r = random_relation(rng, arity, domSize, 0.5);
        CHECK(is_blockwise_set_decomposable(r) == is_relation_blockwise_decomposable(r));
    }
}

TEST_CASE("closure under projection and selection for blockwise positives") {
    std::vector<Relation> positives{catalog::sepR(), catalog::sepR1(), catalog::sepR2(),
                                    catalog::rPrime(), catalog::rTriplePrime(),
                                    Relation::full(3, 3)};
    for (const auto& r : positives) {
        REQUIRE(is_relation_blockwise_decomposable(r));
        Constraint c = relation_constraint(r);
        for (int i = 0; i < r.arity; ++i) {
            // drop column i
            std::vector<std::string> keep;
            for (int j = 0; j < r.arity; ++j)
                if (j != i) keep.push_back(c.scope[j]);
            if (!keep.empty())
                CHECK(is_relation_blockwise_decomposable(project(c, keep).rel));
            // select on column i
            CHECK(is_relation_blockwise_decomposable(select(c, c.scope[i], {0, 1}).rel));
        }
    }
    // uniform variant
    for (const auto& r : {catalog::sepR1(), catalog::rPrime()}) {
        REQUIRE(is_relation_uniformly_blockwise_decomposable(r));
        Constraint c = relation_constraint(r);
        std::vector<std::string> keep(c.scope.begin(), c.scope.end() - 1);
        CHECK(is_relation_uniformly_blockwise_decomposable(project(c, keep).rel));
        CHECK(is_relation_uniformly_blockwise_decomposable(select(c, c.scope[0], {0, 2}).rel));
    }
}

TEST_CASE("binarize identity") {
    CHECK(binarize_identity_holds(Constraint({"x", "y", "u", "v"}, catalog::sepR())));
    CHECK(binarize_identity_holds(Constraint({"x", "y", "u", "v"}, catalog::sepR1())));
    // strict failure for parity
    Constraint par({"x", "y", "z"}, catalog::xor3());
    CHECK(!binarize_identity_holds(par));
    auto projs = binary_projections(par);
    Constraint acc;
    acc.rel.arity = 0;
    acc.rel.tuples = {Tuple{}};
    for (const auto& p : projs)
        if (!p.scope.empty()) acc = conjoin(acc, p);
    acc = project(acc, par.scope);
    CHECK(acc.rel.size() > par.rel.size());  // strict superset
    for (const auto& t : par.rel.tuples) CHECK(acc.rel.contains(t));
}

TEST_CASE("balance: examples and implication from blockwise decomposability") {
    CHECK(is_balanced(catalog::sepR(), {0}, {1}));
    CHECK(is_balanced(catalog::xor3(), {0}, {1}));  // all-ones count matrix
    Relation r(3, {{0, 0, 0}, {0, 0, 1}, {1, 1, 0}});
    CHECK(is_balanced(r, {0}, {1}));
    CountMatrix m = count_matrix(r, {0}, {1});
    CHECK(m.entries[0][0] == 2);
    CHECK(m.entries[1][1] == 1);
    CHECK(m.entries[0][1] == 0);

    std::vector<Relation> positives{catalog::sepR(), catalog::sepR1(), catalog::rPrime(),
                                    catalog::rTriplePrime(), catalog::blockmatrixR()};
    for (const auto& r2 : positives) {
        if (!is_relation_blockwise_decomposable(r2)) continue;
        int k = r2.arity;
        for (unsigned mx = 1; mx < (1u << k); ++mx)
            for (unsigned my = 1; my < (1u << k); ++my) {
                if (mx & my) continue;
                std::vector<int> X, Y;
                for (int i = 0; i < k; ++i) {
                    if ((mx >> i) & 1u) X.push_back(i);
                    if ((my >> i) & 1u) Y.push_back(i);
                }
                CHECK(is_balanced(r2, X, Y));
            }
    }
}

TEST_CASE("random sweep: blockwise decomposable implies balanced and binarizable") {
    SplitMix64 rng(123);
    int positives = 0;
    for (int iter = 0; iter < 400; ++iter) {
        int domSize = 2 + (int)rng.below(2);
        int arity = 3 + (int)rng.below(2);
        Relation r = random_relation(rng, arity, domSize, 0.7);
        if (!is_relation_blockwise_decomposable(r)) continue;
        ++positives;
        CHECK(binarize_identity_holds(relation_constraint(r)));
        CHECK(is_balanced(r, {0}, {1}));
    }
    CHECK(positives > 5);  // sanity: the sweep actually hit positive cases
}
