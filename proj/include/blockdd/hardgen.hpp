#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "blockdd/core.hpp"
#include "blockdd/diagrams.hpp"

namespace blockdd {

// Bipartite graph on two vertex sets of equal size n. Vertices are indexed
// 0..n-1 on each side; an edge is a (left, right) pair. Edges are kept
// sorted and duplicate-free.
struct BipartiteGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    int maxDegree() const;
    bool hasEdge(int left, int right) const;
};

// Union of r seeded uniformly random perfect matchings on [n]x[n];
// parallel edges are collapsed, so every vertex has degree in [1, r].
BipartiteGraph random_matching_union(int n, int r, uint64_t seed);

// Expansion check for one-sided sets: for every S contained in one side with
// 1 <= |S| <= alpha*n, the neighborhood N(S) on the other side must have
// size at least c*|S|. Exhaustive when the number of such subsets fits in
// budget, otherwise seeded random sampling (verdict downgraded to
// SAMPLED_OK). A REFUTED witness is re-checked before being returned.
struct ExpansionReport {
    enum Verdict { VERIFIED, REFUTED, SAMPLED_OK };
    Verdict verdict = VERIFIED;
    int witnessSide = -1;            // 0 = left, 1 = right (REFUTED only)
    std::vector<int> witnessSet;     // the violating S (REFUTED only)
    size_t neighborhoodSize = 0;     // |N(S)| for the witness
};
ExpansionReport verify_expansion(const BipartiteGraph& g, double alpha, double c,
                                 unsigned long long budget, uint64_t seed = 0);

// Vertex ids for mixed sets: left i -> i, right j -> n + j.
using Matching = std::vector<std::pair<int, int>>;

// Greedy matching of edges crossing the vertex set x (exactly one endpoint
// in x), then a greedy induced sub-matching: no graph edge may connect
// endpoints of two distinct matching edges. The result is verified induced.
Matching greedy_induced_matching(const BipartiteGraph& g, const std::set<int>& x);

// For every edge e = (u, v) add a constraint rel(..., xa<u>, ..., xb<v>, ...)
// with x_pos holding the left variable, y_pos the right one, and fresh
// variables z<e>_<k> (k = 0..arity-3) on the remaining positions, in scope
// order. Variables: xa0..xa<n-1>, xb0..xb<n-1>, then the z blocks per edge.
Formula build_hard_formula(const BipartiteGraph& g, DomainPtr dom, const Relation& rel,
                           int x_pos, int y_pos);

// Fooling-set certificate for the n-fold disjoint-copy formula
// F_n = AND_i rel(x<i>, y<i>, z<i>_0, ...). The base pair (a, b) are two
// satisfying assignments of a single copy (variables x, y, z0, ...) such
// that for every split of the z-variables at least one of the two
// cross-recombinations falsifies the constraint. The family holds the 2^n
// assignments obtained by choosing a or b independently per copy.
struct FoolingSet {
    Assignment a, b;
    std::vector<Assignment> family;
};

// Searches all tuple pairs of rel for a base pair (exhaustive over the
// 2^(arity-2) z-splits); returns the formula and family on success,
// std::nullopt when no pair qualifies.
std::optional<std::pair<Formula, FoolingSet>> fooling_family(const Relation& rel, DomainPtr dom,
                                                             int x_pos, int y_pos, int n);

// Independent re-check: every family member satisfies f, and for every pair
// of distinct members both recombinations across the partition (xside vs.
// the rest) never both satisfy f — so no rectangle respecting the partition
// can hold two members.
bool certify_fooling(const Formula& f, const FoolingSet& fs, const std::set<std::string>& xside);

// Benchmark table: one row per n, instances built by gen(n, seed) and
// compiled by compile; rows are computed in parallel and merged in n order.
struct BenchRow {
    int n = 0;
    size_t vars = 0;
    size_t constraints = 0;
    size_t diagramNodes = 0;
    double millis = 0.0;
};
std::vector<BenchRow> growth_bench(const std::function<Formula(int, uint64_t)>& gen,
                                   const std::function<DecisionDiagram(const Formula&)>& compile,
                                   const std::vector<int>& ns, uint64_t seed);
std::string bench_csv(const std::vector<BenchRow>& rows);  // header n,vars,constraints,diagram_nodes,millis

}  // namespace blockdd
