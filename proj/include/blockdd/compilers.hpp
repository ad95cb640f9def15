#pragma once

#include "blockdd/blockstruct.hpp"
#include "blockdd/diagrams.hpp"

namespace blockdd {

// Raised when a split or shrink step contradicts the caller's claim that the
// language is tractable for the requested diagram kind.
struct SplitFailedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MisclassifiedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tri-partition of the scope around a pivot pair: the constraint equals the
// conjunction of its {x} u v_side, {y} u w_side, and {x,y} projections.
struct UniformSplit {
    std::vector<std::string> v_side;
    std::pair<std::string, std::string> pivot;
    std::vector<std::string> w_side;
};

UniformSplit find_uniform_split(const Formula& f, const std::string& x, const std::string& y);
UniformSplit find_uniform_split(const Constraint& c, const std::string& x, const std::string& y);

// Spanning tree on the variables whose explicit binary edge relations
// conjoin to the original solution set.
struct StructureTree {
    struct Edge {
        std::string p, q;
        Relation rel;  // over (p, q)
    };
    std::vector<std::string> vars;
    std::vector<Edge> edges;

    std::vector<std::string> neighbors(const std::string& v) const;
    const Edge& edge(const std::string& p, const std::string& q) const;
};

StructureTree tree_structure(const Formula& f);
std::string tree_to_dot(const StructureTree& t);

DecisionDiagram compile_odd(const Formula& f);
DecisionDiagram compile_fdd(const Formula& f);
DecisionDiagram compile_obdd_baseline(const Formula& f, const std::vector<std::string>& order);

}  // namespace blockdd
