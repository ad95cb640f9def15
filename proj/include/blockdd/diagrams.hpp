#pragma once

#include <optional>

#include "blockdd/core.hpp"

namespace blockdd {

// Multi-valued decision diagram. Node ids: 0 = 0-sink, 1 = 1-sink, inner
// nodes from 2 upward (id i is nodes[i - 2]). Every inner node carries one
// edge per domain value. Variables skipped along a path are unconstrained.
struct DecisionDiagram {
    enum Kind { ODD, FDD };

    struct Node {
        std::string var;
        std::vector<int> edges;  // indexed by domain value
    };

    Kind kind = ODD;
    DomainPtr domain;
    std::vector<std::string> order;  // ODD: the variable order; FDD: variable universe
    std::vector<Node> nodes;
    int source = 0;

    static constexpr int sink0 = 0;
    static constexpr int sink1 = 1;
    static bool is_sink(int id) { return id == sink0 || id == sink1; }

    int add_node(const std::string& var, std::vector<int> edges) {
        nodes.push_back({var, std::move(edges)});
        return (int)nodes.size() + 1;
    }
    const Node& node(int id) const { return nodes.at(id - 2); }
    size_t size() const { return nodes.size() + 2; }  // including both sinks
};

bool evaluate(const DecisionDiagram& d, const Assignment& a);

struct DiagramViolation {
    std::string message;
    std::vector<int> path;  // node ids from source to the offending edge
};

std::optional<DiagramViolation> validate(const DecisionDiagram& d);

unsigned long long count_models(const DecisionDiagram& d, int n_vars);

// Merge structurally identical nodes (optional post-pass; never assumed by
// the size bounds).
DecisionDiagram reduce(const DecisionDiagram& d);

std::string to_dot(const DecisionDiagram& d);
std::string diagram_to_json(const DecisionDiagram& d);
DecisionDiagram diagram_from_json(const std::string& text);

}  // namespace blockdd
