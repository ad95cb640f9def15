#pragma once

#include <optional>
#include <set>

#include "blockdd/diagrams.hpp"

namespace blockdd {

// Multi-valued DNNF with binary fan-in gates. Inputs are value literals
// (x -> a) or the EMPTY / EPSILON sentinels.
struct DnnfCircuit {
    enum Kind { INPUT, EMPTY, EPSILON, AND, OR };

    struct Gate {
        Kind kind = EMPTY;
        int a = -1, b = -1;  // children for AND / OR
        std::string var;     // INPUT only
        Value val = 0;       // INPUT only
    };

    DomainPtr domain;
    std::vector<std::string> variables;  // acceptance universe
    std::vector<Gate> gates;
    int output = -1;

    int add_input(const std::string& var, Value val) {
        gates.push_back({INPUT, -1, -1, var, val});
        return (int)gates.size() - 1;
    }
    int add_empty() {
        gates.push_back({EMPTY, -1, -1, "", 0});
        return (int)gates.size() - 1;
    }
    int add_epsilon() {
        gates.push_back({EPSILON, -1, -1, "", 0});
        return (int)gates.size() - 1;
    }
    int add_and(int a, int b) {
        gates.push_back({AND, a, b, "", 0});
        return (int)gates.size() - 1;
    }
    int add_or(int a, int b) {
        gates.push_back({OR, a, b, "", 0});
        return (int)gates.size() - 1;
    }
    // balanced binary comb over >= 1 children
    int add_or_comb(std::vector<int> children);
    int add_and_comb(std::vector<int> children);

    size_t size() const { return gates.size(); }
};

struct VTree {
    struct Node {
        int left = -1, right = -1;
        std::string var;  // leaves only
        bool leaf() const { return left < 0; }
    };
    std::vector<Node> nodes;
    int root = -1;

    int add_leaf(const std::string& var) {
        nodes.push_back({-1, -1, var});
        return (int)nodes.size() - 1;
    }
    int add_internal(int l, int r) {
        nodes.push_back({l, r, ""});
        return (int)nodes.size() - 1;
    }
    static VTree right_comb(const std::vector<std::string>& order);
};

// ---- semantics ----

constexpr size_t kCaptureBudget = 1000000;

// Exact inductive captured-set semantics (partial assignments).
std::set<Assignment> capture(const DnnfCircuit& o, size_t budget = kCaptureBudget);
bool accepts(const DnnfCircuit& o, const Assignment& a);

std::optional<int> check_decomposable(const DnnfCircuit& o);  // offending AND gate

// variables below each gate (same indexing as o.gates)
std::vector<std::set<std::string>> gate_cones(const DnnfCircuit& o);

// ---- transformations (never increase size) ----

DnnfCircuit eliminate_special_inputs(const DnnfCircuit& o);
DnnfCircuit restrict_values(const DnnfCircuit& o, const std::string& x,
                            const std::vector<Value>& allowed);
DnnfCircuit project_circuit(const DnnfCircuit& o, const std::vector<std::string>& keep);

bool is_accept_all(const DnnfCircuit& o);
bool is_reject_all(const DnnfCircuit& o);

// ---- proof trees ----

struct ProofTree {
    std::map<int, int> or_choice;  // OR gate -> chosen child
    std::vector<int> gates;        // all gates of the tree (output first)
};

std::vector<ProofTree> proof_trees(const DnnfCircuit& o, size_t budget = 100000);
std::set<Assignment> tree_capture(const DnnfCircuit& o, const ProofTree& t);

// ---- structure ----

bool check_structured(const DnnfCircuit& o, const VTree& t);

// ---- rectangle covers ----

struct Rectangle {
    std::vector<std::string> xvars, yvars;  // complementary over the cover scope
    std::set<Assignment> xset, yset;        // captured set = pairwise unions
};

struct RectangleCover {
    std::vector<std::string> scope;  // var(o) together with Z
    std::vector<std::string> zvars;
    double beta = 2.0 / 3.0;
    std::vector<Rectangle> rectangles;
};

RectangleCover extract_rectangle_cover(const DnnfCircuit& o, const std::vector<std::string>& Z,
                                       double beta = 2.0 / 3.0, const VTree* vtree = nullptr,
                                       size_t budget = kCaptureBudget);

// ---- diagram translations ----

DnnfCircuit fdd_to_dnnf(const DecisionDiagram& d);
std::pair<DnnfCircuit, VTree> odd_to_structured_dnnf(const DecisionDiagram& d);

// ---- serialization ----

std::string circuit_to_json(const DnnfCircuit& o);
DnnfCircuit circuit_from_json(const std::string& text);
std::string vtree_to_json(const VTree& t);

}  // namespace blockdd
