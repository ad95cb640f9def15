#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace blockdd {

// Domain values are opaque symbols mapped to dense indices 0..|D|-1.
using Value = int;
using Tuple = std::vector<Value>;

struct Domain {
    std::vector<std::string> symbols;
    std::unordered_map<std::string, Value> index;

    static std::shared_ptr<const Domain> make(std::vector<std::string> syms);
    int size() const { return (int)symbols.size(); }
    const std::string& name(Value v) const { return symbols.at(v); }
    Value value(const std::string& sym) const;
};
using DomainPtr = std::shared_ptr<const Domain>;

// A finite relation: set of same-arity tuples, kept sorted and duplicate-free.
struct Relation {
    int arity = 0;
    std::vector<Tuple> tuples;

    Relation() = default;
    Relation(int k, std::vector<Tuple> ts);

    void canonicalize();
    bool contains(const Tuple& t) const;
    size_t size() const { return tuples.size(); }
    bool empty() const { return tuples.empty(); }

    Relation projected(const std::vector<int>& positions) const;
    Relation transposed() const;  // arity 2 only

    static Relation full(int arity, int domSize);
    static Relation equality(int domSize);
    static Relation unary(const std::vector<Value>& vals);

    bool operator==(const Relation& o) const { return arity == o.arity && tuples == o.tuples; }
    bool operator<(const Relation& o) const {
        if (arity != o.arity) return arity < o.arity;
        return tuples < o.tuples;
    }
};

// Constraint = relation bound to a scope. Repeated scope variables are
// normalized away at construction (tuples filtered to agree on repeats).
struct Constraint {
    std::vector<std::string> scope;
    Relation rel;

    Constraint() = default;
    Constraint(std::vector<std::string> rawScope, Relation r);

    int arity() const { return (int)scope.size(); }
    int scopePos(const std::string& var) const;  // -1 if absent
};

struct Formula {
    DomainPtr domain;
    std::vector<std::string> variables;
    std::vector<Constraint> constraints;

    int varIndex(const std::string& v) const;
};

// Partial assignment, variable name -> value.
using Assignment = std::map<std::string, Value>;
// Optional per-variable live domains (absent variable = full domain).
using DomainMap = std::map<std::string, std::vector<Value>>;

// ---- solution-set operations ----

Constraint conjoin(const Constraint& c1, const Constraint& c2);
Constraint project(const Constraint& c, const std::vector<std::string>& vars);
Constraint select(const Constraint& c, const std::string& var, const std::vector<Value>& allowed);
std::vector<Constraint> binary_projections(const Constraint& c);

// Materialize a whole formula as one constraint over the given variables
// (default: all formula variables).
Constraint constraint_of(const Formula& f);
Constraint constraint_of(const Formula& f, const std::vector<std::string>& vars);

// ---- oracles ----

std::vector<Assignment> enumerate_solutions(const Formula& f, const Assignment& partial = {});
unsigned long long count_solutions(const Formula& f, const Assignment& partial = {},
                                   const DomainMap* live = nullptr);
bool satisfiable(const Formula& f, const Assignment& partial = {},
                 const DomainMap* live = nullptr);

// ---- text instance format ----

Formula parse_instance(const std::string& text);
Formula load_instance(const std::string& path);
std::string serialize_instance(const Formula& f);

// ---- misc helpers ----

std::string relation_key(const Relation& r);      // canonical hashable string
uint64_t fnv1a64(const void* data, size_t len);   // stable content hashing

}  // namespace blockdd
