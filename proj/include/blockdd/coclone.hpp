#pragma once

#include <optional>

#include "blockdd/blockstruct.hpp"
#include "blockdd/core.hpp"

namespace blockdd {

// A finite constraint language: named relations over one domain.
struct Language {
    DomainPtr domain;
    std::vector<std::string> names;
    std::vector<Relation> relations;

    void add(std::string name, Relation r) {
        names.push_back(std::move(name));
        relations.push_back(std::move(r));
    }
    size_t size() const { return relations.size(); }
};

std::string language_key(const Language& g);  // canonical, order-insensitive
Language parse_language(const std::string& text);
Language load_language(const std::string& path);

// ---- pp-definability membership (indicator construction) ----

enum class Membership { YES, NO, BUDGET_EXCEEDED };

struct MembershipBudget {
    long long max_indicator_vars = 200000;   // |D|^m
    long long max_scope_tuples = 50000000;   // |V|^arity per language relation
};

// Is r pp-definable (with equality) over g?  r must be non-empty.
Membership coclone_member(const Relation& r, const Language& g,
                          const MembershipBudget& budget = {});

// ---- binary closure ----

struct Pi2Result {
    Language g2;
    bool certified = false;    // true: exact membership route; false: saturation lower bound
    bool fixed_point = false;  // saturation reached its fixed point within budget
};

struct Pi2Budget {
    int aux_arity_bound = 4;
    size_t max_relations = 20000;  // saturation working-set cap
    MembershipBudget membership;   // for the exact route
};

// All relations of arity <= 2 pp-definable over g (exact for |D| = 2 within
// budget, otherwise a saturation lower bound).
Pi2Result pi2_closure(const Language& g, const Pi2Budget& budget = {});

// ---- incompatible block structures ----

struct IncompatibleBlocksWitness {
    int rel1 = -1, rel2 = -1;          // indices into the scanned binary list
    bool transpose1 = false, transpose2 = false;
    std::vector<int> A, B;             // distinct z-side blocks of rel1
    std::vector<int> C, D;             // distinct z-side blocks of rel2
};

std::optional<IncompatibleBlocksWitness> has_incompatible_block_structure(const Language& g2);

// ---- ternary conjunction sweep ----

enum class SweepMode { BLOCKWISE, UNIFORM };

struct TripleWitness {
    Relation rxy, rxz, ryz;
    std::string pivot1, pivot2;  // the pair of {x,y,z} that fails
};

// Closes g2 under transpose, intersection and unary restriction, then tests
// R_xy(x,y) & R_xz(x,z) & R_yz(y,z) for every triple; nullopt = PASS.
std::optional<TripleWitness> ternary_conjunction_sweep(const Language& g2, SweepMode mode);

// ---- classifier ----

enum class Verdict { UNIFORM_ODD, NONUNIFORM_FDD, HARD, UNKNOWN_BUDGET };

const char* verdict_name(Verdict v);

struct LanguageClass {
    Verdict verdict = Verdict::UNKNOWN_BUDGET;
    Language g2;
    bool pi2_certified = false;

    // HARD evidence: a relation that is not blockwise decomposable, with a
    // description of its pp-definition over the language.
    Relation hard_relation;
    std::string hard_definition;
    int hard_input_index = -1;  // index into g when the witness is an input relation
    std::optional<IncompatibleBlocksWitness> incompatible;

    // NONUNIFORM_FDD evidence: uniform sweep failure.
    std::optional<TripleWitness> failing_triple;

    std::string note;
};

// Memoizes classification by language and sweep results by g2 (the Boolean
// sweep revisits the same binary closure for many languages).
struct ClassifyCache {
    std::map<std::string, LanguageClass> by_language;
    std::map<std::string, std::optional<TripleWitness>> uniform_sweep;
    std::map<std::string, std::optional<IncompatibleBlocksWitness>> incompat_scan;
};

LanguageClass classify_language(const Language& g, const Pi2Budget& budget = {},
                                ClassifyCache* cache = nullptr);

// ---- Boolean specialization ----

// Is r a conjunction of =, !=, U_0, U_1 constraints over its columns?
// Domain must be {0,1}.
bool is_bijunctive_affine(const Relation& r);

}  // namespace blockdd
