#pragma once

#include "blockdd/core.hpp"

namespace blockdd {

// ---- selection matrices and block partitions ----

struct SelectionMatrix {
    std::string row_var, col_var;
    int dom_size = 0;
    // entries[a][b] = pi_{scope \ {x,y}} ( c |_{x=a, y=b} )
    std::vector<std::vector<Constraint>> entries;

    std::vector<std::vector<char>> pattern() const;  // 1 = non-empty
};

struct Block {
    std::vector<int> rows, cols;  // indices, sorted
};

struct BlockPartition {
    std::vector<Block> blocks;  // ordered by smallest row index
};

struct NotProperWitness {
    int r1 = -1, r2 = -1, c1 = -1, c2 = -1;  // 2x2 submatrix, exactly one empty entry
};

struct GridBlocks {
    bool proper = false;
    BlockPartition partition;
    NotProperWitness witness;
};

SelectionMatrix selection_matrix(const Constraint& c, const std::string& x, const std::string& y);

// Proper-block decomposition of an arbitrary non-emptiness grid.
GridBlocks grid_blocks(const std::vector<std::vector<char>>& nonempty);
GridBlocks proper_block_partition(const SelectionMatrix& m);

// ---- decomposability ----

using FactorPartition = std::vector<std::vector<std::string>>;

bool is_decomposable_wrt(const Constraint& c, const FactorPartition& p);
FactorPartition indecomposable_factors(const Constraint& c, bool cross_check = true);

// Polynomial graph route: variables are linked when their selection pattern
// has two or more non-empty blocks (or is not proper); factors = connected
// components. Guaranteed to equal indecomposable_factors only when the
// constraint is blockwise decomposable in every pair, so callers must verify
// results that feed further computation.
FactorPartition graph_factors(const Constraint& c);

struct BlockwiseVerdict {
    bool yes = false;
    enum Reason { OK, NOT_PROPER, UNSPLITTABLE_BLOCK } reason = OK;
    int block_index = -1;                 // for UNSPLITTABLE_BLOCK
    BlockPartition blocks;                // when matrix proper
    NotProperWitness witness;             // when NOT_PROPER
    // per-block (V_i, W_i) with x in V_i, y in W_i; shared single entry for
    // the uniform variant
    std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> partitions;
};

BlockwiseVerdict is_blockwise_decomposable(const Constraint& c, const std::string& x,
                                           const std::string& y);
BlockwiseVerdict is_uniformly_blockwise_decomposable(const Constraint& c, const std::string& x,
                                                     const std::string& y);

bool is_relation_blockwise_decomposable(const Relation& r);
bool is_relation_uniformly_blockwise_decomposable(const Relation& r);

// Constraint over canonical variable names x1..xk used by the relation-level
// predicates.
Constraint relation_constraint(const Relation& r);

bool is_blockwise_set_decomposable(const Relation& r, int arity_cap = 5);

// ---- balance ----

struct CountMatrix {
    std::vector<Tuple> row_assignments, col_assignments;
    std::vector<std::vector<unsigned long long>> entries;
};

CountMatrix count_matrix(const Relation& r, const std::vector<int>& x_positions,
                         const std::vector<int>& y_positions);
bool is_balanced(const Relation& r, const std::vector<int>& x_positions,
                 const std::vector<int>& y_positions);

// Binarization identity: conjunction of all <=2-ary projections compared with
// the constraint itself. Returns true iff equal (always a superset otherwise).
bool binarize_identity_holds(const Constraint& c);

}  // namespace blockdd
