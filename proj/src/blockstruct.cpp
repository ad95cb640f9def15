#include "blockdd/blockstruct.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace blockdd {

namespace {

// Relation of `src` with columns reordered to match `scope`.
Relation aligned_rel(const Constraint& src, const std::vector<std::string>& scope) {
    std::vector<int> perm;
    for (const auto& v : scope) {
        int p = src.scopePos(v);
        if (p < 0) throw std::invalid_argument("aligned_rel: missing variable " + v);
        perm.push_back(p);
    }
    return src.rel.projected(perm);
}

}  // namespace

std::vector<std::vector<char>> SelectionMatrix::pattern() const {
    std::vector<std::vector<char>> p(dom_size, std::vector<char>(dom_size, 0));
    for (int a = 0; a < dom_size; ++a)
        for (int b = 0; b < dom_size; ++b) p[a][b] = entries[a][b].rel.empty() ? 0 : 1;
    return p;
}

SelectionMatrix selection_matrix(const Constraint& c, const std::string& x, const std::string& y) {
    if (x == y) throw std::invalid_argument("selection_matrix: x == y");
    int px = c.scopePos(x), py = c.scopePos(y);
    if (px < 0 || py < 0) throw std::invalid_argument("selection_matrix: unknown variable");
    int domSize = 0;
    for (const auto& t : c.rel.tuples)
        for (Value v : t) domSize = std::max(domSize, v + 1);
    // Domain size is not stored in Relation; infer an upper bound from the
    // scope via the caller. We take max(value)+1 but never below 1; callers
    // that need the true |D| should use the formula-aware paths.
    domSize = std::max(domSize, 1);
    SelectionMatrix m;
    m.row_var = x;
    m.col_var = y;
    m.dom_size = domSize;
    std::vector<std::string> rest;
    for (const auto& v : c.scope)
        if (v != x && v != y) rest.push_back(v);
    m.entries.assign(domSize, std::vector<Constraint>(domSize));
    for (Value a = 0; a < domSize; ++a)
        for (Value b = 0; b < domSize; ++b)
            m.entries[a][b] = project(select(select(c, x, {a}), y, {b}), rest);
    return m;
}

GridBlocks grid_blocks(const std::vector<std::vector<char>>& nonempty) {
    GridBlocks out;
    int nr = (int)nonempty.size();
    int nc = nr ? (int)nonempty[0].size() : 0;
    // Rows with equal non-empty column sets form blocks; properness holds iff
    // any two rows have equal or disjoint column sets (equivalent to the
    // 2x2-submatrix characterization).
    auto colset = [&](int r) {
        std::vector<int> s;
        for (int c = 0; c < nc; ++c)
            if (nonempty[r][c]) s.push_back(c);
        return s;
    };
    std::vector<std::vector<int>> sets(nr);
    for (int r = 0; r < nr; ++r) sets[r] = colset(r);
    for (int r = 0; r < nr; ++r) {
        if (sets[r].empty()) continue;
        for (int r2 = r + 1; r2 < nr; ++r2) {
            if (sets[r2].empty() || sets[r] == sets[r2]) continue;
            std::vector<int> inter;
            std::set_intersection(sets[r].begin(), sets[r].end(), sets[r2].begin(),
                                  sets[r2].end(), std::back_inserter(inter));
            if (inter.empty()) continue;
            // exactly-one-empty witness
            out.proper = false;
            int c = inter[0];
            std::vector<int> diff;
            std::set_difference(sets[r].begin(), sets[r].end(), sets[r2].begin(), sets[r2].end(),
                                std::back_inserter(diff));
            if (!diff.empty()) {
                out.witness = {r, r2, c, diff[0]};  // (r2, diff) is the empty cell
            } else {
                std::set_difference(sets[r2].begin(), sets[r2].end(), sets[r].begin(),
                                    sets[r].end(), std::back_inserter(diff));
                out.witness = {r2, r, c, diff[0]};  // (r, diff) is the empty cell
            }
            return out;
        }
    }
    out.proper = true;
    std::vector<char> used(nr, 0);
    for (int r = 0; r < nr; ++r) {
        if (used[r] || sets[r].empty()) continue;
        Block b;
        b.cols = sets[r];
        for (int r2 = r; r2 < nr; ++r2)
            if (!used[r2] && sets[r2] == sets[r]) {
                used[r2] = 1;
                b.rows.push_back(r2);
            }
        out.partition.blocks.push_back(std::move(b));
    }
    return out;
}

GridBlocks proper_block_partition(const SelectionMatrix& m) { return grid_blocks(m.pattern()); }

bool is_decomposable_wrt(const Constraint& c, const FactorPartition& p) {
    // validate partition
    size_t total = 0;
    for (const auto& cls : p) {
        if (cls.empty()) throw std::invalid_argument("empty partition class");
        for (const auto& v : cls) {
            if (c.scopePos(v) < 0) throw std::invalid_argument("partition var not in scope");
            ++total;
        }
    }
    if (total != c.scope.size()) throw std::invalid_argument("partition does not cover scope");

    unsigned long long prod = 1;
    std::vector<Constraint> projs;
    for (const auto& cls : p) {
        projs.push_back(project(c, cls));
        prod *= projs.back().rel.size();
    }
    bool byCount = (prod == (unsigned long long)c.rel.size());
    // Independent set check (the product always contains c). Cross-asserted
    // whenever the product stays small.
    if (prod <= 100000) {
        Constraint acc = projs[0];
        for (size_t i = 1; i < projs.size(); ++i) acc = conjoin(acc, projs[i]);
        bool bySet = (aligned_rel(acc, c.scope) == c.rel);
        if (bySet != byCount) throw std::logic_error("decomposability checks disagree");
    }
    return byCount;
}

namespace {

// subsets of {0..n-1} ordered by (size, numeric value); excludes empty and full
std::vector<unsigned> proper_subsets(int n) {
    std::vector<unsigned> subs;
    for (unsigned m = 1; m + 1 < (1u << n); ++m) subs.push_back(m);
    std::stable_sort(subs.begin(), subs.end(), [](unsigned a, unsigned b) {
        int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        if (pa != pb) return pa < pb;
        return a < b;
    });
    return subs;
}

FactorPartition brute_factors(const Constraint& c) {
    int k = (int)c.scope.size();
    if (k <= 1) return k == 0 ? FactorPartition{} : FactorPartition{{c.scope[0]}};
    // bipartitions with scope[0] on the V side, increasing |V|
    for (unsigned mask : proper_subsets(k)) {
        if (!(mask & 1u)) continue;
        std::vector<std::string> V, W;
        for (int i = 0; i < k; ++i) ((mask >> i) & 1u ? V : W).push_back(c.scope[i]);
        if (is_decomposable_wrt(c, {V, W})) {
            FactorPartition left = brute_factors(project(c, V));
            FactorPartition right = brute_factors(project(c, W));
            left.insert(left.end(), right.begin(), right.end());
            return left;
        }
    }
    return {c.scope};
}

// Graph method: edge between p and q iff M_{p,q} has >= 2 non-empty blocks;
// factors = connected components. Valid under strong blockwise
// decomposability.
FactorPartition graph_factors(const Constraint& c, int domSize) {
    int k = (int)c.scope.size();
    std::vector<int> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            std::vector<std::vector<char>> pat(domSize, std::vector<char>(domSize, 0));
            for (const auto& t : c.rel.tuples) pat[t[i]][t[j]] = 1;
            GridBlocks gb = grid_blocks(pat);
            bool edge = !gb.proper || gb.partition.blocks.size() >= 2;
            if (edge) parent[find(i)] = find(j);
        }
    std::map<int, std::vector<std::string>> comps;
    for (int i = 0; i < k; ++i) comps[find(i)].push_back(c.scope[i]);
    FactorPartition out;
    for (auto& [root, cls] : comps) {
        (void)root;
        out.push_back(cls);
    }
    return out;
}

std::vector<std::vector<char>> pair_pattern(const Constraint& c, int px, int py, int domSize) {
    std::vector<std::vector<char>> pat(domSize, std::vector<char>(domSize, 0));
    for (const auto& t : c.rel.tuples) pat[t[px]][t[py]] = 1;
    return pat;
}

int infer_dom(const Constraint& c) {
    int d = 1;
    for (const auto& t : c.rel.tuples)
        for (Value v : t) d = std::max(d, v + 1);
    return d;
}

FactorPartition canon_partition(FactorPartition p) {
    for (auto& cls : p) std::sort(cls.begin(), cls.end());
    std::sort(p.begin(), p.end());
    return p;
}

}  // namespace

FactorPartition graph_factors(const Constraint& c) { return graph_factors(c, infer_dom(c)); }

FactorPartition indecomposable_factors(const Constraint& c, bool cross_check) {
    FactorPartition brute = brute_factors(c);
    if (cross_check && c.scope.size() >= 2 && c.scope.size() <= 6 && !c.rel.empty()) {
        int domSize = infer_dom(c);
        bool allProper = true, allBW = true;
        for (size_t i = 0; i < c.scope.size() && allProper; ++i)
            for (size_t j = i + 1; j < c.scope.size() && allProper; ++j) {
                if (!grid_blocks(pair_pattern(c, (int)i, (int)j, domSize)).proper)
                    allProper = false;
                else if (allBW &&
                         !is_blockwise_decomposable(c, c.scope[i], c.scope[j]).yes)
                    allBW = false;
            }
        // The graph method is guaranteed only under blockwise decomposability
        // in every pair; cross-assert exactly there.
        if (allProper && allBW) {
            FactorPartition g = graph_factors(c, domSize);
            if (canon_partition(g) != canon_partition(brute))
                throw std::logic_error("factor computations disagree");
        }
    }
    return brute;
}

namespace {

BlockwiseVerdict blockwise_core(const Constraint& c, const std::string& x, const std::string& y,
                                bool uniform) {
    int px = c.scopePos(x), py = c.scopePos(y);
    if (px < 0 || py < 0 || x == y)
        throw std::invalid_argument("blockwise: bad pivot pair");
    int domSize = infer_dom(c);
    BlockwiseVerdict v;
    GridBlocks gb = grid_blocks(pair_pattern(c, px, py, domSize));
    if (!gb.proper) {
        v.yes = false;
        v.reason = BlockwiseVerdict::NOT_PROPER;
        v.witness = gb.witness;
        return v;
    }
    v.blocks = gb.partition;
    std::vector<std::string> rest;
    for (const auto& s : c.scope)
        if (s != x && s != y) rest.push_back(s);
    int n = (int)rest.size();

    std::vector<Constraint> blockCons;
    for (const auto& b : gb.partition.blocks)
        blockCons.push_back(select(select(c, x, b.rows), y, b.cols));

    auto splitOf = [&](unsigned mask) {
        std::vector<std::string> V{x}, W{y};
        for (int i = 0; i < n; ++i) ((mask >> i) & 1u ? V : W).push_back(rest[i]);
        return std::make_pair(V, W);
    };
    std::vector<unsigned> masks;
    for (unsigned m = 0; m < (1u << n); ++m) masks.push_back(m);
    std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
        int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        if (pa != pb) return pa < pb;
        return a < b;
    });

    if (uniform) {
        for (unsigned m : masks) {
            auto [V, W] = splitOf(m);
            bool all = true;
            for (const auto& bc : blockCons)
                if (!is_decomposable_wrt(bc, {V, W})) { all = false; break; }
            if (all) {
                v.yes = true;
                for (size_t i = 0; i < blockCons.size(); ++i) v.partitions.push_back({V, W});
                return v;
            }
        }
        v.yes = false;
        v.reason = BlockwiseVerdict::UNSPLITTABLE_BLOCK;
        return v;
    }
    for (size_t bi = 0; bi < blockCons.size(); ++bi) {
        bool found = false;
        for (unsigned m : masks) {
            auto [V, W] = splitOf(m);
            if (is_decomposable_wrt(blockCons[bi], {V, W})) {
                v.partitions.push_back({V, W});
                found = true;
                break;
            }
        }
        if (!found) {
            v.yes = false;
            v.reason = BlockwiseVerdict::UNSPLITTABLE_BLOCK;
            v.block_index = (int)bi;
            return v;
        }
    }
    v.yes = true;
    return v;
}

}  // namespace

BlockwiseVerdict is_blockwise_decomposable(const Constraint& c, const std::string& x,
                                           const std::string& y) {
    return blockwise_core(c, x, y, false);
}

BlockwiseVerdict is_uniformly_blockwise_decomposable(const Constraint& c, const std::string& x,
                                                     const std::string& y) {
    return blockwise_core(c, x, y, true);
}

Constraint relation_constraint(const Relation& r) {
    std::vector<std::string> scope;
    for (int i = 0; i < r.arity; ++i) scope.push_back("x" + std::to_string(i + 1));
    Constraint c;
    c.scope = scope;
    c.rel = r;
    return c;
}

bool is_relation_blockwise_decomposable(const Relation& r) {
    Constraint c = relation_constraint(r);
    for (size_t i = 0; i < c.scope.size(); ++i)
        for (size_t j = i + 1; j < c.scope.size(); ++j)
            if (!is_blockwise_decomposable(c, c.scope[i], c.scope[j]).yes) return false;
    return true;
}

bool is_relation_uniformly_blockwise_decomposable(const Relation& r) {
    Constraint c = relation_constraint(r);
    for (size_t i = 0; i < c.scope.size(); ++i)
        for (size_t j = i + 1; j < c.scope.size(); ++j)
            if (!is_uniformly_blockwise_decomposable(c, c.scope[i], c.scope[j]).yes) return false;
    return true;
}

bool is_blockwise_set_decomposable(const Relation& r, int arity_cap) {
    if (r.arity > arity_cap) throw std::invalid_argument("set-decomposability arity cap exceeded");
    Constraint c = relation_constraint(r);
    int k = r.arity;
    int domSize = infer_dom(c);
    // iterate unordered pairs of disjoint non-empty variable subsets
    for (unsigned mx = 1; mx < (1u << k); ++mx) {
        for (unsigned my = 1; my < (1u << k); ++my) {
            if (mx & my) continue;
            if ((my & -my) < (mx & -mx)) continue;  // unordered: smallest var in mx
            std::vector<int> X, Y;
            for (int i = 0; i < k; ++i) {
                if ((mx >> i) & 1u) X.push_back(i);
                if ((my >> i) & 1u) Y.push_back(i);
            }
            // generalized matrix over assignment tuples
            int nr = 1, nc = 1;
            for (size_t i = 0; i < X.size(); ++i) nr *= domSize;
            for (size_t i = 0; i < Y.size(); ++i) nc *= domSize;
            auto rank = [&](const Tuple& t, const std::vector<int>& S) {
                int idx = 0;
                for (int p : S) idx = idx * domSize + t[p];
                return idx;
            };
            std::vector<std::vector<char>> pat(nr, std::vector<char>(nc, 0));
            for (const auto& t : r.tuples) pat[rank(t, X)][rank(t, Y)] = 1;
            GridBlocks gb = grid_blocks(pat);
            if (!gb.proper) return false;
            for (const auto& b : gb.partition.blocks) {
                // restrict to the block by assignment membership
                std::vector<char> inRows(nr, 0), inCols(nc, 0);
                for (int ri : b.rows) inRows[ri] = 1;
                for (int ci : b.cols) inCols[ci] = 1;
                Constraint bc;
                bc.scope = c.scope;
                bc.rel.arity = k;
                for (const auto& t : r.tuples)
                    if (inRows[rank(t, X)] && inCols[rank(t, Y)]) bc.rel.tuples.push_back(t);
                bc.rel.canonicalize();
                FactorPartition fp = indecomposable_factors(bc, false);
                for (const auto& cls : fp) {
                    bool hasX = false, hasY = false;
                    for (const auto& vn : cls) {
                        int p = c.scopePos(vn);
                        if ((mx >> p) & 1u) hasX = true;
                        if ((my >> p) & 1u) hasY = true;
                    }
                    if (hasX && hasY) return false;
                }
            }
        }
    }
    return true;
}

CountMatrix count_matrix(const Relation& r, const std::vector<int>& xp,
                         const std::vector<int>& yp) {
    Constraint c = relation_constraint(r);
    int domSize = infer_dom(c);
    int nr = 1, nc = 1;
    for (size_t i = 0; i < xp.size(); ++i) nr *= domSize;
    for (size_t i = 0; i < yp.size(); ++i) nc *= domSize;
    auto rank = [&](const Tuple& t, const std::vector<int>& S) {
        int idx = 0;
        for (int p : S) idx = idx * domSize + t[p];
        return idx;
    };
    auto unrank = [&](int idx, size_t len) {
        Tuple t(len);
        for (int i = (int)len - 1; i >= 0; --i) {
            t[i] = idx % domSize;
            idx /= domSize;
        }
        return t;
    };
    CountMatrix m;
    for (int i = 0; i < nr; ++i) m.row_assignments.push_back(unrank(i, xp.size()));
    for (int j = 0; j < nc; ++j) m.col_assignments.push_back(unrank(j, yp.size()));
    m.entries.assign(nr, std::vector<unsigned long long>(nc, 0));
    for (const auto& t : r.tuples) ++m.entries[rank(t, xp)][rank(t, yp)];
    return m;
}

bool is_balanced(const Relation& r, const std::vector<int>& xp, const std::vector<int>& yp) {
    CountMatrix m = count_matrix(r, xp, yp);
    int nr = (int)m.entries.size(), nc = nr ? (int)m.entries[0].size() : 0;
    std::vector<std::vector<char>> pat(nr, std::vector<char>(nc, 0));
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) pat[i][j] = m.entries[i][j] ? 1 : 0;
    GridBlocks gb = grid_blocks(pat);
    if (!gb.proper) return false;
    for (const auto& b : gb.partition.blocks) {
        int a0 = b.rows[0], b0 = b.cols[0];
        for (int a : b.rows)
            for (int c : b.cols)
                if (m.entries[a][c] * m.entries[a0][b0] != m.entries[a][b0] * m.entries[a0][c])
                    return false;
    }
    return true;
}

bool binarize_identity_holds(const Constraint& c) {
    auto projs = binary_projections(c);
    Constraint acc;
    acc.rel.arity = 0;
    acc.rel.tuples = {Tuple{}};
    for (const auto& p : projs)
        if (!p.scope.empty()) acc = conjoin(acc, p);
    if (c.scope.empty()) return acc.rel.size() == c.rel.size();
    return aligned_rel(acc, c.scope) == c.rel;
}

}  // namespace blockdd
