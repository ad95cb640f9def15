#include "blockdd/coclone.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace blockdd {

namespace {

long long ipow_capped(long long base, int exp, long long cap) {
    long long r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > cap / std::max<long long>(base, 1)) return cap + 1;
        r *= base;
    }
    return r;
}

std::string var_name(long long idx) { return "v" + std::to_string(idx); }
std::string pool_name(int idx) { return "x" + std::to_string(idx); }

// Indicator instance for m-ary polymorphisms of g: one variable per m-vector
// over D, one constraint S(v_1..v_k) for every scope whose rows all lie in S.
Formula indicator_formula(const Language& g, int m) {
    int d = g.domain->size();
    long long n = 1;
    for (int i = 0; i < m; ++i) n *= d;
    std::vector<Tuple> vecs((size_t)n, Tuple(m));
    for (long long idx = 0; idx < n; ++idx) {
        long long v = idx;
        for (int i = m - 1; i >= 0; --i) {
            vecs[idx][i] = (Value)(v % d);
            v /= d;
        }
    }
    Formula f;
    f.domain = g.domain;
    for (long long idx = 0; idx < n; ++idx) f.variables.push_back(var_name(idx));
    std::set<std::string> dedup;
    for (const auto& s : g.relations) {
        if (s.empty()) continue;
        if ((long long)s.size() == ipow_capped(d, s.arity, 1LL << 62)) continue;  // full: vacuous
        int k = s.arity;
        std::vector<long long> w(k, 0);
        while (true) {
            bool ok = true;
            Tuple row(k);
            for (int i = 0; i < m && ok; ++i) {
                for (int j = 0; j < k; ++j) row[j] = vecs[w[j]][i];
                ok = s.contains(row);
            }
            if (ok) {
                std::vector<std::string> scope;
                for (int j = 0; j < k; ++j) scope.push_back(var_name(w[j]));
                Constraint c(scope, s);
                std::string key;
                for (const auto& v : c.scope) key += v + ",";
                key += relation_key(c.rel);
                if (dedup.insert(key).second) f.constraints.push_back(std::move(c));
            }
            int p = k - 1;
            while (p >= 0 && w[p] == n - 1) w[p--] = 0;
            if (p < 0) break;
            ++w[p];
        }
    }
    return f;
}

// Decide membership of non-empty r against a prebuilt indicator instance.
bool member_core(const Relation& r, const Language& g, const Formula& f) {
    int d = g.domain->size();
    int m = (int)r.size(), k = r.arity;
    // column j of r as an m-vector index
    std::vector<long long> col(k);
    for (int j = 0; j < k; ++j) {
        long long idx = 0;
        for (int i = 0; i < m; ++i) idx = idx * d + r.tuples[i][j];
        col[j] = idx;
    }
    // r is contained in the projection (coordinate maps are polymorphisms);
    // membership holds iff no tuple outside r is projectable.
    Tuple t(k, 0);
    while (true) {
        if (!r.contains(t)) {
            Assignment a;
            bool conflict = false;
            for (int j = 0; j < k && !conflict; ++j) {
                auto it = a.find(var_name(col[j]));
                if (it == a.end())
                    a[var_name(col[j])] = t[j];
                else if (it->second != t[j])
                    conflict = true;
            }
            if (!conflict && satisfiable(f, a)) return false;
        }
        int p = k - 1;
        while (p >= 0 && t[p] == d - 1) t[p--] = 0;
        if (p < 0) break;
        ++t[p];
    }
    return true;
}

bool membership_within_budget(const Language& g, int m, const MembershipBudget& budget) {
    int d = g.domain->size();
    long long n = ipow_capped(d, m, budget.max_indicator_vars);
    if (n > budget.max_indicator_vars) return false;
    for (const auto& s : g.relations)
        if (ipow_capped(n, s.arity, budget.max_scope_tuples) > budget.max_scope_tuples)
            return false;
    return true;
}

bool has_constant_polymorphism(const Language& g) {
    int d = g.domain->size();
    for (Value c = 0; c < d; ++c) {
        bool ok = true;
        for (const auto& s : g.relations)
            if (!s.empty() && !s.contains(Tuple(s.arity, c))) {
                ok = false;
                break;
            }
        if (ok) return true;
    }
    return false;
}

// The empty relation is pp-definable iff some instance is unsatisfiable,
// which over a finite language happens iff no constant polymorphism exists.
bool empty_definable(const Language& g) {
    for (const auto& s : g.relations)
        if (s.empty()) return true;
    return !has_constant_polymorphism(g);
}

bool is_full(const Relation& r, int d) {
    return (long long)r.size() == ipow_capped(d, r.arity, 1LL << 62);
}

}  // namespace

std::string language_key(const Language& g) {
    std::vector<std::string> keys;
    for (const auto& r : g.relations) keys.push_back(relation_key(r));
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    std::string out = "D" + std::to_string(g.domain->size()) + "|";
    for (const auto& k : keys) out += k + ";";
    return out;
}

Membership coclone_member(const Relation& r, const Language& g, const MembershipBudget& budget) {
    if (r.empty()) throw std::invalid_argument("coclone_member: empty relation");
    int m = (int)r.size();
    if (!membership_within_budget(g, m, budget)) return Membership::BUDGET_EXCEEDED;
    if (ipow_capped(g.domain->size(), r.arity, 1000000) > 1000000)
        return Membership::BUDGET_EXCEEDED;
    Formula f = indicator_formula(g, m);
    return member_core(r, g, f) ? Membership::YES : Membership::NO;
}

namespace {

// ---- saturation route ----

struct Saturation {
    int bound;
    size_t cap;
    std::map<std::string, Relation> seen;
    std::deque<Relation> work;
    bool overflow = false;

    void add(const Relation& r) {
        if (r.arity == 0 || r.arity > bound) return;
        if (r.empty()) {
            add_canonical_empty();
            return;
        }
        if (seen.size() >= cap) {
            overflow = true;
            return;
        }
        auto [it, fresh] = seen.emplace(relation_key(r), r);
        if (fresh) work.push_back(r);
    }

    void add_canonical_empty() {
        for (int k = 1; k <= 2; ++k) {
            Relation e;
            e.arity = k;
            auto [it, fresh] = seen.emplace(relation_key(e), e);
            if (fresh) work.push_back(e);
        }
    }
};

// All arity-preserving maps sigma: [k] -> [pool] as flat digit vectors.
void for_each_map(int k, int pool, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> sigma(k, 0);
    while (true) {
        fn(sigma);
        int p = k - 1;
        while (p >= 0 && sigma[p] == pool - 1) sigma[p--] = 0;
        if (p < 0) return;
        ++sigma[p];
    }
}

Relation identify(const Relation& r, const std::vector<int>& sigma) {
    std::vector<std::string> scope;
    for (int s : sigma) scope.push_back(pool_name(s));
    return Constraint(scope, r).rel;
}

// Ordered injective placements of k variables into pool positions.
void for_each_placement(int k, int pool, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> sel;
    std::vector<char> used(pool, 0);
    std::function<void()> rec = [&]() {
        if ((int)sel.size() == k) {
            fn(sel);
            return;
        }
        for (int i = 0; i < pool; ++i) {
            if (used[i]) continue;
            used[i] = 1;
            sel.push_back(i);
            rec();
            sel.pop_back();
            used[i] = 0;
        }
    };
    rec();
}

Pi2Result pi2_saturation(const Language& g, const Pi2Budget& budget) {
    int d = g.domain->size();
    int bound = std::max(2, budget.aux_arity_bound);

    // Base atoms: every variable-identification pattern of each language
    // relation, plus equality and the full/trivial relations.
    std::vector<Relation> base{Relation::equality(d), Relation::full(1, d), Relation::full(2, d)};
    for (const auto& r : g.relations) {
        int k = r.arity;
        int pool = std::min(k, bound);
        if (k == 0) continue;
        if (ipow_capped(pool, k, 1000000) <= 1000000) {
            for_each_map(k, pool, [&](const std::vector<int>& sigma) {
                Relation ident = identify(r, sigma);
                if (ident.arity <= bound) base.push_back(ident);
            });
        } else {
            Constraint c = relation_constraint(r);
            for (const auto& p : binary_projections(c))
                if (!p.scope.empty()) base.push_back(p.rel);
        }
    }
    std::sort(base.begin(), base.end());
    base.erase(std::unique(base.begin(), base.end()), base.end());

    Saturation sat;
    sat.bound = bound;
    sat.cap = budget.max_relations;

    // Outer rounds let derived small-arity relations act as new atoms.
    size_t base_size = 0;
    while (base.size() != base_size && !sat.overflow) {
        base_size = base.size();
        sat.seen.clear();
        sat.work.clear();
        for (const auto& b : base) sat.add(b);
        while (!sat.work.empty() && !sat.overflow) {
            Relation a = std::move(sat.work.front());
            sat.work.pop_front();
            int ka = a.arity;
            // permutations / identifications
            if (ipow_capped(ka, ka, 100000) <= 100000)
                for_each_map(ka, ka, [&](const std::vector<int>& sigma) { sat.add(identify(a, sigma)); });
            // order-preserving projections
            for (unsigned mask = 1; mask + 1 < (1u << ka); ++mask) {
                std::vector<int> pos;
                for (int i = 0; i < ka; ++i)
                    if ((mask >> i) & 1u) pos.push_back(i);
                sat.add(a.projected(pos));
            }
            // conjunction with a base atom over a shared pool of `bound` vars
            if (a.empty() || is_full(a, d)) continue;
            Constraint ca;
            for (int i = 0; i < ka; ++i) ca.scope.push_back(pool_name(i));
            ca.rel = a;
            for (const auto& b : base) {
                if (b.empty() || (is_full(b, d) && b.arity >= 2)) continue;
                for_each_placement(b.arity, bound, [&](const std::vector<int>& sel) {
                    bool overlap = false;
                    for (int s : sel) overlap |= (s < ka);
                    if (!overlap && !(ka <= 1 && b.arity <= 1)) return;
                    std::vector<std::string> scope;
                    for (int s : sel) scope.push_back(pool_name(s));
                    sat.add(conjoin(ca, Constraint(scope, b)).rel);
                });
            }
        }
        // promote derived unary/binary members to atoms
        std::vector<Relation> next = base;
        for (const auto& [key, r] : sat.seen) {
            (void)key;
            if (r.arity <= 2) next.push_back(r);
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        base = std::move(next);
    }

    Pi2Result out;
    out.certified = false;
    out.fixed_point = !sat.overflow;
    out.g2.domain = g.domain;
    std::vector<Relation> members;
    for (const auto& [key, r] : sat.seen) {
        (void)key;
        if (r.arity >= 1 && r.arity <= 2) members.push_back(r);
    }
    std::sort(members.begin(), members.end());
    for (size_t i = 0; i < members.size(); ++i)
        out.g2.add("P" + std::to_string(i), members[i]);
    return out;
}

Pi2Result pi2_exact(const Language& g, const Pi2Budget& budget) {
    int d = g.domain->size();
    Pi2Result out;
    out.certified = true;
    out.fixed_point = true;
    out.g2.domain = g.domain;
    std::map<int, Formula> indicators;  // by tuple count m
    std::vector<Relation> members;
    auto consider = [&](const Relation& cand) {
        int m = (int)cand.size();
        auto it = indicators.find(m);
        if (it == indicators.end()) it = indicators.emplace(m, indicator_formula(g, m)).first;
        if (member_core(cand, g, it->second)) members.push_back(cand);
    };
    for (unsigned mask = 1; mask < (1u << d); ++mask) {
        std::vector<Value> vals;
        for (int v = 0; v < d; ++v)
            if ((mask >> v) & 1u) vals.push_back(v);
        consider(Relation::unary(vals));
    }
    int cells = d * d;
    for (unsigned mask = 1; mask < (1u << cells); ++mask) {
        std::vector<Tuple> ts;
        for (int c = 0; c < cells; ++c)
            if ((mask >> c) & 1u) ts.push_back({c / d, c % d});
        consider(Relation(2, std::move(ts)));
    }
    if (empty_definable(g)) {
        Relation e1, e2;
        e1.arity = 1;
        e2.arity = 2;
        members.push_back(e1);
        members.push_back(e2);
    }
    std::sort(members.begin(), members.end());
    for (size_t i = 0; i < members.size(); ++i)
        out.g2.add("P" + std::to_string(i), members[i]);
    return out;
}

}  // namespace

Pi2Result pi2_closure(const Language& g, const Pi2Budget& budget) {
    if (budget.aux_arity_bound < 2) throw std::invalid_argument("pi2_closure: bound < 2");
    int d = g.domain->size();
    if (d == 2) {
        // candidates have at most d*d = 4 tuples
        bool ok = true;
        for (int m = 1; m <= 4 && ok; ++m) ok = membership_within_budget(g, m, budget.membership);
        if (ok) return pi2_exact(g, budget);
    }
    return pi2_saturation(g, budget);
}

std::optional<IncompatibleBlocksWitness> has_incompatible_block_structure(const Language& g2) {
    struct Version {
        int index;
        bool transposed;
        std::vector<std::vector<int>> zblocks;  // column-side block value sets
    };
    std::vector<Version> versions;
    for (size_t i = 0; i < g2.relations.size(); ++i) {
        const Relation& r = g2.relations[i];
        if (r.arity != 2 || r.empty()) continue;
        int d = 0;
        for (const auto& t : r.tuples) d = std::max({d, t[0] + 1, t[1] + 1});
        for (int tr = 0; tr < 2; ++tr) {
            Relation v = tr ? r.transposed() : r;
            std::vector<std::vector<char>> pat(d, std::vector<char>(d, 0));
            for (const auto& t : v.tuples) pat[t[0]][t[1]] = 1;
            GridBlocks gb = grid_blocks(pat);
            if (!gb.proper) continue;  // flagged elsewhere as non-decomposable
            Version ver{(int)i, tr == 1, {}};
            for (const auto& b : gb.partition.blocks) ver.zblocks.push_back(b.cols);
            versions.push_back(std::move(ver));
        }
    }
    auto intersects = [](const std::vector<int>& a, const std::vector<int>& b) {
        std::vector<int> out;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        return !out.empty();
    };
    for (const auto& v1 : versions)
        for (const auto& v2 : versions)
            for (size_t i = 0; i < v1.zblocks.size(); ++i)
                for (size_t j = i + 1; j < v1.zblocks.size(); ++j)
                    for (size_t k = 0; k < v2.zblocks.size(); ++k)
                        for (size_t l = k + 1; l < v2.zblocks.size(); ++l) {
                            const auto &A = v1.zblocks[i], &B = v1.zblocks[j];
                            const auto &C = v2.zblocks[k], &D = v2.zblocks[l];
                            if (intersects(A, C) && intersects(A, D) && intersects(B, C) &&
                                intersects(B, D)) {
                                IncompatibleBlocksWitness w;
                                w.rel1 = v1.index;
                                w.rel2 = v2.index;
                                w.transpose1 = v1.transposed;
                                w.transpose2 = v2.transposed;
                                w.A = A;
                                w.B = B;
                                w.C = C;
                                w.D = D;
                                return w;
                            }
                        }
    return std::nullopt;
}

namespace {

// Close the binary members of g2 under transpose, intersection and
// restriction by the unary members.
std::vector<Relation> binary_sweep_closure(const Language& g2) {
    int d = g2.domain->size();
    std::vector<Relation> unaries{Relation::full(1, d)};
    std::set<Relation> bins{Relation::full(2, d), Relation::equality(d)};
    for (const auto& r : g2.relations) {
        if (r.arity == 1) unaries.push_back(r);
        if (r.arity == 2) bins.insert(r);
    }
    std::deque<Relation> work(bins.begin(), bins.end());
    auto add = [&](const Relation& r) {
        if (bins.insert(r).second) work.push_back(r);
    };
    while (!work.empty()) {
        if (bins.size() > 4096) throw std::runtime_error("binary closure too large");
        Relation a = std::move(work.front());
        work.pop_front();
        add(a.transposed());
        Constraint ca({"x", "y"}, a);
        for (const auto& u : unaries) {
            std::vector<Value> vals;
            for (const auto& t : u.tuples) vals.push_back(t[0]);
            add(select(ca, "x", vals).rel);
            add(select(ca, "y", vals).rel);
        }
        std::vector<Relation> snapshot(bins.begin(), bins.end());
        for (const auto& b : snapshot) {
            std::vector<Tuple> inter;
            std::set_intersection(a.tuples.begin(), a.tuples.end(), b.tuples.begin(),
                                  b.tuples.end(), std::back_inserter(inter));
            add(Relation(2, std::move(inter)));
        }
    }
    return {bins.begin(), bins.end()};
}

}  // namespace

std::optional<TripleWitness> ternary_conjunction_sweep(const Language& g2, SweepMode mode) {
    std::vector<Relation> bins = binary_sweep_closure(g2);
    const std::vector<std::pair<std::string, std::string>> pairs{
        {"x", "y"}, {"x", "z"}, {"y", "z"}};
    for (const auto& rxy : bins)
        for (const auto& rxz : bins)
            for (const auto& ryz : bins) {
                Constraint c = conjoin(conjoin(Constraint({"x", "y"}, rxy),
                                               Constraint({"x", "z"}, rxz)),
                                       Constraint({"y", "z"}, ryz));
                for (const auto& [p, q] : pairs) {
                    BlockwiseVerdict v = mode == SweepMode::UNIFORM
                                             ? is_uniformly_blockwise_decomposable(c, p, q)
                                             : is_blockwise_decomposable(c, p, q);
                    if (!v.yes) return TripleWitness{rxy, rxz, ryz, p, q};
                }
            }
    return std::nullopt;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::UNIFORM_ODD: return "UNIFORM_ODD";
        case Verdict::NONUNIFORM_FDD: return "NONUNIFORM_FDD";
        case Verdict::HARD: return "HARD";
        default: return "UNKNOWN_BUDGET";
    }
}

LanguageClass classify_language(const Language& g, const Pi2Budget& budget,
                                ClassifyCache* cache) {
    std::string gkey = language_key(g);
    if (cache) {
        auto it = cache->by_language.find(gkey);
        if (it != cache->by_language.end()) return it->second;
    }
    LanguageClass out;
    Pi2Result pi2 = pi2_closure(g, budget);
    out.g2 = pi2.g2;
    out.pi2_certified = pi2.certified;
    auto finish = [&](LanguageClass& lc) {
        if (cache) cache->by_language[gkey] = lc;
        return lc;
    };
    if (!pi2.fixed_point) {
        out.verdict = Verdict::UNKNOWN_BUDGET;
        out.note = "binary closure budget exceeded; partial closure reported";
        return finish(out);
    }

    // Each input relation must equal the conjunction of its binary
    // projections; failure means it is not blockwise decomposable.
    for (size_t i = 0; i < g.relations.size(); ++i) {
        if (!binarize_identity_holds(relation_constraint(g.relations[i]))) {
            out.verdict = Verdict::HARD;
            out.hard_relation = g.relations[i];
            out.hard_input_index = (int)i;
            out.hard_definition =
                "input relation exceeds the conjunction of its binary projections";
            return finish(out);
        }
    }

    // Every binary member of the closure must itself be blockwise
    // decomposable (for binary relations: have a proper block matrix).
    for (size_t i = 0; i < out.g2.relations.size(); ++i) {
        const Relation& r = out.g2.relations[i];
        if (r.arity != 2 || r.empty()) continue;
        Constraint c = relation_constraint(r);
        if (!is_blockwise_decomposable(c, c.scope[0], c.scope[1]).yes) {
            out.verdict = Verdict::HARD;
            out.hard_relation = r;
            out.hard_definition = "binary member " + out.g2.names[i] +
                                  " of the binary closure has no proper block structure";
            return finish(out);
        }
    }

    std::string g2key = language_key(out.g2);
    std::optional<IncompatibleBlocksWitness> inc;
    if (cache && cache->incompat_scan.count(g2key)) {
        inc = cache->incompat_scan.at(g2key);
    } else {
        inc = has_incompatible_block_structure(out.g2);
        if (cache) cache->incompat_scan[g2key] = inc;
    }
    if (inc) {
        out.verdict = Verdict::HARD;
        out.incompatible = inc;
        const Relation& r1 = out.g2.relations[inc->rel1];
        const Relation& r2 = out.g2.relations[inc->rel2];
        Constraint t = conjoin(
            Constraint({"x", "z"}, inc->transpose1 ? r1.transposed() : r1),
            Constraint({"y", "z"}, inc->transpose2 ? r2.transposed() : r2));
        std::vector<int> perm{t.scopePos("x"), t.scopePos("y"), t.scopePos("z")};
        out.hard_relation = t.rel.projected(perm);
        out.hard_definition = "T(x,y,z) = " + out.g2.names[inc->rel1] + "(x,z) & " +
                              out.g2.names[inc->rel2] + "(y,z) from incompatible blocks";
        return finish(out);
    }

    std::optional<TripleWitness> fail;
    if (cache && cache->uniform_sweep.count(g2key)) {
        fail = cache->uniform_sweep.at(g2key);
    } else {
        fail = ternary_conjunction_sweep(out.g2, SweepMode::UNIFORM);
        if (cache) cache->uniform_sweep[g2key] = fail;
    }
    if (fail) {
        out.verdict = Verdict::NONUNIFORM_FDD;
        out.failing_triple = fail;
    } else {
        out.verdict = Verdict::UNIFORM_ODD;
    }
    return finish(out);
}

bool is_bijunctive_affine(const Relation& r) {
    for (const auto& t : r.tuples)
        for (Value v : t)
            if (v < 0 || v > 1) throw std::invalid_argument("is_bijunctive_affine: non-Boolean");
    int k = r.arity;
    // constraints from {=, !=, U_0, U_1} satisfied by every tuple of r
    std::vector<std::pair<int, int>> eq, neq;
    std::vector<int> u0, u1;
    for (int i = 0; i < k; ++i) {
        bool all0 = true, all1 = true;
        for (const auto& t : r.tuples) {
            all0 &= t[i] == 0;
            all1 &= t[i] == 1;
        }
        if (all0) u0.push_back(i);
        if (all1) u1.push_back(i);
        for (int j = i + 1; j < k; ++j) {
            bool alleq = true, allneq = true;
            for (const auto& t : r.tuples) {
                alleq &= t[i] == t[j];
                allneq &= t[i] != t[j];
            }
            if (alleq) eq.push_back({i, j});
            if (allneq) neq.push_back({i, j});
        }
    }
    std::vector<Tuple> sol;
    for (unsigned m = 0; m < (1u << k); ++m) {
        Tuple t(k);
        for (int i = 0; i < k; ++i) t[i] = (m >> i) & 1u;
        bool ok = true;
        for (int i : u0) ok &= t[i] == 0;
        for (int i : u1) ok &= t[i] == 1;
        for (auto [i, j] : eq) ok &= t[i] == t[j];
        for (auto [i, j] : neq) ok &= t[i] != t[j];
        if (ok) sol.push_back(t);
    }
    return Relation(k, std::move(sol)) == r;
}

Language parse_language(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Language g;
    auto strip = [](std::string s) {
        size_t h = s.find('#');
        if (h != std::string::npos) s = s.substr(0, h);
        size_t a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return std::string();
        size_t b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        line = strip(line);
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "domain:") {
            if (g.domain) throw std::invalid_argument("language: duplicate domain line");
            std::vector<std::string> syms;
            std::string s;
            while (ls >> s) syms.push_back(s);
            g.domain = Domain::make(syms);
        } else if (head == "rel") {
            if (!g.domain) throw std::invalid_argument("language: rel before domain");
            std::string name, ar;
            ls >> name >> ar;
            if (ar.rfind("arity=", 0) != 0)
                throw std::invalid_argument("language: expected arity=k");
            int k = std::stoi(ar.substr(6));
            std::vector<Tuple> ts;
            bool closed = false;
            while (std::getline(in, line)) {
                line = strip(line);
                if (line.empty()) continue;
                if (line == "end") {
                    closed = true;
                    break;
                }
                std::istringstream ts2(line);
                Tuple t;
                std::string sym;
                while (ts2 >> sym) t.push_back(g.domain->value(sym));
                if ((int)t.size() != k) throw std::invalid_argument("language: bad tuple arity");
                ts.push_back(std::move(t));
            }
            if (!closed) throw std::invalid_argument("language: missing end");
            g.add(name, Relation(k, std::move(ts)));
        } else {
            throw std::invalid_argument("language: unknown directive " + head);
        }
    }
    if (!g.domain) throw std::invalid_argument("language: missing domain");
    return g;
}

Language load_language(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_language(buf.str());
}

}  // namespace blockdd
