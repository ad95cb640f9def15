#include "blockdd/compilers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

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

std::vector<std::string> sorted_scope(const Constraint& c) {
    auto s = c.scope;
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace

UniformSplit find_uniform_split(const Constraint& c, const std::string& x, const std::string& y) {
    if (c.scopePos(x) < 0 || c.scopePos(y) < 0 || x == y)
        throw std::invalid_argument("find_uniform_split: bad pivot");
    std::set<std::string> vstar{x};
    if (c.arity() > 2) {
        SelectionMatrix m = selection_matrix(c, x, y);
        GridBlocks gb = proper_block_partition(m);
        if (!gb.proper) throw SplitFailedError("selection matrix of (" + x + "," + y + ") not proper");
        std::vector<FactorPartition> partitions;
        for (const auto& blk : gb.partition.blocks) {
            std::vector<Value> rows(blk.rows.begin(), blk.rows.end());
            std::vector<Value> cols(blk.cols.begin(), blk.cols.end());
            Constraint fi = select(select(c, x, rows), y, cols);
            // beyond brute-force reach, the graph route is safe here: a wrong
            // partition fails the projection-identity check below
            partitions.push_back(fi.scope.size() <= 10 ? indecomposable_factors(fi)
                                                       : graph_factors(fi));
        }
        // close {x} under "factor classes are never split"
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& rho : partitions)
                for (const auto& cls : rho) {
                    bool hit = false;
                    for (const auto& v : cls)
                        if (vstar.count(v)) hit = true;
                    if (!hit) continue;
                    for (const auto& v : cls)
                        if (vstar.insert(v).second) {
                            if (v == y)
                                throw SplitFailedError("pivot " + y + " absorbed into the " + x +
                                                       " side");
                            changed = true;
                        }
                }
        }
    }
    UniformSplit sp;
    sp.pivot = {x, y};
    for (const auto& v : c.scope) {
        if (v == x || v == y) continue;
        (vstar.count(v) ? sp.v_side : sp.w_side).push_back(v);
    }
    // the split must reproduce the constraint from three projections
    std::vector<std::string> xs{x};
    xs.insert(xs.end(), sp.v_side.begin(), sp.v_side.end());
    std::vector<std::string> ys{y};
    ys.insert(ys.end(), sp.w_side.begin(), sp.w_side.end());
    Constraint acc = conjoin(conjoin(project(c, xs), project(c, ys)), project(c, {x, y}));
    if (aligned_rel(acc, c.scope) != c.rel)
        throw SplitFailedError("split of (" + x + "," + y + ") fails the projection identity");
    return sp;
}

UniformSplit find_uniform_split(const Formula& f, const std::string& x, const std::string& y) {
    return find_uniform_split(constraint_of(f), x, y);
}

std::vector<std::string> StructureTree::neighbors(const std::string& v) const {
    std::vector<std::string> out;
    for (const auto& e : edges) {
        if (e.p == v) out.push_back(e.q);
        if (e.q == v) out.push_back(e.p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

const StructureTree::Edge& StructureTree::edge(const std::string& p, const std::string& q) const {
    for (const auto& e : edges)
        if ((e.p == p && e.q == q) || (e.p == q && e.q == p)) return e;
    throw std::invalid_argument("no tree edge {" + p + "," + q + "}");
}

StructureTree tree_structure(const Formula& f) {
    StructureTree t;
    t.vars = f.variables;
    std::vector<std::pair<std::string, std::string>> pairs;
    std::function<void(const Constraint&, const std::string&)> build =
        [&](const Constraint& c, const std::string& pivot) {
            if (c.arity() <= 1) return;
            auto names = sorted_scope(c);
            std::string x = pivot.empty() ? names[0] : pivot;
            std::string y;
            for (const auto& v : names)
                if (v != x) {
                    y = v;
                    break;
                }
            pairs.emplace_back(x, y);
            if (c.arity() == 2) return;
            UniformSplit sp = find_uniform_split(c, x, y);
            std::vector<std::string> xs{x};
            xs.insert(xs.end(), sp.v_side.begin(), sp.v_side.end());
            std::vector<std::string> ys{y};
            ys.insert(ys.end(), sp.w_side.begin(), sp.w_side.end());
            build(project(c, xs), x);
            build(project(c, ys), y);
        };
    build(constraint_of(f), "");
    int dsize = f.domain->size();
    for (const auto& [p, q] : pairs) {
        std::vector<Tuple> tuples;
        for (Value a = 0; a < dsize; ++a)
            for (Value b = 0; b < dsize; ++b)
                if (satisfiable(f, {{p, a}, {q, b}})) tuples.push_back({a, b});
        t.edges.push_back({p, q, Relation(2, std::move(tuples))});
    }
    return t;
}

std::string tree_to_dot(const StructureTree& t) {
    std::ostringstream out;
    out << "graph structure {\n";
    for (const auto& v : t.vars) out << "  \"" << v << "\";\n";
    for (const auto& e : t.edges) {
        out << "  \"" << e.p << "\" -- \"" << e.q << "\" [label=\"";
        for (size_t i = 0; i < e.rel.tuples.size(); ++i) {
            if (i) out << " ";
            out << e.rel.tuples[i][0] << e.rel.tuples[i][1];
        }
        out << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

namespace {

// Static decomposition of the structure tree: centroid first, then the
// remaining components ordered by smallest contained variable.
struct PlanNode {
    std::string z;
    std::set<std::string> vars;
    std::vector<int> children;
    // for non-root nodes: entry variable and the edge relation linking it to
    // the parent centroid, as (parent value, entry value) pairs
    std::string port;
    std::vector<std::vector<char>> portAllowed;  // [parent value][port value]
};

struct OddPlan {
    std::vector<PlanNode> nodes;
    int root = -1;
    std::vector<std::string> order;
};

std::vector<std::set<std::string>> tree_components(const StructureTree& t,
                                                   const std::set<std::string>& vars,
                                                   const std::string& removed) {
    std::set<std::string> left = vars;
    left.erase(removed);
    std::vector<std::set<std::string>> comps;
    while (!left.empty()) {
        std::set<std::string> comp;
        std::vector<std::string> stack{*left.begin()};
        while (!stack.empty()) {
            std::string v = stack.back();
            stack.pop_back();
            if (!left.count(v) || comp.count(v)) continue;
            comp.insert(v);
            for (const auto& w : t.neighbors(v))
                if (left.count(w) && !comp.count(w)) stack.push_back(w);
        }
        for (const auto& v : comp) left.erase(v);
        comps.push_back(std::move(comp));
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return *a.begin() < *b.begin(); });
    return comps;
}

std::string centroid_of(const StructureTree& t, const std::set<std::string>& vars) {
    std::string best;
    size_t bestMax = vars.size() + 1;
    for (const auto& v : vars) {
        size_t mx = 0;
        for (const auto& c : tree_components(t, vars, v)) mx = std::max(mx, c.size());
        if (mx < bestMax || (mx == bestMax && v < best)) {
            bestMax = mx;
            best = v;
        }
    }
    return best;
}

int build_plan(OddPlan& plan, const StructureTree& t, int dsize, const std::set<std::string>& vars,
               const std::string& port, const std::string& parentZ) {
    PlanNode node;
    node.vars = vars;
    node.z = centroid_of(t, vars);
    node.port = port;
    if (!port.empty()) {
        const auto& e = t.edge(parentZ, port);
        node.portAllowed.assign(dsize, std::vector<char>(dsize, 0));
        for (const auto& tp : e.rel.tuples) {
            Value pv = (e.p == parentZ) ? tp[0] : tp[1];
            Value cv = (e.p == parentZ) ? tp[1] : tp[0];
            node.portAllowed[pv][cv] = 1;
        }
    }
    int id = (int)plan.nodes.size();
    plan.nodes.push_back(node);
    plan.order.push_back(node.z);
    std::vector<int> children;
    for (const auto& comp : tree_components(t, vars, node.z)) {
        std::string entry;
        for (const auto& w : t.neighbors(node.z))
            if (comp.count(w)) entry = w;
        children.push_back(build_plan(plan, t, dsize, comp, entry, node.z));
    }
    plan.nodes[id].children = std::move(children);
    return id;
}

using Mask = uint32_t;

struct OddBuilder {
    const OddPlan& plan;
    DecisionDiagram& d;
    int dsize;
    Mask full;
    // key: plan node | continuation | sorted (var, mask) restrictions
    std::map<std::string, int> memo;

    int emit(int idx, const std::map<std::string, Mask>& restr, int cont) {
        std::ostringstream key;
        key << idx << '|' << cont;
        for (const auto& [v, m] : restr) key << '|' << v << ':' << m;
        auto it = memo.find(key.str());
        if (it != memo.end()) return it->second;

        const PlanNode& p = plan.nodes[idx];
        auto rit = restr.find(p.z);
        Mask zMask = (rit == restr.end()) ? full : rit->second;
        std::vector<int> edges;
        for (Value a = 0; a < dsize; ++a) {
            if (!((zMask >> a) & 1)) {
                edges.push_back(DecisionDiagram::sink0);
                continue;
            }
            // per-child restrictions: inherited ones plus the filtered port
            bool dead = false;
            std::vector<std::map<std::string, Mask>> childRestr;
            for (int ci : p.children) {
                const PlanNode& cn = plan.nodes[ci];
                std::map<std::string, Mask> r;
                for (const auto& [v, m] : restr)
                    if (v != p.z && cn.vars.count(v)) r[v] = m;
                Mask pm = 0;
                for (Value b = 0; b < dsize; ++b)
                    if (cn.portAllowed[a][b]) pm |= (Mask(1) << b);
                auto pre = r.find(cn.port);
                if (pre != r.end()) pm &= pre->second;
                r[cn.port] = pm;
                if (pm == 0) dead = true;
                childRestr.push_back(std::move(r));
            }
            if (dead) {
                edges.push_back(DecisionDiagram::sink0);
                continue;
            }
            int next = cont;
            for (int i = (int)p.children.size() - 1; i >= 0; --i)
                next = emit(p.children[i], childRestr[i], next);
            edges.push_back(next);
        }
        int node = d.add_node(p.z, std::move(edges));
        memo.emplace(key.str(), node);
        return node;
    }
};

}  // namespace

DecisionDiagram compile_odd(const Formula& f) {
    if (f.variables.empty()) throw std::invalid_argument("compile_odd: no variables");
    DecisionDiagram d;
    d.kind = DecisionDiagram::ODD;
    d.domain = f.domain;
    int dsize = f.domain->size();
    size_t n = f.variables.size();
    if (n == 1) {
        const std::string& v = f.variables[0];
        d.order = {v};
        std::vector<int> edges;
        for (Value a = 0; a < dsize; ++a)
            edges.push_back(satisfiable(f, {{v, a}}) ? DecisionDiagram::sink1
                                                     : DecisionDiagram::sink0);
        d.source = d.add_node(v, std::move(edges));
        return d;
    }
    StructureTree t = tree_structure(f);
    OddPlan plan;
    std::set<std::string> all(f.variables.begin(), f.variables.end());
    plan.root = build_plan(plan, t, dsize, all, "", "");
    d.order = plan.order;
    OddBuilder builder{plan, d, dsize, (Mask)((dsize >= 32) ? ~Mask(0) : ((Mask(1) << dsize) - 1)),
                       {}};
    d.source = builder.emit(plan.root, {}, DecisionDiagram::sink1);
    double bound = (double)n * std::pow((double)dsize, std::log2((double)n));
    if ((double)d.nodes.size() > bound + 1e-9)
        throw std::logic_error("compile_odd: size bound violated");
    return d;
}

namespace {

struct FddBuilder {
    const Formula& f;
    DecisionDiagram& d;
    int dsize;

    bool sat(const DomainMap& live) const { return satisfiable(f, {}, &live); }

    bool pair_sat(DomainMap live, const std::string& p, Value a, const std::string& q,
                  Value b) const {
        live[p] = {a};
        live[q] = {b};
        return sat(live);
    }

    // Indecomposable factors of the implicit constraint over `vars`: connect
    // two variables when their selection matrix is non-proper or has at
    // least two blocks, then take connected components.
    std::vector<std::vector<std::string>> factors(const std::vector<std::string>& vars,
                                                  const DomainMap& live) const {
        size_t k = vars.size();
        std::vector<std::vector<char>> adj(k, std::vector<char>(k, 0));
        for (size_t i = 0; i < k; ++i)
            for (size_t j = i + 1; j < k; ++j) {
                std::vector<std::vector<char>> grid(dsize, std::vector<char>(dsize, 0));
                for (Value a = 0; a < dsize; ++a)
                    for (Value b = 0; b < dsize; ++b)
                        grid[a][b] = pair_sat(live, vars[i], a, vars[j], b) ? 1 : 0;
                GridBlocks gb = grid_blocks(grid);
                if (!gb.proper || gb.partition.blocks.size() >= 2) adj[i][j] = adj[j][i] = 1;
            }
        std::vector<std::vector<std::string>> comps;
        std::vector<char> seen(k, 0);
        for (size_t i = 0; i < k; ++i) {
            if (seen[i]) continue;
            std::vector<size_t> stack{i};
            std::vector<std::string> comp;
            while (!stack.empty()) {
                size_t v = stack.back();
                stack.pop_back();
                if (seen[v]) continue;
                seen[v] = 1;
                comp.push_back(vars[v]);
                for (size_t w = 0; w < k; ++w)
                    if (adj[v][w] && !seen[w]) stack.push_back(w);
            }
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
        std::sort(comps.begin(), comps.end());
        return comps;
    }

    int build(std::vector<std::string> vars, DomainMap live, int cont) {
        if (vars.empty()) return cont;
        std::sort(vars.begin(), vars.end());
        if (vars.size() == 1) {
            const std::string& x = vars[0];
            std::vector<int> edges(dsize, DecisionDiagram::sink0);
            for (Value a : live.at(x)) {
                DomainMap l2 = live;
                l2[x] = {a};
                if (sat(l2)) edges[a] = cont;
            }
            return d.add_node(x, std::move(edges));
        }
        auto comps = factors(vars, live);
        if (comps.size() >= 2) {
            int next = cont;
            for (int i = (int)comps.size() - 1; i >= 0; --i) next = build(comps[i], live, next);
            return next;
        }
        // indecomposable: branch on the first variable; every other live
        // domain must shrink, otherwise the language claim was wrong
        const std::string& x1 = vars[0];
        std::vector<std::string> rest(vars.begin() + 1, vars.end());
        std::vector<int> edges(dsize, DecisionDiagram::sink0);
        for (Value a : live.at(x1)) {
            DomainMap liveA = live;
            liveA[x1] = {a};
            if (!sat(liveA)) continue;
            for (const auto& xi : rest) {
                size_t removed = 0;
                std::vector<Value> keep;
                for (Value b : liveA.at(xi)) {
                    if (pair_sat(liveA, x1, a, xi, b)) keep.push_back(b);
                    else ++removed;
                }
                if (removed == 0)
                    throw MisclassifiedError("no value of " + xi + " excluded by " + x1 + "=" +
                                             f.domain->name(a));
                liveA[xi] = std::move(keep);
            }
            edges[a] = build(rest, liveA, cont);
        }
        return d.add_node(x1, std::move(edges));
    }
};

}  // namespace

DecisionDiagram compile_fdd(const Formula& f) {
    if (f.variables.empty()) throw std::invalid_argument("compile_fdd: no variables");
    DecisionDiagram d;
    d.kind = DecisionDiagram::FDD;
    d.domain = f.domain;
    d.order = f.variables;
    int dsize = f.domain->size();
    DomainMap live;
    for (const auto& v : f.variables) {
        std::vector<Value> allv;
        for (Value a = 0; a < dsize; ++a) allv.push_back(a);
        live[v] = allv;
    }
    FddBuilder builder{f, d, dsize};
    d.source = builder.build(f.variables, live, DecisionDiagram::sink1);
    double bound = 2.0 * (double)f.variables.size() *
                   std::pow((double)dsize, 2.0 * (double)dsize + 1.0);
    if ((double)d.nodes.size() > bound + 1e-9)
        throw std::logic_error("compile_fdd: size bound violated");
    return d;
}

DecisionDiagram compile_obdd_baseline(const Formula& f, const std::vector<std::string>& order) {
    if (order.empty()) throw std::invalid_argument("compile_obdd_baseline: empty order");
    {
        std::set<std::string> a(order.begin(), order.end());
        std::set<std::string> b(f.variables.begin(), f.variables.end());
        if (a.size() != order.size() || a != b)
            throw std::invalid_argument("order must be a permutation of the variables");
    }
    DecisionDiagram d;
    d.kind = DecisionDiagram::ODD;
    d.domain = f.domain;
    d.order = order;
    int dsize = f.domain->size();
    std::map<std::string, int> pos;
    for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = (int)i;

    // Shannon expansion; states merged by the projections of each
    // constraint's remaining tuples onto its not-yet-assigned columns.
    struct State {
        std::vector<std::vector<Tuple>> possible;  // per constraint
    };
    auto signature = [&](int level, const State& s) {
        std::ostringstream key;
        key << level;
        for (size_t ci = 0; ci < s.possible.size(); ++ci) {
            const Constraint& c = f.constraints[ci];
            std::vector<int> future;
            for (int p = 0; p < c.arity(); ++p)
                if (pos.at(c.scope[p]) >= level) future.push_back(p);
            std::set<Tuple> proj;
            for (const auto& t : s.possible[ci]) {
                Tuple r;
                for (int p : future) r.push_back(t[p]);
                proj.insert(std::move(r));
            }
            key << '#';
            for (const auto& t : proj) {
                key << ';';
                for (Value v : t) key << v << ',';
            }
        }
        return key.str();
    };

    std::map<std::string, int> memo;
    std::function<int(int, const State&)> build = [&](int level, const State& s) -> int {
        for (const auto& possible : s.possible)
            if (possible.empty()) return DecisionDiagram::sink0;
        // no constraint mentions a future variable: the rest is unconstrained
        bool decided = true;
        for (size_t ci = 0; ci < s.possible.size(); ++ci) {
            const Constraint& c = f.constraints[ci];
            bool futureVar = false;
            for (int p = 0; p < c.arity(); ++p)
                if (pos.at(c.scope[p]) >= level) futureVar = true;
            if (futureVar) decided = false;
        }
        if (decided || level == (int)order.size()) return DecisionDiagram::sink1;
        std::string key = signature(level, s);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        const std::string& x = order[level];
        std::vector<int> edges;
        for (Value a = 0; a < dsize; ++a) {
            State s2 = s;
            for (size_t ci = 0; ci < s2.possible.size(); ++ci) {
                const Constraint& c = f.constraints[ci];
                int p = c.scopePos(x);
                if (p < 0) continue;
                std::vector<Tuple> kept;
                for (auto& t : s2.possible[ci])
                    if (t[p] == a) kept.push_back(t);
                s2.possible[ci] = std::move(kept);
            }
            edges.push_back(build(level + 1, s2));
        }
        bool allSame = std::all_of(edges.begin(), edges.end(),
                                   [&](int e) { return e == edges[0]; });
        int node = (allSame && DecisionDiagram::is_sink(edges[0]))
                       ? edges[0]
                       : d.add_node(x, std::move(edges));
        memo.emplace(std::move(key), node);
        return node;
    };

    State init;
    for (const auto& c : f.constraints) init.possible.push_back(c.rel.tuples);
    if (f.constraints.empty()) {
        std::vector<int> edges(dsize, DecisionDiagram::sink1);
        d.source = d.add_node(order[0], std::move(edges));
        return d;
    }
    d.source = build(0, init);
    if (DecisionDiagram::is_sink(d.source)) {
        // keep a well-formed diagram with a real source node
        std::vector<int> edges(dsize, d.source);
        d.source = d.add_node(order[0], edges);
    }
    return d;
}

}  // namespace blockdd
