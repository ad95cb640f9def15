#include "blockdd/dnnf.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"

namespace blockdd {

namespace {

// Merge two partial assignments; nullopt on conflicting bindings.
std::optional<Assignment> merge(const Assignment& a, const Assignment& b) {
    Assignment out = a;
    for (const auto& [k, v] : b) {
        auto it = out.find(k);
        if (it != out.end() && it->second != v) return std::nullopt;
        out.emplace(k, v);
    }
    return out;
}

std::set<Assignment> cross(const std::set<Assignment>& xs, const std::set<Assignment>& ys,
                           size_t budget) {
    std::set<Assignment> out;
    for (const auto& x : xs)
        for (const auto& y : ys) {
            auto m = merge(x, y);
            if (m) out.insert(*m);
            if (out.size() > budget) throw std::runtime_error("capture budget exceeded");
        }
    return out;
}

void check_gate_ref(const DnnfCircuit& o, int id) {
    if (id < 0 || id >= (int)o.gates.size()) throw std::out_of_range("bad gate id");
}

// Bottom-up evaluation order; throws on cycles or bad references.
std::vector<int> topo_order(const DnnfCircuit& o) {
    std::vector<int> order;
    std::vector<int> color(o.gates.size(), 0);
    std::function<void(int)> visit = [&](int g) {
        check_gate_ref(o, g);
        if (color[g] == 2) return;
        if (color[g] == 1) throw std::invalid_argument("circuit has a cycle");
        color[g] = 1;
        const auto& gate = o.gates[g];
        if (gate.kind == DnnfCircuit::AND || gate.kind == DnnfCircuit::OR) {
            visit(gate.a);
            visit(gate.b);
        }
        color[g] = 2;
        order.push_back(g);
    };
    check_gate_ref(o, o.output);
    visit(o.output);
    return order;
}

// Captured sets for every gate reachable from the output.
std::map<int, std::set<Assignment>> capture_all(const DnnfCircuit& o, size_t budget) {
    std::map<int, std::set<Assignment>> cap;
    size_t total = 0;
    for (int g : topo_order(o)) {
        const auto& gate = o.gates[g];
        std::set<Assignment> s;
        switch (gate.kind) {
            case DnnfCircuit::EMPTY: break;
            case DnnfCircuit::EPSILON: s.insert(Assignment{}); break;
            case DnnfCircuit::INPUT: s.insert(Assignment{{gate.var, gate.val}}); break;
            case DnnfCircuit::AND: s = cross(cap.at(gate.a), cap.at(gate.b), budget); break;
            case DnnfCircuit::OR:
                s = cap.at(gate.a);
                s.insert(cap.at(gate.b).begin(), cap.at(gate.b).end());
                break;
        }
        total += s.size();
        if (total > budget) throw std::runtime_error("capture budget exceeded");
        cap.emplace(g, std::move(s));
    }
    return cap;
}

}  // namespace

int DnnfCircuit::add_or_comb(std::vector<int> children) {
    if (children.empty()) throw std::invalid_argument("add_or_comb: no children");
    while (children.size() > 1) {
        std::vector<int> next;
        for (size_t i = 0; i + 1 < children.size(); i += 2)
            next.push_back(add_or(children[i], children[i + 1]));
        if (children.size() % 2) next.push_back(children.back());
        children = std::move(next);
    }
    return children[0];
}

int DnnfCircuit::add_and_comb(std::vector<int> children) {
    if (children.empty()) throw std::invalid_argument("add_and_comb: no children");
    while (children.size() > 1) {
        std::vector<int> next;
        for (size_t i = 0; i + 1 < children.size(); i += 2)
            next.push_back(add_and(children[i], children[i + 1]));
        if (children.size() % 2) next.push_back(children.back());
        children = std::move(next);
    }
    return children[0];
}

VTree VTree::right_comb(const std::vector<std::string>& order) {
    if (order.empty()) throw std::invalid_argument("right_comb: empty order");
    VTree t;
    int acc = t.add_leaf(order.back());
    for (int i = (int)order.size() - 2; i >= 0; --i) acc = t.add_internal(t.add_leaf(order[i]), acc);
    t.root = acc;
    return t;
}

std::set<Assignment> capture(const DnnfCircuit& o, size_t budget) {
    return capture_all(o, budget).at(o.output);
}

bool accepts(const DnnfCircuit& o, const Assignment& a) {
    for (const auto& v : o.variables)
        if (!a.count(v)) throw std::invalid_argument("accepts: unbound variable " + v);
    std::map<int, bool> memo;
    for (int g : topo_order(o)) {
        const auto& gate = o.gates[g];
        bool r = false;
        switch (gate.kind) {
            case DnnfCircuit::EMPTY: r = false; break;
            case DnnfCircuit::EPSILON: r = true; break;
            case DnnfCircuit::INPUT: {
                auto it = a.find(gate.var);
                if (it == a.end()) throw std::invalid_argument("accepts: unbound variable " + gate.var);
                r = (it->second == gate.val);
                break;
            }
            case DnnfCircuit::AND: r = memo.at(gate.a) && memo.at(gate.b); break;
            case DnnfCircuit::OR: r = memo.at(gate.a) || memo.at(gate.b); break;
        }
        memo.emplace(g, r);
    }
    return memo.at(o.output);
}

std::vector<std::set<std::string>> gate_cones(const DnnfCircuit& o) {
    std::vector<std::set<std::string>> cones(o.gates.size());
    for (int g : topo_order(o)) {
        const auto& gate = o.gates[g];
        if (gate.kind == DnnfCircuit::INPUT) cones[g].insert(gate.var);
        if (gate.kind == DnnfCircuit::AND || gate.kind == DnnfCircuit::OR) {
            cones[g] = cones[gate.a];
            cones[g].insert(cones[gate.b].begin(), cones[gate.b].end());
        }
    }
    return cones;
}

std::optional<int> check_decomposable(const DnnfCircuit& o) {
    auto cones = gate_cones(o);
    for (int g : topo_order(o)) {
        const auto& gate = o.gates[g];
        if (gate.kind != DnnfCircuit::AND) continue;
        for (const auto& v : cones[gate.a])
            if (cones[gate.b].count(v)) return g;
    }
    return std::nullopt;
}

DnnfCircuit eliminate_special_inputs(const DnnfCircuit& o) {
    // Per-gate result: 0 = empty, 1 = epsilon, 2 = gate id in `out`.
    struct Res {
        int tag;
        int id;
    };
    DnnfCircuit out;
    out.domain = o.domain;
    out.variables = o.variables;
    std::map<int, Res> memo;
    for (int g : topo_order(o)) {
        const auto& gate = o.gates[g];
        Res r{0, -1};
        switch (gate.kind) {
            case DnnfCircuit::EMPTY: r = {0, -1}; break;
            case DnnfCircuit::EPSILON: r = {1, -1}; break;
            case DnnfCircuit::INPUT: r = {2, out.add_input(gate.var, gate.val)}; break;
            case DnnfCircuit::AND: {
                Res a = memo.at(gate.a), b = memo.at(gate.b);
                if (a.tag == 0 || b.tag == 0) r = {0, -1};
                else if (a.tag == 1) r = b;
                else if (b.tag == 1) r = a;
                else r = {2, out.add_and(a.id, b.id)};
                break;
            }
            case DnnfCircuit::OR: {
                Res a = memo.at(gate.a), b = memo.at(gate.b);
                // an epsilon branch already accepts every extension
                if (a.tag == 1 || b.tag == 1) r = {1, -1};
                else if (a.tag == 0) r = b;
                else if (b.tag == 0) r = a;
                else r = {2, out.add_or(a.id, b.id)};
                break;
            }
        }
        memo.emplace(g, r);
    }
    Res root = memo.at(o.output);
    if (root.tag == 0) out.output = out.add_empty();      // reject-all sentinel
    else if (root.tag == 1) out.output = out.add_epsilon();  // accept-all sentinel
    else out.output = root.id;
    return out;
}

bool is_accept_all(const DnnfCircuit& o) {
    return o.gates.at(o.output).kind == DnnfCircuit::EPSILON;
}

bool is_reject_all(const DnnfCircuit& o) {
    return o.gates.at(o.output).kind == DnnfCircuit::EMPTY;
}

DnnfCircuit restrict_values(const DnnfCircuit& o, const std::string& x,
                            const std::vector<Value>& allowed) {
    DnnfCircuit sub = o;
    for (auto& g : sub.gates)
        if (g.kind == DnnfCircuit::INPUT && g.var == x &&
            std::find(allowed.begin(), allowed.end(), g.val) == allowed.end())
            g = {DnnfCircuit::EMPTY, -1, -1, "", 0};
    return eliminate_special_inputs(sub);
}

DnnfCircuit project_circuit(const DnnfCircuit& o, const std::vector<std::string>& keep) {
    std::set<std::string> keepSet(keep.begin(), keep.end());
    DnnfCircuit sub = o;
    for (auto& g : sub.gates)
        if (g.kind == DnnfCircuit::INPUT && !keepSet.count(g.var))
            g = {DnnfCircuit::EPSILON, -1, -1, "", 0};
    sub.variables.clear();
    for (const auto& v : o.variables)
        if (keepSet.count(v)) sub.variables.push_back(v);
    return eliminate_special_inputs(sub);
}

std::vector<ProofTree> proof_trees(const DnnfCircuit& o, size_t budget) {
    topo_order(o);  // validates shape
    std::vector<ProofTree> result;
    std::map<int, int> choice;
    // Enumerate one OR decision at a time; gates are collected per complete
    // selection so shared sub-DAGs keep a single consistent choice.
    std::function<void(std::vector<int>)> rec = [&](std::vector<int> pending) {
        while (!pending.empty()) {
            int g = pending.back();
            pending.pop_back();
            const auto& gate = o.gates[g];
            if (gate.kind == DnnfCircuit::AND) {
                pending.push_back(gate.a);
                pending.push_back(gate.b);
            } else if (gate.kind == DnnfCircuit::OR) {
                auto it = choice.find(g);
                if (it != choice.end()) {
                    pending.push_back(it->second);
                    continue;
                }
                for (int c : {gate.a, gate.b}) {
                    choice[g] = c;
                    auto next = pending;
                    next.push_back(c);
                    rec(std::move(next));
                    choice.erase(g);
                }
                return;
            }
        }
        ProofTree t;
        t.or_choice = choice;
        std::set<int> seen;
        std::function<void(int)> collect = [&](int g) {
            if (!seen.insert(g).second) return;
            t.gates.push_back(g);
            const auto& gate = o.gates[g];
            if (gate.kind == DnnfCircuit::AND) {
                collect(gate.a);
                collect(gate.b);
            } else if (gate.kind == DnnfCircuit::OR) {
                collect(choice.at(g));
            }
        };
        collect(o.output);
        // drop choices at OR gates that ended up unreachable
        for (auto it = t.or_choice.begin(); it != t.or_choice.end();)
            it = seen.count(it->first) ? std::next(it) : t.or_choice.erase(it);
        if (result.size() >= budget) throw std::runtime_error("proof tree budget exceeded");
        result.push_back(std::move(t));
    };
    rec({o.output});
    // shared OR gates can make distinct enumeration paths yield one tree
    std::sort(result.begin(), result.end(), [](const ProofTree& l, const ProofTree& r) {
        return l.or_choice < r.or_choice;
    });
    result.erase(std::unique(result.begin(), result.end(),
                             [](const ProofTree& l, const ProofTree& r) {
                                 return l.or_choice == r.or_choice;
                             }),
                 result.end());
    return result;
}

std::set<Assignment> tree_capture(const DnnfCircuit& o, const ProofTree& t) {
    std::map<int, std::set<Assignment>> memo;
    std::function<const std::set<Assignment>&(int)> eval = [&](int g) -> const std::set<Assignment>& {
        auto it = memo.find(g);
        if (it != memo.end()) return it->second;
        const auto& gate = o.gates[g];
        std::set<Assignment> s;
        switch (gate.kind) {
            case DnnfCircuit::EMPTY: break;
            case DnnfCircuit::EPSILON: s.insert(Assignment{}); break;
            case DnnfCircuit::INPUT: s.insert(Assignment{{gate.var, gate.val}}); break;
            case DnnfCircuit::AND: s = cross(eval(gate.a), eval(gate.b), kCaptureBudget); break;
            case DnnfCircuit::OR: s = eval(t.or_choice.at(g)); break;
        }
        return memo.emplace(g, std::move(s)).first->second;
    };
    return eval(o.output);
}

bool check_structured(const DnnfCircuit& o, const VTree& t) {
    std::set<std::set<std::string>> nodeVars;
    std::function<std::set<std::string>(int)> collect = [&](int n) {
        const auto& node = t.nodes.at(n);
        std::set<std::string> vars;
        if (node.leaf()) {
            vars.insert(node.var);
        } else {
            vars = collect(node.left);
            auto r = collect(node.right);
            vars.insert(r.begin(), r.end());
        }
        nodeVars.insert(vars);
        return vars;
    };
    collect(t.root);
    for (const auto& cone : gate_cones(o))
        if (!cone.empty() && !nodeVars.count(cone)) return false;
    return check_decomposable(o) == std::nullopt;
}

namespace {

// Gates with a nonempty captured set.
std::map<int, bool> nonempty_flags(const DnnfCircuit& o) {
    std::map<int, bool> ne;
    for (int g : topo_order(o)) {
        const auto& gate = o.gates[g];
        bool r = false;
        switch (gate.kind) {
            case DnnfCircuit::EMPTY: r = false; break;
            case DnnfCircuit::EPSILON:
            case DnnfCircuit::INPUT: r = true; break;
            case DnnfCircuit::AND: r = ne.at(gate.a) && ne.at(gate.b); break;
            case DnnfCircuit::OR: r = ne.at(gate.a) || ne.at(gate.b); break;
        }
        ne.emplace(g, r);
    }
    return ne;
}

// Some proof tree with a nonempty capture, or nullopt.
std::optional<ProofTree> capturing_tree(const DnnfCircuit& o) {
    auto ne = nonempty_flags(o);
    if (!ne.at(o.output)) return std::nullopt;
    ProofTree t;
    std::set<int> seen;
    std::function<void(int)> descend = [&](int g) {
        if (!seen.insert(g).second) return;
        t.gates.push_back(g);
        const auto& gate = o.gates[g];
        if (gate.kind == DnnfCircuit::AND) {
            descend(gate.a);
            descend(gate.b);
        } else if (gate.kind == DnnfCircuit::OR) {
            int c = ne.at(gate.a) ? gate.a : gate.b;
            t.or_choice[g] = c;
            descend(c);
        }
    };
    descend(o.output);
    return t;
}

// Contributions of proof trees through gate v, with v's subtree replaced by
// the empty assignment. nullopt at a gate = none of its trees contain v.
std::set<Assignment> rest_set(const DnnfCircuit& o, int v, size_t budget) {
    auto caps = capture_all(o, budget);
    std::map<int, std::optional<std::set<Assignment>>> through;
    for (int g : topo_order(o)) {
        const auto& gate = o.gates[g];
        std::optional<std::set<Assignment>> r;
        if (g == v) {
            r = std::set<Assignment>{Assignment{}};
        } else if (gate.kind == DnnfCircuit::AND) {
            const auto& ta = through.at(gate.a);
            const auto& tb = through.at(gate.b);
            if (ta || tb) r = std::set<Assignment>{};
            if (ta)
                for (const auto& m : cross(*ta, caps.at(gate.b), budget)) r->insert(m);
            if (tb)
                for (const auto& m : cross(caps.at(gate.a), *tb, budget)) r->insert(m);
        } else if (gate.kind == DnnfCircuit::OR) {
            const auto& ta = through.at(gate.a);
            const auto& tb = through.at(gate.b);
            if (ta || tb) r = std::set<Assignment>{};
            if (ta) r->insert(ta->begin(), ta->end());
            if (tb) r->insert(tb->begin(), tb->end());
        }
        through.emplace(g, std::move(r));
    }
    const auto& res = through.at(o.output);
    if (!res) throw std::logic_error("rest_set: gate not reachable");
    return *res;
}

std::set<std::string> assigned_vars(const std::set<Assignment>& s) {
    std::set<std::string> out;
    for (const auto& a : s)
        for (const auto& [k, v] : a) out.insert(k);
    return out;
}

// v-tree node whose Z-fraction lands in [beta/2, beta]; descends toward the
// child holding more of Z, halving at most per step.
std::set<std::string> structured_split(const VTree& t, const std::set<std::string>& zset,
                                       double beta) {
    std::function<std::set<std::string>(int)> vars = [&](int n) {
        const auto& node = t.nodes.at(n);
        if (node.leaf()) return std::set<std::string>{node.var};
        auto l = vars(node.left);
        auto r = vars(node.right);
        l.insert(r.begin(), r.end());
        return l;
    };
    auto zcount = [&](const std::set<std::string>& vs) {
        size_t c = 0;
        for (const auto& v : vs) c += zset.count(v);
        return c;
    };
    int cur = t.root;
    auto curVars = vars(cur);
    while (true) {
        double frac = zset.empty() ? 0.0 : (double)zcount(curVars) / (double)zset.size();
        if (frac <= beta) return curVars;
        const auto& node = t.nodes.at(cur);
        if (node.leaf()) return curVars;
        auto l = vars(node.left), r = vars(node.right);
        if (zcount(l) >= zcount(r)) {
            cur = node.left;
            curVars = std::move(l);
        } else {
            cur = node.right;
            curVars = std::move(r);
        }
    }
}

}  // namespace

RectangleCover extract_rectangle_cover(const DnnfCircuit& o, const std::vector<std::string>& Z,
                                       double beta, const VTree* vtree, size_t budget) {
    if (beta <= 0.0 || beta > 1.0) throw std::invalid_argument("beta out of range");
    RectangleCover cover;
    cover.beta = beta;
    cover.zvars = Z;
    std::set<std::string> zset(Z.begin(), Z.end());
    std::set<std::string> universe(Z.begin(), Z.end());
    for (const auto& v : o.variables) universe.insert(v);
    {
        auto cones = gate_cones(o);
        if (o.output >= 0 && o.output < (int)cones.size())
            universe.insert(cones[o.output].begin(), cones[o.output].end());
    }
    cover.scope.assign(universe.begin(), universe.end());

    size_t lower = (size_t)std::ceil(beta / 2.0 * (double)zset.size());
    size_t upper = (size_t)std::floor(beta * (double)zset.size());

    std::optional<std::set<std::string>> fixedSplit;
    if (vtree) fixedSplit = structured_split(*vtree, zset, beta);

    DnnfCircuit work = eliminate_special_inputs(o);
    size_t guard = o.size() + 2;
    while (!is_reject_all(work)) {
        if (cover.rectangles.size() >= guard)
            throw std::logic_error("rectangle extraction failed to terminate");
        auto tree = capturing_tree(work);
        if (!tree) break;
        auto cones = gate_cones(work);
        int v = -1;
        if (fixedSplit) {
            // highest proof-tree gate whose cone sits inside the fixed split
            for (int g : tree->gates) {
                bool inside = true;
                for (const auto& var : cones[g])
                    if (!fixedSplit->count(var)) inside = false;
                if (inside) {
                    v = g;
                    break;
                }
            }
            if (v < 0) throw std::runtime_error("structured cover: tree misses the split");
        } else {
            v = work.output;
            while (true) {
                size_t zc = 0;
                for (const auto& var : cones[v]) zc += zset.count(var);
                if (zset.empty() || zc <= upper) break;
                const auto& gate = work.gates[v];
                if (gate.kind == DnnfCircuit::AND) {
                    size_t za = 0, zb = 0;
                    for (const auto& var : cones[gate.a]) za += zset.count(var);
                    for (const auto& var : cones[gate.b]) zb += zset.count(var);
                    v = (za >= zb) ? gate.a : gate.b;
                } else if (gate.kind == DnnfCircuit::OR) {
                    v = tree->or_choice.at(v);
                } else {
                    break;
                }
            }
        }

        Rectangle rect;
        {
            auto caps = capture_all(work, budget);
            rect.xset = caps.at(v);
        }
        rect.yset = rest_set(work, v, budget);

        auto ax = assigned_vars(rect.xset);
        auto ay = assigned_vars(rect.yset);
        std::set<std::string> xside;
        if (fixedSplit) {
            xside = *fixedSplit;
            for (const auto& var : ax)
                if (!xside.count(var)) throw std::runtime_error("structured cover: x side escapes split");
            for (const auto& var : ay)
                if (xside.count(var)) throw std::runtime_error("structured cover: y side escapes split");
        } else {
            xside = ax;
            size_t zc = 0;
            for (const auto& var : xside) zc += zset.count(var);
            if (zc > upper) throw std::runtime_error("rectangle cover: x side too large");
            // pad with variables free on both sides until balanced
            for (const auto& var : zset) {
                if (zc >= lower) break;
                if (!ax.count(var) && !ay.count(var) && xside.insert(var).second) ++zc;
            }
            if (zc < lower) throw std::runtime_error("rectangle cover: cannot balance rectangle");
        }
        rect.xvars.assign(xside.begin(), xside.end());
        for (const auto& var : universe)
            if (!xside.count(var)) rect.yvars.push_back(var);
        cover.rectangles.push_back(std::move(rect));

        work.gates[v] = {DnnfCircuit::EMPTY, -1, -1, "", 0};
        work = eliminate_special_inputs(work);
    }
    return cover;
}

DnnfCircuit fdd_to_dnnf(const DecisionDiagram& d) {
    DnnfCircuit o;
    o.domain = d.domain;
    o.variables = d.order;
    int d_size = d.domain->size();
    std::map<int, int> memo;  // diagram node -> gate
    std::function<int(int)> build = [&](int id) {
        auto it = memo.find(id);
        if (it != memo.end()) return it->second;
        int g;
        if (id == DecisionDiagram::sink0) {
            g = o.add_empty();
        } else if (id == DecisionDiagram::sink1) {
            g = o.add_epsilon();
        } else {
            const auto& node = d.node(id);
            std::vector<int> branches;
            for (Value a = 0; a < d_size; ++a)
                branches.push_back(o.add_and(o.add_input(node.var, a), build(node.edges[a])));
            g = o.add_or_comb(branches);
        }
        memo.emplace(id, g);
        return g;
    };
    o.output = build(d.source);
    return eliminate_special_inputs(o);
}

std::pair<DnnfCircuit, VTree> odd_to_structured_dnnf(const DecisionDiagram& d) {
    if (d.kind != DecisionDiagram::ODD) throw std::invalid_argument("expected an ordered diagram");
    if (auto v = validate(d)) throw std::invalid_argument("invalid diagram: " + v->message);
    DnnfCircuit o;
    o.domain = d.domain;
    o.variables = d.order;
    int d_size = d.domain->size();
    int n = (int)d.order.size();
    std::map<std::string, int> orderPos;
    for (int i = 0; i < n; ++i) orderPos[d.order[i]] = i;

    std::map<int, int> nodeGate;        // diagram node -> gate
    std::map<std::pair<int, int>, int> chainGate;  // (position, diagram node) -> gate
    std::function<int(int)> build;
    // Gate covering positions from..n-1 that behaves as node `id` at its own
    // position and is unconstrained on the positions skipped before it.
    std::function<int(int, int)> chain = [&](int from, int id) -> int {
        int at = (id == DecisionDiagram::sink0 || id == DecisionDiagram::sink1) ? n
                                                                                : orderPos.at(d.node(id).var);
        if (from >= at) return build(id);
        auto key = std::make_pair(from, id);
        auto it = chainGate.find(key);
        if (it != chainGate.end()) return it->second;
        int below = chain(from + 1, id);
        std::vector<int> branches;
        for (Value a = 0; a < d_size; ++a)
            branches.push_back(o.add_and(o.add_input(d.order[from], a), below));
        int g = o.add_or_comb(branches);
        chainGate.emplace(key, g);
        return g;
    };
    build = [&](int id) -> int {
        auto it = nodeGate.find(id);
        if (it != nodeGate.end()) return it->second;
        int g;
        if (id == DecisionDiagram::sink0) {
            g = o.add_empty();
        } else if (id == DecisionDiagram::sink1) {
            g = o.add_epsilon();
        } else {
            const auto& node = d.node(id);
            int at = orderPos.at(node.var);
            std::vector<int> branches;
            for (Value a = 0; a < d_size; ++a)
                branches.push_back(o.add_and(o.add_input(node.var, a), chain(at + 1, node.edges[a])));
            g = o.add_or_comb(branches);
        }
        nodeGate.emplace(id, g);
        return g;
    };
    o.output = chain(0, d.source);
    return {eliminate_special_inputs(o), VTree::right_comb(d.order)};
}

std::string circuit_to_json(const DnnfCircuit& o) {
    nlohmann::json j;
    j["kind"] = "dnnf";
    j["domain"] = o.domain->symbols;
    j["variables"] = o.variables;
    j["output"] = o.output;
    nlohmann::json gates = nlohmann::json::array();
    for (const auto& g : o.gates) {
        nlohmann::json jg;
        switch (g.kind) {
            case DnnfCircuit::EMPTY: jg["kind"] = "empty"; break;
            case DnnfCircuit::EPSILON: jg["kind"] = "epsilon"; break;
            case DnnfCircuit::INPUT:
                jg["kind"] = "input";
                jg["var"] = g.var;
                jg["val"] = o.domain->name(g.val);
                break;
            case DnnfCircuit::AND:
                jg["kind"] = "and";
                jg["a"] = g.a;
                jg["b"] = g.b;
                break;
            case DnnfCircuit::OR:
                jg["kind"] = "or";
                jg["a"] = g.a;
                jg["b"] = g.b;
                break;
        }
        gates.push_back(std::move(jg));
    }
    j["gates"] = std::move(gates);
    return j.dump(2);
}

DnnfCircuit circuit_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("kind").get<std::string>() != "dnnf") throw std::invalid_argument("not a dnnf circuit");
    DnnfCircuit o;
    o.domain = Domain::make(j.at("domain").get<std::vector<std::string>>());
    o.variables = j.at("variables").get<std::vector<std::string>>();
    for (const auto& jg : j.at("gates")) {
        std::string kind = jg.at("kind").get<std::string>();
        if (kind == "empty") o.add_empty();
        else if (kind == "epsilon") o.add_epsilon();
        else if (kind == "input")
            o.add_input(jg.at("var").get<std::string>(),
                        o.domain->value(jg.at("val").get<std::string>()));
        else if (kind == "and") o.add_and(jg.at("a").get<int>(), jg.at("b").get<int>());
        else if (kind == "or") o.add_or(jg.at("a").get<int>(), jg.at("b").get<int>());
        else throw std::invalid_argument("unknown gate kind: " + kind);
    }
    o.output = j.at("output").get<int>();
    topo_order(o);  // validates references and acyclicity
    return o;
}

std::string vtree_to_json(const VTree& t) {
    nlohmann::json j;
    j["kind"] = "vtree";
    j["root"] = t.root;
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes) {
        nlohmann::json jn;
        if (n.leaf()) jn["var"] = n.var;
        else {
            jn["left"] = n.left;
            jn["right"] = n.right;
        }
        nodes.push_back(std::move(jn));
    }
    j["nodes"] = std::move(nodes);
    return j.dump(2);
}

}  // namespace blockdd
