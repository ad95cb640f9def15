#include "blockdd/core.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace blockdd {

std::shared_ptr<const Domain> Domain::make(std::vector<std::string> syms) {
    auto d = std::make_shared<Domain>();
    d->symbols = std::move(syms);
    for (size_t i = 0; i < d->symbols.size(); ++i) {
        if (!d->index.emplace(d->symbols[i], (Value)i).second)
            throw std::invalid_argument("duplicate domain symbol: " + d->symbols[i]);
    }
    if (d->symbols.empty()) throw std::invalid_argument("empty domain");
    return d;
}

Value Domain::value(const std::string& sym) const {
    auto it = index.find(sym);
    if (it == index.end()) throw std::invalid_argument("unknown domain symbol: " + sym);
    return it->second;
}

Relation::Relation(int k, std::vector<Tuple> ts) : arity(k), tuples(std::move(ts)) {
    for (const auto& t : tuples)
        if ((int)t.size() != arity) throw std::invalid_argument("tuple arity mismatch");
    canonicalize();
}

void Relation::canonicalize() {
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
}

bool Relation::contains(const Tuple& t) const {
    return std::binary_search(tuples.begin(), tuples.end(), t);
}

Relation Relation::projected(const std::vector<int>& positions) const {
    Relation out;
    out.arity = (int)positions.size();
    out.tuples.reserve(tuples.size());
    for (const auto& t : tuples) {
        Tuple p(positions.size());
        for (size_t i = 0; i < positions.size(); ++i) p[i] = t.at(positions[i]);
        out.tuples.push_back(std::move(p));
    }
    out.canonicalize();
    return out;
}

Relation Relation::transposed() const {
    if (arity != 2) throw std::invalid_argument("transpose needs arity 2");
    return projected({1, 0});
}

Relation Relation::full(int arity, int domSize) {
    Relation r;
    r.arity = arity;
    Tuple t(arity, 0);
    while (true) {
        r.tuples.push_back(t);
        int i = arity - 1;
        for (; i >= 0; --i) {
            if (++t[i] < domSize) break;
            t[i] = 0;
        }
        if (i < 0) break;
    }
    if (arity == 0) r.tuples = {Tuple{}};
    r.canonicalize();
    return r;
}

Relation Relation::equality(int domSize) {
    Relation r;
    r.arity = 2;
    for (Value a = 0; a < domSize; ++a) r.tuples.push_back({a, a});
    return r;
}

Relation Relation::unary(const std::vector<Value>& vals) {
    Relation r;
    r.arity = 1;
    for (Value a : vals) r.tuples.push_back({a});
    r.canonicalize();
    return r;
}

Constraint::Constraint(std::vector<std::string> rawScope, Relation r) {
    if ((int)rawScope.size() != r.arity) throw std::invalid_argument("scope/arity mismatch");
    // Normalize repeated scope variables: keep first occurrence, filter tuples.
    std::vector<int> keep;          // positions kept
    std::vector<int> firstOf(rawScope.size());  // position -> index of first occurrence
    for (size_t i = 0; i < rawScope.size(); ++i) {
        int f = -1;
        for (size_t j = 0; j < i; ++j)
            if (rawScope[j] == rawScope[i]) { f = (int)j; break; }
        firstOf[i] = f;
        if (f < 0) {
            keep.push_back((int)i);
            scope.push_back(rawScope[i]);
        }
    }
    if (keep.size() == rawScope.size()) {
        rel = std::move(r);
        return;
    }
    Relation out;
    out.arity = (int)keep.size();
    for (const auto& t : r.tuples) {
        bool ok = true;
        for (size_t i = 0; i < rawScope.size() && ok; ++i)
            if (firstOf[i] >= 0 && t[i] != t[firstOf[i]]) ok = false;
        if (!ok) continue;
        Tuple p(keep.size());
        for (size_t i = 0; i < keep.size(); ++i) p[i] = t[keep[i]];
        out.tuples.push_back(std::move(p));
    }
    out.canonicalize();
    rel = std::move(out);
}

int Constraint::scopePos(const std::string& var) const {
    for (size_t i = 0; i < scope.size(); ++i)
        if (scope[i] == var) return (int)i;
    return -1;
}

int Formula::varIndex(const std::string& v) const {
    for (size_t i = 0; i < variables.size(); ++i)
        if (variables[i] == v) return (int)i;
    return -1;
}

Constraint conjoin(const Constraint& c1, const Constraint& c2) {
    // Output scope: c1's order, then the new variables of c2 in c2 order.
    std::vector<std::string> scope = c1.scope;
    std::vector<int> sharedIn1, sharedIn2;  // positions of shared vars
    std::vector<int> newIn2;                // positions of c2-only vars
    for (size_t j = 0; j < c2.scope.size(); ++j) {
        int p = c1.scopePos(c2.scope[j]);
        if (p >= 0) {
            sharedIn1.push_back(p);
            sharedIn2.push_back((int)j);
        } else {
            newIn2.push_back((int)j);
            scope.push_back(c2.scope[j]);
        }
    }
    // Index c2 tuples by their shared-variable key.
    std::map<Tuple, std::vector<const Tuple*>> byKey;
    for (const auto& t : c2.rel.tuples) {
        Tuple key(sharedIn2.size());
        for (size_t i = 0; i < sharedIn2.size(); ++i) key[i] = t[sharedIn2[i]];
        byKey[key].push_back(&t);
    }
    Relation out;
    out.arity = (int)scope.size();
    for (const auto& t1 : c1.rel.tuples) {
        Tuple key(sharedIn1.size());
        for (size_t i = 0; i < sharedIn1.size(); ++i) key[i] = t1[sharedIn1[i]];
        auto it = byKey.find(key);
        if (it == byKey.end()) continue;
        for (const Tuple* t2 : it->second) {
            Tuple joined = t1;
            for (int j : newIn2) joined.push_back((*t2)[j]);
            out.tuples.push_back(std::move(joined));
        }
    }
    out.canonicalize();
    Constraint c;
    c.scope = std::move(scope);
    c.rel = std::move(out);
    return c;
}

Constraint project(const Constraint& c, const std::vector<std::string>& vars) {
    // Keep columns in original index order.
    std::vector<int> positions;
    std::vector<std::string> outScope;
    for (size_t i = 0; i < c.scope.size(); ++i) {
        if (std::find(vars.begin(), vars.end(), c.scope[i]) != vars.end()) {
            positions.push_back((int)i);
            outScope.push_back(c.scope[i]);
        }
    }
    for (const auto& v : vars)
        if (c.scopePos(v) < 0) throw std::invalid_argument("project: unknown variable " + v);
    Constraint out;
    out.scope = std::move(outScope);
    out.rel = c.rel.projected(positions);
    return out;
}

Constraint select(const Constraint& c, const std::string& var, const std::vector<Value>& allowed) {
    int p = c.scopePos(var);
    if (p < 0) throw std::invalid_argument("select: unknown variable " + var);
    std::vector<bool> ok;
    for (Value v : allowed) {
        if (v >= (int)ok.size()) ok.resize(v + 1, false);
        ok[v] = true;
    }
    Constraint out;
    out.scope = c.scope;
    out.rel.arity = c.rel.arity;
    for (const auto& t : c.rel.tuples)
        if (t[p] < (int)ok.size() && ok[t[p]]) out.rel.tuples.push_back(t);
    return out;
}

std::vector<Constraint> binary_projections(const Constraint& c) {
    std::vector<Constraint> out;
    int k = (int)c.scope.size();
    // size 0
    {
        Constraint e;
        e.rel.arity = 0;
        if (!c.rel.empty()) e.rel.tuples = {Tuple{}};
        out.push_back(e);
    }
    for (int i = 0; i < k; ++i) out.push_back(project(c, {c.scope[i]}));
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) out.push_back(project(c, {c.scope[i], c.scope[j]}));
    // Deduplicate up to scope.
    std::vector<Constraint> dedup;
    for (auto& cc : out) {
        bool seen = false;
        for (const auto& d : dedup)
            if (d.scope == cc.scope && d.rel == cc.rel) { seen = true; break; }
        if (!seen) dedup.push_back(std::move(cc));
    }
    return dedup;
}

Constraint constraint_of(const Formula& f) { return constraint_of(f, f.variables); }

Constraint constraint_of(const Formula& f, const std::vector<std::string>& vars) {
    // Fold-join all constraints, preferring joins that share variables, then
    // pad with full unary constraints for untouched variables and project.
    Constraint acc;
    acc.rel.arity = 0;
    acc.rel.tuples = {Tuple{}};
    std::vector<bool> used(f.constraints.size(), false);
    for (size_t done = 0; done < f.constraints.size(); ++done) {
        int pick = -1;
        for (size_t i = 0; i < f.constraints.size(); ++i) {
            if (used[i]) continue;
            bool shares = false;
            for (const auto& v : f.constraints[i].scope)
                if (acc.scopePos(v) >= 0) { shares = true; break; }
            if (shares) { pick = (int)i; break; }
        }
        if (pick < 0)
            for (size_t i = 0; i < f.constraints.size(); ++i)
                if (!used[i]) { pick = (int)i; break; }
        used[pick] = true;
        acc = conjoin(acc, f.constraints[pick]);
    }
    std::vector<Value> all;
    for (Value a = 0; a < f.domain->size(); ++a) all.push_back(a);
    for (const auto& v : f.variables) {
        if (acc.scopePos(v) < 0) {
            Constraint u;
            u.scope = {v};
            u.rel = Relation::unary(all);
            acc = conjoin(acc, u);
        }
    }
    return project(acc, vars);
}

// ---------- oracles ----------

namespace {

struct Search {
    const Formula& f;
    std::vector<std::vector<Value>> live;       // per variable
    std::vector<int> assign;                    // -1 = unassigned
    std::vector<std::vector<int>> consOfVar;    // var index -> constraint ids
    std::vector<std::vector<int>> scopeIdx;     // constraint -> var indices

    explicit Search(const Formula& f_, const Assignment& partial, const DomainMap* domains)
        : f(f_) {
        int n = (int)f.variables.size();
        assign.assign(n, -1);
        live.resize(n);
        for (int i = 0; i < n; ++i) {
            if (domains) {
                auto it = domains->find(f.variables[i]);
                if (it != domains->end()) {
                    live[i] = it->second;
                    std::sort(live[i].begin(), live[i].end());
                    continue;
                }
            }
            for (Value a = 0; a < f.domain->size(); ++a) live[i].push_back(a);
        }
        for (auto& [v, a] : partial) {
            int i = f.varIndex(v);
            if (i < 0) throw std::invalid_argument("pinned unknown variable: " + v);
            assign[i] = a;
        }
        consOfVar.resize(n);
        scopeIdx.resize(f.constraints.size());
        for (size_t ci = 0; ci < f.constraints.size(); ++ci) {
            for (const auto& v : f.constraints[ci].scope) {
                int i = f.varIndex(v);
                if (i < 0) throw std::invalid_argument("constraint var not declared: " + v);
                scopeIdx[ci].push_back(i);
                consOfVar[i].push_back((int)ci);
            }
        }
    }

    // Does constraint ci admit a tuple compatible with current assignment and
    // live domains?
    bool consistent(int ci) const {
        const auto& idx = scopeIdx[ci];
        for (const auto& t : f.constraints[ci].rel.tuples) {
            bool ok = true;
            for (size_t p = 0; p < idx.size() && ok; ++p) {
                int vi = idx[p];
                if (assign[vi] >= 0) {
                    if (t[p] != assign[vi]) ok = false;
                } else if (!std::binary_search(live[vi].begin(), live[vi].end(), t[p])) {
                    ok = false;
                }
            }
            if (ok) return true;
        }
        return false;
    }

    bool initialConsistent() {
        for (size_t ci = 0; ci < f.constraints.size(); ++ci)
            if (!consistent((int)ci)) return false;
        for (int i = 0; i < (int)assign.size(); ++i)
            if (assign[i] < 0 && live[i].empty()) return false;
        return true;
    }
};

// Memoized component-split counting.
struct Counter {
    Search s;
    std::unordered_map<std::string, unsigned long long> memo;

    Counter(const Formula& f, const Assignment& partial, const DomainMap* domains)
        : s(f, partial, domains) {}

    unsigned long long run() {
        if (!s.initialConsistent()) return 0;
        std::vector<int> vars;
        for (int i = 0; i < (int)s.assign.size(); ++i)
            if (s.assign[i] < 0) vars.push_back(i);
        return countVars(vars);
    }

    unsigned long long countVars(const std::vector<int>& vars) {
        if (vars.empty()) return 1;
        // Split into connected components via constraints with >= 2 unassigned vars.
        std::vector<int> parent(vars.size());
        std::unordered_map<int, int> pos;
        for (size_t i = 0; i < vars.size(); ++i) { parent[i] = (int)i; pos[vars[i]] = (int)i; }
        std::function<int(int)> find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (size_t ci = 0; ci < s.f.constraints.size(); ++ci) {
            int prev = -1;
            for (int vi : s.scopeIdx[ci]) {
                auto it = pos.find(vi);
                if (it == pos.end() || s.assign[vi] >= 0) continue;
                if (prev >= 0) parent[find(it->second)] = find(prev);
                prev = it->second;
            }
        }
        std::map<int, std::vector<int>> comps;
        for (size_t i = 0; i < vars.size(); ++i) comps[find((int)i)].push_back(vars[i]);
        unsigned long long total = 1;
        for (auto& [root, comp] : comps) {
            (void)root;
            total *= countComponent(comp);
            if (total == 0) return 0;
        }
        return total;
    }

    std::string keyOf(const std::vector<int>& comp) {
        std::string key;
        for (int vi : comp) { key += std::to_string(vi); key += ','; }
        key += '|';
        // Pinned values of constraints touching the component.
        for (size_t ci = 0; ci < s.f.constraints.size(); ++ci) {
            bool touches = false;
            for (int vi : s.scopeIdx[ci])
                if (s.assign[vi] < 0 &&
                    std::binary_search(comp.begin(), comp.end(), vi)) { touches = true; break; }
            if (!touches) continue;
            key += std::to_string(ci);
            key += ':';
            for (int vi : s.scopeIdx[ci]) {
                key += std::to_string(s.assign[vi]);
                key += ',';
            }
            key += ';';
        }
        return key;
    }

    unsigned long long countComponent(std::vector<int> comp) {
        std::sort(comp.begin(), comp.end());
        std::string key = keyOf(comp);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        int v = comp[0];
        std::vector<int> rest(comp.begin() + 1, comp.end());
        unsigned long long total = 0;
        for (Value a : s.live[v]) {
            s.assign[v] = a;
            bool ok = true;
            for (int ci : s.consOfVar[v])
                if (!s.consistent(ci)) { ok = false; break; }
            if (ok) total += countVars(rest);
            s.assign[v] = -1;
        }
        memo.emplace(std::move(key), total);
        return total;
    }
};

}  // namespace

unsigned long long count_solutions(const Formula& f, const Assignment& partial,
                                   const DomainMap* live) {
    Counter c(f, partial, live);
    return c.run();
}

bool satisfiable(const Formula& f, const Assignment& partial, const DomainMap* live) {
    Search s(f, partial, live);
    if (!s.initialConsistent()) return false;
    std::vector<int> vars;
    for (int i = 0; i < (int)s.assign.size(); ++i)
        if (s.assign[i] < 0) vars.push_back(i);
    std::function<bool(size_t)> dfs = [&](size_t k) -> bool {
        if (k == vars.size()) return true;
        int v = vars[k];
        for (Value a : s.live[v]) {
            s.assign[v] = a;
            bool ok = true;
            for (int ci : s.consOfVar[v])
                if (!s.consistent(ci)) { ok = false; break; }
            if (ok && dfs(k + 1)) { s.assign[v] = -1; return true; }
        }
        s.assign[v] = -1;
        return false;
    };
    return dfs(0);
}

std::vector<Assignment> enumerate_solutions(const Formula& f, const Assignment& partial) {
    Search s(f, partial, nullptr);
    std::vector<Assignment> out;
    if (!s.initialConsistent()) return out;
    std::vector<int> vars;
    for (int i = 0; i < (int)s.assign.size(); ++i)
        if (s.assign[i] < 0) vars.push_back(i);
    std::function<void(size_t)> dfs = [&](size_t k) {
        if (k == vars.size()) {
            Assignment a;
            for (size_t i = 0; i < f.variables.size(); ++i) a[f.variables[i]] = s.assign[i];
            out.push_back(std::move(a));
            return;
        }
        int v = vars[k];
        for (Value a = 0; a < f.domain->size(); ++a) {
            s.assign[v] = a;
            bool ok = true;
            for (int ci : s.consOfVar[v])
                if (!s.consistent(ci)) { ok = false; break; }
            if (ok) dfs(k + 1);
        }
        s.assign[v] = -1;
    };
    dfs(0);
    return out;
}

// ---------- text format ----------

Formula parse_instance(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Formula f;
    std::map<std::string, Relation> rels;
    std::string pendingRel;
    int pendingArity = 0;
    std::vector<Tuple> pendingTuples;
    bool inRel = false;

    auto tokens = [](const std::string& s) {
        std::istringstream ls(s);
        std::vector<std::string> out;
        std::string t;
        while (ls >> t) out.push_back(t);
        return out;
    };

    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto toks = tokens(line);
        if (toks.empty()) continue;
        if (inRel) {
            if (toks[0] == "end") {
                rels[pendingRel] = Relation(pendingArity, pendingTuples);
                pendingTuples.clear();
                inRel = false;
                continue;
            }
            if ((int)toks.size() != pendingArity)
                throw std::invalid_argument("tuple arity mismatch in rel " + pendingRel);
            Tuple t;
            for (const auto& sym : toks) t.push_back(f.domain->value(sym));
            pendingTuples.push_back(std::move(t));
            continue;
        }
        if (toks[0] == "domain:") {
            f.domain = Domain::make({toks.begin() + 1, toks.end()});
        } else if (toks[0] == "var:") {
            for (size_t i = 1; i < toks.size(); ++i) f.variables.push_back(toks[i]);
        } else if (toks[0] == "rel") {
            if (!f.domain) throw std::invalid_argument("rel before domain:");
            if (toks.size() != 3 || toks[2].rfind("arity=", 0) != 0)
                throw std::invalid_argument("malformed rel line");
            pendingRel = toks[1];
            pendingArity = std::stoi(toks[2].substr(6));
            inRel = true;
        } else if (toks[0] == "con") {
            if (toks.size() < 2) throw std::invalid_argument("malformed con line");
            auto it = rels.find(toks[1]);
            if (it == rels.end()) throw std::invalid_argument("unknown relation: " + toks[1]);
            std::vector<std::string> scope(toks.begin() + 2, toks.end());
            for (const auto& v : scope)
                if (std::find(f.variables.begin(), f.variables.end(), v) == f.variables.end())
                    throw std::invalid_argument("constraint uses undeclared variable: " + v);
            f.constraints.emplace_back(scope, it->second);
        } else {
            throw std::invalid_argument("unrecognized line: " + line);
        }
    }
    if (inRel) throw std::invalid_argument("unterminated rel block");
    if (!f.domain) throw std::invalid_argument("missing domain: line");
    return f;
}

Formula load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

std::string serialize_instance(const Formula& f) {
    std::ostringstream out;
    out << "domain:";
    for (const auto& s : f.domain->symbols) out << ' ' << s;
    out << "\nvar:";
    for (const auto& v : f.variables) out << ' ' << v;
    out << '\n';
    // Name distinct relations R0, R1, ...
    std::vector<Relation> distinct;
    std::vector<int> relOf(f.constraints.size());
    for (size_t ci = 0; ci < f.constraints.size(); ++ci) {
        int found = -1;
        for (size_t i = 0; i < distinct.size(); ++i)
            if (distinct[i] == f.constraints[ci].rel) { found = (int)i; break; }
        if (found < 0) {
            found = (int)distinct.size();
            distinct.push_back(f.constraints[ci].rel);
        }
        relOf[ci] = found;
    }
    for (size_t i = 0; i < distinct.size(); ++i) {
        out << "rel R" << i << " arity=" << distinct[i].arity << '\n';
        for (const auto& t : distinct[i].tuples) {
            for (size_t p = 0; p < t.size(); ++p)
                out << (p ? " " : "  ") << f.domain->name(t[p]);
            if (t.empty()) out << "  ";
            out << '\n';
        }
        out << "end\n";
    }
    for (size_t ci = 0; ci < f.constraints.size(); ++ci) {
        out << "con R" << relOf[ci];
        for (const auto& v : f.constraints[ci].scope) out << ' ' << v;
        out << '\n';
    }
    return out.str();
}

std::string relation_key(const Relation& r) {
    std::string key = std::to_string(r.arity);
    key += ':';
    for (const auto& t : r.tuples) {
        for (Value v : t) { key += std::to_string(v); key += ','; }
        key += ';';
    }
    return key;
}

uint64_t fnv1a64(const void* data, size_t len) {
    const unsigned char* p = (const unsigned char*)data;
    uint64_t h = 1469598103934665603ULL;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace blockdd
