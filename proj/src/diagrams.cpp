#include "blockdd/diagrams.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace blockdd {

bool evaluate(const DecisionDiagram& d, const Assignment& a) {
    int cur = d.source;
    while (!DecisionDiagram::is_sink(cur)) {
        const auto& n = d.node(cur);
        auto it = a.find(n.var);
        if (it == a.end()) throw std::invalid_argument("evaluate: unbound variable " + n.var);
        if (it->second < 0 || it->second >= (int)n.edges.size())
            throw std::invalid_argument("evaluate: value out of range for " + n.var);
        cur = n.edges[it->second];
    }
    return cur == DecisionDiagram::sink1;
}

namespace {

// Path from the source to `target`, as node ids.
std::vector<int> path_to(const DecisionDiagram& d, int target) {
    std::vector<int> path;
    std::set<int> seen;
    std::function<bool(int)> dfs = [&](int id) {
        path.push_back(id);
        if (id == target) return true;
        if (!DecisionDiagram::is_sink(id) && seen.insert(id).second)
            for (int e : d.node(id).edges)
                if (dfs(e)) return true;
        path.pop_back();
        return false;
    };
    dfs(d.source);
    return path;
}

}  // namespace

std::optional<DiagramViolation> validate(const DecisionDiagram& d) {
    if (!d.domain) return DiagramViolation{"missing domain", {}};
    int dsize = d.domain->size();
    int n = (int)d.nodes.size();
    std::map<std::string, int> orderPos;
    for (size_t i = 0; i < d.order.size(); ++i) orderPos[d.order[i]] = (int)i;
    if (d.source < 0 || d.source >= n + 2) return DiagramViolation{"bad source id", {}};
    for (int id = 2; id < n + 2; ++id) {
        const auto& nd = d.node(id);
        if (!orderPos.count(nd.var))
            return DiagramViolation{"variable " + nd.var + " not in order", path_to(d, id)};
        if ((int)nd.edges.size() != dsize)
            return DiagramViolation{"node lacks one edge per domain value", path_to(d, id)};
        for (int e : nd.edges)
            if (e < 0 || e >= n + 2)
                return DiagramViolation{"edge to unknown node", path_to(d, id)};
    }
    // acyclicity
    std::vector<int> state(n + 2, 0);
    std::function<bool(int)> cyc = [&](int id) {
        if (DecisionDiagram::is_sink(id)) return false;
        if (state[id] == 1) return true;
        if (state[id] == 2) return false;
        state[id] = 1;
        for (int e : d.node(id).edges)
            if (cyc(e)) return true;
        state[id] = 2;
        return false;
    };
    if (cyc(d.source)) return DiagramViolation{"cycle reachable from source", {d.source}};

    // freeness: no variable may label a node and reappear below it
    std::map<int, std::set<std::string>> below;  // vars labeling nodes in the sub-DAG
    std::function<const std::set<std::string>&(int)> vars = [&](int id) -> const std::set<std::string>& {
        static const std::set<std::string> none;
        if (DecisionDiagram::is_sink(id)) return none;
        auto it = below.find(id);
        if (it != below.end()) return it->second;
        std::set<std::string> acc{d.node(id).var};
        for (int e : d.node(id).edges) {
            const auto& sub = vars(e);
            acc.insert(sub.begin(), sub.end());
        }
        return below.emplace(id, std::move(acc)).first->second;
    };
    for (int id = 2; id < n + 2; ++id) {
        const auto& nd = d.node(id);
        for (int e : nd.edges)
            if (vars(e).count(nd.var))
                return DiagramViolation{"variable " + nd.var + " repeats on a path",
                                        path_to(d, id)};
    }
    // ODD: edges must respect the stored total order
    if (d.kind == DecisionDiagram::ODD) {
        for (int id = 2; id < n + 2; ++id) {
            const auto& nd = d.node(id);
            for (int e : nd.edges) {
                if (DecisionDiagram::is_sink(e)) continue;
                if (orderPos.at(d.node(e).var) <= orderPos.at(nd.var))
                    return DiagramViolation{"edge violates the variable order", path_to(d, e)};
            }
        }
    }
    return std::nullopt;
}

unsigned long long count_models(const DecisionDiagram& d, int n_vars) {
    if (validate(d)) throw std::invalid_argument("count_models: invalid diagram");
    int dsize = d.domain->size();
    std::map<int, std::set<std::string>> varsBelow;
    std::function<const std::set<std::string>&(int)> vars = [&](int id) -> const std::set<std::string>& {
        static const std::set<std::string> none;
        if (DecisionDiagram::is_sink(id)) return none;
        auto it = varsBelow.find(id);
        if (it != varsBelow.end()) return it->second;
        std::set<std::string> acc{d.node(id).var};
        for (int e : d.node(id).edges) {
            const auto& sub = vars(e);
            acc.insert(sub.begin(), sub.end());
        }
        return varsBelow.emplace(id, std::move(acc)).first->second;
    };
    auto pw = [&](int e) {
        unsigned long long r = 1;
        for (int i = 0; i < e; ++i) r *= (unsigned long long)dsize;
        return r;
    };
    std::map<int, unsigned long long> memo;
    // models over exactly the variables occurring below a node; skipped
    // variables are unconstrained and weighted by |D|.
    std::function<unsigned long long(int)> count = [&](int id) -> unsigned long long {
        if (id == DecisionDiagram::sink0) return 0;
        if (id == DecisionDiagram::sink1) return 1;
        auto it = memo.find(id);
        if (it != memo.end()) return it->second;
        const auto& nd = d.node(id);
        int mine = (int)vars(id).size();
        unsigned long long total = 0;
        for (int e : nd.edges)
            total += count(e) * pw(mine - 1 - (int)vars(e).size());
        memo[id] = total;
        return total;
    };
    int rootVars = DecisionDiagram::is_sink(d.source) ? 0 : (int)vars(d.source).size();
    if (n_vars < rootVars) throw std::invalid_argument("count_models: n_vars too small");
    return count(d.source) * pw(n_vars - rootVars);
}

DecisionDiagram reduce(const DecisionDiagram& d) {
    DecisionDiagram out;
    out.kind = d.kind;
    out.domain = d.domain;
    out.order = d.order;
    std::map<int, int> remap{{DecisionDiagram::sink0, DecisionDiagram::sink0},
                             {DecisionDiagram::sink1, DecisionDiagram::sink1}};
    std::map<std::pair<std::string, std::vector<int>>, int> unique;
    std::function<int(int)> build = [&](int id) -> int {
        auto it = remap.find(id);
        if (it != remap.end()) return it->second;
        const auto& nd = d.node(id);
        std::vector<int> edges;
        for (int e : nd.edges) edges.push_back(build(e));
        auto key = std::make_pair(nd.var, edges);
        auto uit = unique.find(key);
        int nid = uit != unique.end() ? uit->second : out.add_node(nd.var, edges);
        unique.emplace(std::move(key), nid);
        remap[id] = nid;
        return nid;
    };
    out.source = build(d.source);
    return out;
}

namespace {

// Deterministic topological ordering of the ids reachable from the source.
std::vector<int> topo_ids(const DecisionDiagram& d) {
    std::vector<int> order;
    std::set<int> seen;
    std::function<void(int)> dfs = [&](int id) {
        if (!seen.insert(id).second || DecisionDiagram::is_sink(id)) return;
        for (int e : d.node(id).edges) dfs(e);
        order.push_back(id);
    };
    dfs(d.source);
    std::reverse(order.begin(), order.end());
    return order;
}

}  // namespace

std::string to_dot(const DecisionDiagram& d) {
    std::ostringstream out;
    out << "digraph dd {\n";
    out << "  s0 [label=\"0\" shape=box];\n  s1 [label=\"1\" shape=box];\n";
    std::vector<int> ids = topo_ids(d);
    std::map<int, int> index;
    for (size_t i = 0; i < ids.size(); ++i) index[ids[i]] = (int)i;
    auto ref = [&](int id) {
        if (id == DecisionDiagram::sink0) return std::string("s0");
        if (id == DecisionDiagram::sink1) return std::string("s1");
        return "n" + std::to_string(index.at(id));
    };
    for (int id : ids)
        out << "  " << ref(id) << " [label=\"" << d.node(id).var << "\"];\n";
    for (int id : ids) {
        const auto& nd = d.node(id);
        for (size_t v = 0; v < nd.edges.size(); ++v)
            out << "  " << ref(id) << " -> " << ref(nd.edges[v]) << " [label=\""
                << d.domain->name((Value)v) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::string diagram_to_json(const DecisionDiagram& d) {
    nlohmann::json j;
    j["kind"] = d.kind == DecisionDiagram::ODD ? "ODD" : "FDD";
    j["domain"] = d.domain->symbols;
    j["order"] = d.order;
    j["source"] = d.source;
    j["sinks"] = {DecisionDiagram::sink0, DecisionDiagram::sink1};
    nlohmann::json nodes = nlohmann::json::array();
    for (size_t i = 0; i < d.nodes.size(); ++i) {
        nlohmann::json n;
        n["id"] = (int)i + 2;
        n["var"] = d.nodes[i].var;
        n["edges"] = d.nodes[i].edges;
        nodes.push_back(std::move(n));
    }
    j["nodes"] = std::move(nodes);
    return j.dump(2) + "\n";
}

DecisionDiagram diagram_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    DecisionDiagram d;
    d.kind = j.at("kind").get<std::string>() == "ODD" ? DecisionDiagram::ODD
                                                      : DecisionDiagram::FDD;
    d.domain = Domain::make(j.at("domain").get<std::vector<std::string>>());
    d.order = j.at("order").get<std::vector<std::string>>();
    d.source = j.at("source").get<int>();
    for (const auto& n : j.at("nodes")) {
        if (n.at("id").get<int>() != (int)d.nodes.size() + 2)
            throw std::invalid_argument("diagram json: ids must be dense and ordered");
        d.nodes.push_back({n.at("var").get<std::string>(), n.at("edges").get<std::vector<int>>()});
    }
    return d;
}

}  // namespace blockdd
