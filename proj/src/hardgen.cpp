#include "blockdd/hardgen.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <sstream>
#include <stdexcept>

#include "blockdd/rng.hpp"

namespace blockdd {

namespace {

std::vector<std::vector<int>> adjacency(const BipartiteGraph& g, int side) {
    std::vector<std::vector<int>> adj(g.n);
    for (const auto& [l, r] : g.edges) {
        if (side == 0)
            adj[l].push_back(r);
        else
            adj[r].push_back(l);
    }
    return adj;
}

// |N(S)| for S a subset of one side (S never meets its own neighborhood).
size_t neighborhood_size(const std::vector<std::vector<int>>& adj, const std::vector<int>& s) {
    std::set<int> nb;
    for (int v : s) nb.insert(adj[v].begin(), adj[v].end());
    return nb.size();
}

unsigned long long subset_count(int n, int maxSize, unsigned long long cap) {
    unsigned long long total = 0, binom = 1;
    for (int s = 1; s <= maxSize; ++s) {
        binom = binom * (unsigned long long)(n - s + 1) / (unsigned long long)s;
        total += binom;
        if (total > cap) return cap + 1;
    }
    return total;
}

}  // namespace

int BipartiteGraph::maxDegree() const {
    std::vector<int> degL(n, 0), degR(n, 0);
    for (const auto& [l, r] : edges) {
        ++degL[l];
        ++degR[r];
    }
    int d = 0;
    for (int i = 0; i < n; ++i) d = std::max({d, degL[i], degR[i]});
    return d;
}

bool BipartiteGraph::hasEdge(int left, int right) const {
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(left, right));
}

BipartiteGraph random_matching_union(int n, int r, uint64_t seed) {
    if (n < 1 || r < 1) throw std::invalid_argument("random_matching_union: need n >= 1, r >= 1");
    SplitMix64 rng(seed);
    BipartiteGraph g;
    g.n = n;
    for (int j = 0; j < r; ++j) {
        std::vector<int> pi = rng.permutation(n);
        for (int i = 0; i < n; ++i) g.edges.emplace_back(i, pi[i]);
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    return g;
}

ExpansionReport verify_expansion(const BipartiteGraph& g, double alpha, double c,
                                 unsigned long long budget, uint64_t seed) {
    const int maxSize = std::max(0, (int)(alpha * g.n + 1e-9));
    std::vector<std::vector<std::vector<int>>> adj = {adjacency(g, 0), adjacency(g, 1)};

    auto expands = [&](int side, const std::vector<int>& s, size_t* nbOut) {
        size_t nb = neighborhood_size(adj[side], s);
        if (nbOut) *nbOut = nb;
        return (double)nb >= c * (double)s.size() - 1e-9;
    };
    auto refute = [&](int side, const std::vector<int>& s) {
        ExpansionReport rep;
        rep.verdict = ExpansionReport::REFUTED;
        rep.witnessSide = side;
        rep.witnessSet = s;
        if (expands(side, s, &rep.neighborhoodSize))
            throw std::logic_error("verify_expansion: witness failed re-check");
        return rep;
    };

    if (2 * subset_count(g.n, maxSize, budget) <= budget) {
        // exhaustive: all subsets of each side of size 1..maxSize
        for (int side = 0; side < 2; ++side) {
            std::vector<int> s;
            std::function<std::optional<ExpansionReport>(int)> rec =
                [&](int from) -> std::optional<ExpansionReport> {
                if (!s.empty() && !expands(side, s, nullptr)) return refute(side, s);
                if ((int)s.size() == maxSize) return std::nullopt;
                for (int v = from; v < g.n; ++v) {
                    s.push_back(v);
                    if (auto rep = rec(v + 1)) return rep;
                    s.pop_back();
                }
                return std::nullopt;
            };
            if (auto rep = rec(0)) return *rep;
        }
        ExpansionReport rep;
        rep.verdict = ExpansionReport::VERIFIED;
        return rep;
    }

    SplitMix64 rng(seed);
    for (unsigned long long t = 0; t < budget; ++t) {
        int side = (int)rng.below(2);
        int size = 1 + (int)rng.below((uint64_t)maxSize);
        std::vector<int> perm = rng.permutation(g.n);
        std::vector<int> s(perm.begin(), perm.begin() + size);
        std::sort(s.begin(), s.end());
        if (!expands(side, s, nullptr)) return refute(side, s);
    }
    ExpansionReport rep;
    rep.verdict = ExpansionReport::SAMPLED_OK;
    return rep;
}

Matching greedy_induced_matching(const BipartiteGraph& g, const std::set<int>& x) {
    auto inX = [&](int side, int v) { return x.count(side == 0 ? v : g.n + v) > 0; };

    // greedy crossing matching: exactly one endpoint in x, endpoints unused
    std::vector<char> usedL(g.n, 0), usedR(g.n, 0);
    Matching crossing;
    for (const auto& [l, r] : g.edges) {
        if (usedL[l] || usedR[r]) continue;
        if (inX(0, l) == inX(1, r)) continue;
        crossing.emplace_back(l, r);
        usedL[l] = usedR[r] = 1;
    }

    // greedy induced filter: reject an edge if the graph connects one of its
    // endpoints to an endpoint of an already kept edge
    Matching kept;
    for (const auto& [l, r] : crossing) {
        bool clash = false;
        for (const auto& [kl, kr] : kept)
            if (g.hasEdge(l, kr) || g.hasEdge(kl, r)) {
                clash = true;
                break;
            }
        if (!clash) kept.emplace_back(l, r);
    }

    // verify: induced, and every edge crosses x
    for (size_t i = 0; i < kept.size(); ++i) {
        if (inX(0, kept[i].first) == inX(1, kept[i].second))
            throw std::logic_error("greedy_induced_matching: edge does not cross x");
        for (size_t j = 0; j < kept.size(); ++j)
            if (i != j && (g.hasEdge(kept[i].first, kept[j].second)))
                throw std::logic_error("greedy_induced_matching: matching not induced");
    }
    return kept;
}

Formula build_hard_formula(const BipartiteGraph& g, DomainPtr dom, const Relation& rel,
                           int x_pos, int y_pos) {
    if (rel.arity < 2) throw std::invalid_argument("build_hard_formula: relation arity < 2");
    if (x_pos == y_pos || x_pos < 0 || y_pos < 0 || x_pos >= rel.arity || y_pos >= rel.arity)
        throw std::invalid_argument("build_hard_formula: bad pivot positions");

    Formula f;
    f.domain = dom;
    for (int i = 0; i < g.n; ++i) f.variables.push_back("xa" + std::to_string(i));
    for (int i = 0; i < g.n; ++i) f.variables.push_back("xb" + std::to_string(i));
    for (size_t e = 0; e < g.edges.size(); ++e) {
        const auto& [u, v] = g.edges[e];
        std::vector<std::string> scope(rel.arity);
        scope[x_pos] = "xa" + std::to_string(u);
        scope[y_pos] = "xb" + std::to_string(v);
        int k = 0;
        for (int p = 0; p < rel.arity; ++p) {
            if (p == x_pos || p == y_pos) continue;
            scope[p] = "z" + std::to_string(e) + "_" + std::to_string(k++);
            f.variables.push_back(scope[p]);
        }
        f.constraints.emplace_back(scope, rel);
    }
    return f;
}

std::optional<std::pair<Formula, FoolingSet>> fooling_family(const Relation& rel, DomainPtr dom,
                                                             int x_pos, int y_pos, int n) {
    if (n < 1) throw std::invalid_argument("fooling_family: need n >= 1");
    if (x_pos == y_pos || x_pos < 0 || y_pos < 0 || x_pos >= rel.arity || y_pos >= rel.arity)
        throw std::invalid_argument("fooling_family: bad pivot positions");

    std::vector<int> zpos;
    for (int p = 0; p < rel.arity; ++p)
        if (p != x_pos && p != y_pos) zpos.push_back(p);
    const int m = (int)zpos.size();

    // a base pair fools iff for every z-split at least one recombination
    // (x and z-left from one tuple, y and z-right from the other) fails
    auto fools = [&](const Tuple& ta, const Tuple& tb) {
        for (unsigned mask = 0; mask < (1u << m); ++mask) {
            Tuple s1 = tb, s2 = ta;  // s1: x,z1 from ta; s2: x,z1 from tb
            s1[x_pos] = ta[x_pos];
            s2[x_pos] = tb[x_pos];
            for (int k = 0; k < m; ++k)
                if (mask & (1u << k)) {
                    s1[zpos[k]] = ta[zpos[k]];
                    s2[zpos[k]] = tb[zpos[k]];
                }
            if (rel.contains(s1) && rel.contains(s2)) return false;
        }
        return true;
    };

    const Tuple *ta = nullptr, *tb = nullptr;
    for (const auto& t1 : rel.tuples) {
        for (const auto& t2 : rel.tuples) {
            if (t1 == t2) continue;
            if (fools(t1, t2)) {
                ta = &t1;
                tb = &t2;
                break;
            }
        }
        if (ta) break;
    }
    if (!ta) return std::nullopt;

    auto copyVar = [&](int pos, int i) -> std::string {
        if (pos == x_pos) return "x" + std::to_string(i);
        if (pos == y_pos) return "y" + std::to_string(i);
        int k = (int)(std::find(zpos.begin(), zpos.end(), pos) - zpos.begin());
        return "z" + std::to_string(i) + "_" + std::to_string(k);
    };

    Formula f;
    f.domain = dom;
    for (int i = 0; i < n; ++i) {
        std::vector<std::string> scope(rel.arity);
        for (int p = 0; p < rel.arity; ++p) {
            scope[p] = copyVar(p, i);
            f.variables.push_back(scope[p]);
        }
        f.constraints.emplace_back(scope, rel);
    }

    FoolingSet fs;
    fs.a["x"] = (*ta)[x_pos];
    fs.a["y"] = (*ta)[y_pos];
    fs.b["x"] = (*tb)[x_pos];
    fs.b["y"] = (*tb)[y_pos];
    for (int k = 0; k < m; ++k) {
        fs.a["z" + std::to_string(k)] = (*ta)[zpos[k]];
        fs.b["z" + std::to_string(k)] = (*tb)[zpos[k]];
    }
    for (unsigned pick = 0; pick < (1u << n); ++pick) {
        Assignment member;
        for (int i = 0; i < n; ++i) {
            const Tuple& t = (pick & (1u << i)) ? *tb : *ta;
            for (int p = 0; p < rel.arity; ++p) member[copyVar(p, i)] = t[p];
        }
        fs.family.push_back(std::move(member));
    }
    return std::make_pair(std::move(f), std::move(fs));
}

bool certify_fooling(const Formula& f, const FoolingSet& fs, const std::set<std::string>& xside) {
    auto satisfies = [&](const Assignment& a) {
        for (const auto& c : f.constraints) {
            Tuple t;
            for (const auto& v : c.scope) {
                auto it = a.find(v);
                if (it == a.end()) return false;
                t.push_back(it->second);
            }
            if (!c.rel.contains(t)) return false;
        }
        return true;
    };
    auto mix = [&](const Assignment& left, const Assignment& right) {
        Assignment out;
        for (const auto& v : f.variables)
            out[v] = (xside.count(v) ? left : right).at(v);
        return out;
    };

    for (const auto& d : fs.family)
        if (!satisfies(d)) return false;
    for (size_t i = 0; i < fs.family.size(); ++i)
        for (size_t j = i + 1; j < fs.family.size(); ++j)
            if (satisfies(mix(fs.family[i], fs.family[j])) &&
                satisfies(mix(fs.family[j], fs.family[i])))
                return false;
    return true;
}

std::vector<BenchRow> growth_bench(const std::function<Formula(int, uint64_t)>& gen,
                                   const std::function<DecisionDiagram(const Formula&)>& compile,
                                   const std::vector<int>& ns, uint64_t seed) {
    std::vector<std::future<BenchRow>> jobs;
    for (int n : ns)
        jobs.push_back(std::async(std::launch::async, [&, n] {
            Formula f = gen(n, seed);
            auto t0 = std::chrono::steady_clock::now();
            DecisionDiagram d = compile(f);
            auto t1 = std::chrono::steady_clock::now();
            BenchRow row;
            row.n = n;
            row.vars = f.variables.size();
            row.constraints = f.constraints.size();
            row.diagramNodes = d.nodes.size();
            row.millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
            return row;
        }));
    std::vector<BenchRow> rows;
    for (auto& j : jobs) rows.push_back(j.get());
    std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) { return a.n < b.n; });
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << "n,vars,constraints,diagram_nodes,millis\n";
    for (const auto& r : rows)
        out << r.n << "," << r.vars << "," << r.constraints << "," << r.diagramNodes << ","
            << r.millis << "\n";
    return out.str();
}

}  // namespace blockdd
