#include "gcs/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace gcs {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::WellConstrained: return "well-constrained";
        case Verdict::UnderConstrained: return "under-constrained";
        case Verdict::OverConstrained: return "over-constrained";
        case Verdict::Symmetric: return "symmetric";
    }
    return "?";
}

int ConstraintGraph::vertex(const std::string& id) const {
    for (size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return static_cast<int>(i);
    return -1;
}

int ConstraintGraph::edge_between(int a, int b) const {
    for (size_t i = 0; i < edges.size(); ++i) {
        const GraphEdge& e = edges[i];
        if ((e.u == a && e.v == b) || (e.u == b && e.v == a)) return static_cast<int>(i);
    }
    return -1;
}

std::vector<std::vector<int>> ConstraintGraph::components() const {
    int n = vertex_count();
    std::vector<int> parent(static_cast<size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
        return x;
    };
    for (const GraphEdge& e : edges) parent[static_cast<size_t>(find(e.u))] = find(e.v);
    std::map<int, std::vector<int>> groups;
    for (int v = 0; v < n; ++v) groups[find(v)].push_back(v);
    std::vector<std::vector<int>> out;
    for (auto& [root, members] : groups) out.push_back(members);
    std::sort(out.begin(), out.end());
    return out;
}

ConstraintGraph build_graph(const GcsProblem& problem) {
    ConstraintGraph g;
    for (const Element& e : problem.elements) {
        g.ids.push_back(e.id);
        g.kinds.push_back(e.kind);
        g.labels.push_back(dof(e.kind));
    }
    g.constraints = problem.constraints;
    for (size_t ci = 0; ci < problem.constraints.size(); ++ci) {
        const Constraint& c = problem.constraints[ci];
        int a = g.vertex(c.a);
        int b = g.vertex(c.b);
        if (a < 0 || b < 0 || a == b) continue;
        int ei = g.edge_between(a, b);
        if (ei < 0) {
            g.edges.push_back(GraphEdge{a, b, 0, {}});
            ei = static_cast<int>(g.edges.size()) - 1;
        }
        GraphEdge& e = g.edges[static_cast<size_t>(ei)];
        e.label += equation_count(c.kind);
        e.constraints.push_back(static_cast<int>(ci));
    }
    return g;
}

ConstraintGraph unit_graph(int n, const std::vector<std::pair<int, int>>& edges) {
    GcsProblem p;
    for (int i = 0; i < n; ++i) p.elements.push_back(Element{"v" + std::to_string(i + 1), ElementKind::Point, 0.0, {}});
    int k = 0;
    for (auto [a, b] : edges) {
        Constraint c;
        c.id = "e" + std::to_string(++k);
        c.kind = ConstraintKind::PointPointDistance;
        c.a = p.elements[static_cast<size_t>(a)].id;
        c.b = p.elements[static_cast<size_t>(b)].id;
        c.value = 1.0;
        p.constraints.push_back(c);
    }
    return build_graph(p);
}

int deficit(const ConstraintGraph& g) {
    int s = std::accumulate(g.labels.begin(), g.labels.end(), 0);
    for (const GraphEdge& e : g.edges) s -= e.label;
    return s;
}

int deficit(const ConstraintGraph& g, const std::vector<int>& subset) {
    if (subset.empty()) throw Error(ErrorCode::InvalidSubset, "empty vertex subset");
    std::vector<char> in(g.ids.size(), 0);
    int s = 0;
    for (int v : subset) {
        if (v < 0 || v >= g.vertex_count()) throw Error(ErrorCode::InvalidSubset, "vertex outside the graph");
        if (in[static_cast<size_t>(v)]) continue;
        in[static_cast<size_t>(v)] = 1;
        s += g.labels[static_cast<size_t>(v)];
    }
    for (const GraphEdge& e : g.edges)
        if (in[static_cast<size_t>(e.u)] && in[static_cast<size_t>(e.v)]) s -= e.label;
    return s;
}

namespace {

bool unit_labeled(const ConstraintGraph& g) {
    return std::all_of(g.labels.begin(), g.labels.end(), [](int l) { return l == 2; }) &&
           std::all_of(g.edges.begin(), g.edges.end(), [](const GraphEdge& e) { return e.label == 1; });
}

std::vector<int> shrink_witness(const ConstraintGraph& g, std::vector<int> w) {
    std::sort(w.begin(), w.end());
    bool changed = true;
    while (changed && w.size() > 2) {
        changed = false;
        for (size_t i = w.size(); i-- > 0;) {
            std::vector<int> trial = w;
            trial.erase(trial.begin() + static_cast<long>(i));
            if (trial.size() >= 2 && deficit(g, trial) < 3) {
                w = trial;
                changed = true;
                break;
            }
        }
    }
    return w;
}

}  // namespace

std::vector<int> pebble_game_witness(const ConstraintGraph& g) {
    int n = g.vertex_count();
    std::vector<int> pebbles(static_cast<size_t>(n), 2);
    std::vector<std::vector<int>> out(static_cast<size_t>(n));  // directed accepted edges

    auto find_pebble = [&](int start, int blocked, std::vector<char>& seen) -> bool {
        // DFS for a vertex with a free pebble; reverse the path when found.
        std::vector<int> prev(static_cast<size_t>(n), -1);
        std::vector<int> stack{start};
        seen[static_cast<size_t>(start)] = 1;
        seen[static_cast<size_t>(blocked)] = 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (int y : out[static_cast<size_t>(x)]) {
                if (seen[static_cast<size_t>(y)]) continue;
                seen[static_cast<size_t>(y)] = 1;
                prev[static_cast<size_t>(y)] = x;
                if (pebbles[static_cast<size_t>(y)] > 0) {
                    pebbles[static_cast<size_t>(y)]--;
                    int cur = y;
                    while (cur != start) {
                        int p = prev[static_cast<size_t>(cur)];
                        auto& lst = out[static_cast<size_t>(p)];
                        lst.erase(std::find(lst.begin(), lst.end(), cur));
                        out[static_cast<size_t>(cur)].push_back(p);
                        cur = p;
                    }
                    pebbles[static_cast<size_t>(start)]++;
                    return true;
                }
                stack.push_back(y);
            }
        }
        return false;
    };

    for (const GraphEdge& e : g.edges) {
        for (int rep = 0; rep < e.label; ++rep) {
            int u = e.u, v = e.v;
            bool ok = true;
            std::vector<char> seen_u(static_cast<size_t>(n), 0), seen_v(static_cast<size_t>(n), 0);
            while (pebbles[static_cast<size_t>(u)] < 2) {
                std::fill(seen_u.begin(), seen_u.end(), 0);
                if (!find_pebble(u, v, seen_u)) { ok = false; break; }
            }
            while (ok && pebbles[static_cast<size_t>(v)] < 2) {
                std::fill(seen_v.begin(), seen_v.end(), 0);
                if (!find_pebble(v, u, seen_v)) { ok = false; break; }
            }
            if (ok) {
                pebbles[static_cast<size_t>(u)]--;
                out[static_cast<size_t>(u)].push_back(v);
                continue;
            }
            // Reachable set from u and v forms the rigid block that the new edge over-constrains.
            std::vector<char> reach(static_cast<size_t>(n), 0);
            std::vector<int> stack{u, v};
            reach[static_cast<size_t>(u)] = reach[static_cast<size_t>(v)] = 1;
            while (!stack.empty()) {
                int x = stack.back();
                stack.pop_back();
                for (int y : out[static_cast<size_t>(x)])
                    if (!reach[static_cast<size_t>(y)]) {
                        reach[static_cast<size_t>(y)] = 1;
                        stack.push_back(y);
                    }
            }
            std::vector<int> w;
            for (int i = 0; i < n; ++i)
                if (reach[static_cast<size_t>(i)]) w.push_back(i);
            return shrink_witness(g, w);
        }
    }
    return {};
}

std::vector<int> scan_over_constrained(const ConstraintGraph& g, bool& limited, int cap) {
    int n = g.vertex_count();
    limited = false;
    if (n > cap) {
        limited = true;
        return {};
    }
    std::vector<uint32_t> adj_w(static_cast<size_t>(n) * static_cast<size_t>(n), 0);
    for (const GraphEdge& e : g.edges) {
        adj_w[static_cast<size_t>(e.u * n + e.v)] += static_cast<uint32_t>(e.label);
        adj_w[static_cast<size_t>(e.v * n + e.u)] += static_cast<uint32_t>(e.label);
    }
    size_t total = size_t{1} << n;
    std::vector<int> def(total, 0);
    uint32_t best = 0;
    int best_size = n + 1;
    for (size_t mask = 1; mask < total; ++mask) {
        int v = std::countr_zero(mask);
        size_t rest = mask & (mask - 1);
        int d = def[rest] + g.labels[static_cast<size_t>(v)];
        for (size_t r = rest; r; r &= r - 1) d -= static_cast<int>(adj_w[static_cast<size_t>(v * n + std::countr_zero(r))]);
        def[mask] = d;
        int sz = std::popcount(mask);
        if (sz >= 2 && d < 3 && sz < best_size) {
            best_size = sz;
            best = static_cast<uint32_t>(mask);
        }
    }
    std::vector<int> w;
    for (int i = 0; i < n; ++i)
        if (best & (1u << i)) w.push_back(i);
    return w;
}

namespace {

ConstraintGraph induced(const ConstraintGraph& g, const std::vector<int>& verts, std::vector<int>& back) {
    ConstraintGraph s;
    std::vector<int> map(g.ids.size(), -1);
    for (int v : verts) {
        map[static_cast<size_t>(v)] = s.vertex_count();
        s.ids.push_back(g.ids[static_cast<size_t>(v)]);
        s.kinds.push_back(g.kinds[static_cast<size_t>(v)]);
        s.labels.push_back(g.labels[static_cast<size_t>(v)]);
    }
    for (const GraphEdge& e : g.edges)
        if (map[static_cast<size_t>(e.u)] >= 0 && map[static_cast<size_t>(e.v)] >= 0)
            s.edges.push_back(GraphEdge{map[static_cast<size_t>(e.u)], map[static_cast<size_t>(e.v)], e.label, e.constraints});
    s.constraints = g.constraints;
    back = verts;
    return s;
}

}  // namespace

Classification classify(const ConstraintGraph& g) {
    Classification out;
    out.deficit = deficit(g);
    int n = g.vertex_count();
    if (n == 2 && g.edges.size() == 1 && out.deficit == 2 && is_circle(g.kinds[0]) && is_circle(g.kinds[1])) {
        out.verdict = Verdict::Symmetric;
        return out;
    }
    auto comps = g.components();
    bool under = comps.size() > 1;
    for (const auto& comp : comps) {
        std::vector<int> back;
        ConstraintGraph sub = induced(g, comp, back);
        if (sub.vertex_count() == 1) {
            if (sub.labels[0] > 2) under = true;
            continue;
        }
        std::vector<int> w;
        if (unit_labeled(sub)) {
            w = pebble_game_witness(sub);
        } else {
            bool limited = false;
            w = scan_over_constrained(sub, limited);
            out.budget_limited = out.budget_limited || limited;
        }
        if (!w.empty()) {
            out.verdict = Verdict::OverConstrained;
            for (int v : w) out.witness.push_back(back[static_cast<size_t>(v)]);
            std::sort(out.witness.begin(), out.witness.end());
            return out;
        }
        if (deficit(sub) > 3) under = true;
    }
    out.verdict = under ? Verdict::UnderConstrained : Verdict::WellConstrained;
    return out;
}

std::vector<Violation> check_vradius_sharing(const GcsProblem& problem,
                                             const std::vector<std::vector<std::string>>& clusters) {
    std::vector<Violation> out;
    for (const Element& e : problem.elements) {
        if (e.kind != ElementKind::VariableCircle) continue;
        int count = 0;
        for (const auto& c : clusters)
            if (std::find(c.begin(), c.end(), e.id) != c.end()) ++count;
        if (count >= 2)
            out.push_back({e.id, "variable-radius circle shared by " + std::to_string(count) +
                                     " clusters: radius fixed twice while the clusters rotate freely about it"});
    }
    return out;
}

}  // namespace gcs
