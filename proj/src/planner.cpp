#include "gcs/planner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace gcs {

namespace {

bool is_vc(const ConstraintGraph& g, int v) { return g.kinds[static_cast<size_t>(v)] == ElementKind::VariableCircle; }
bool is_line(const ConstraintGraph& g, int v) { return g.kinds[static_cast<size_t>(v)] == ElementKind::Line; }

const Constraint* single_constraint(const ConstraintGraph& g, int e) {
    const GraphEdge& ed = g.edges[static_cast<size_t>(e)];
    if (ed.label != 1 || ed.constraints.size() != 1) return nullptr;
    return &g.constraints[static_cast<size_t>(ed.constraints[0])];
}

// Constraint between placed anchor y and new element x that ConstructThird can consume.
bool growth_usable(const ConstraintGraph& g, int e, int y, int x) {
    const Constraint* c = single_constraint(g, e);
    if (!c || is_vc(g, x)) return false;
    if (is_vc(g, y)) {
        switch (c->kind) {
            case ConstraintKind::TangentLineCircle: return is_line(g, x);
            case ConstraintKind::CenterDistance:
                if (is_line(g, x)) return false;
                if (!c->perimeter) return true;
                return c->b == g.ids[static_cast<size_t>(y)] && c->value == 0.0;
            default: return false;
        }
    }
    switch (c->kind) {
        case ConstraintKind::PointPointDistance:
        case ConstraintKind::PointLineDistance:
        case ConstraintKind::LineLineAngle:
        case ConstraintKind::PointOnLine:
        case ConstraintKind::TangentLineCircle:
        case ConstraintKind::TangentCircleCircle:
        case ConstraintKind::CenterDistance: return true;
        default: return false;
    }
}

// Constraint tying a variable-radius circle x to a placed element y through its perimeter.
bool perimeter_usable(const ConstraintGraph& g, int e, int y, int x) {
    const Constraint* c = single_constraint(g, e);
    if (!c || !is_vc(g, x) || is_vc(g, y)) return false;
    const std::string& xs = g.ids[static_cast<size_t>(x)];
    switch (c->kind) {
        case ConstraintKind::TangentLineCircle: return is_line(g, y) && c->value == 0.0;
        case ConstraintKind::TangentCircleCircle: return g.kinds[static_cast<size_t>(y)] == ElementKind::FixedCircle;
        case ConstraintKind::CenterDistance: return c->perimeter && c->b == xs && !is_line(g, y);
        default: return false;
    }
}

}  // namespace

bool is_minimal_edge(const ConstraintGraph& g, int e) {
    const GraphEdge& ed = g.edges[static_cast<size_t>(e)];
    if (is_vc(g, ed.u) || is_vc(g, ed.v)) return false;
    const Constraint* c = single_constraint(g, e);
    if (!c) return false;
    if (!growth_usable(g, e, ed.u, ed.v)) return false;
    bool lu = is_line(g, ed.u), lv = is_line(g, ed.v);
    if (lu && lv) return c->kind == ConstraintKind::LineLineAngle && angle_gap_mod_pi(c->value, 0.0) > 1e-12;
    if (lu || lv) return true;
    switch (c->kind) {
        case ConstraintKind::PointPointDistance: return c->value > 0.0;
        case ConstraintKind::CenterDistance: return c->perimeter || c->value > 0.0;
        case ConstraintKind::TangentCircleCircle: return true;
        default: return false;
    }
}

std::vector<int> find_minimal(const ConstraintGraph& g) {
    std::vector<int> out;
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
        if (is_minimal_edge(g, e)) out.push_back(e);
    return out;
}

SerialOrder serialize(const ConstraintGraph& g, int start_edge) {
    SerialOrder out;
    int n = g.vertex_count();
    std::vector<char> placed(static_cast<size_t>(n), 0);
    const GraphEdge& s = g.edges[static_cast<size_t>(start_edge)];
    placed[static_cast<size_t>(s.u)] = placed[static_cast<size_t>(s.v)] = 1;
    out.order = {s.u, s.v};
    bool grew = true;
    while (grew) {
        grew = false;
        for (int x = 0; x < n && !grew; ++x) {
            if (placed[static_cast<size_t>(x)]) continue;
            int eq = 0;
            for (const GraphEdge& e : g.edges) {
                if (e.u == x && placed[static_cast<size_t>(e.v)]) eq += e.label;
                if (e.v == x && placed[static_cast<size_t>(e.u)]) eq += e.label;
            }
            if (eq >= 2 && eq >= g.labels[static_cast<size_t>(x)]) {
                placed[static_cast<size_t>(x)] = 1;
                out.order.push_back(x);
                grew = true;
            }
        }
    }
    out.complete = static_cast<int>(out.order.size()) == n;
    return out;
}

std::vector<int> DecompositionTree::leaves() const {
    std::vector<int> out;
    for (const TreeNode& n : nodes)
        if (n.kind == TreeNode::Kind::Leaf || n.kind == TreeNode::Kind::RelaxedLeaf) out.push_back(n.edges.at(0));
    std::sort(out.begin(), out.end());
    return out;
}

std::string DecompositionTree::serialize() const {
    std::function<void(int, std::ostringstream&)> rec = [&](int i, std::ostringstream& os) {
        const TreeNode& n = nodes[static_cast<size_t>(i)];
        switch (n.kind) {
            case TreeNode::Kind::Leaf: os << "L" << n.edges[0]; return;
            case TreeNode::Kind::RelaxedLeaf: os << "R" << (-1 - n.edges[0]); return;
            case TreeNode::Kind::Triangle: os << "T("; break;
            case TreeNode::Kind::VCSequential: os << "S" << n.vc << "("; break;
            case TreeNode::Kind::VCMerge: os << "M" << n.vc << "("; break;
        }
        for (size_t k = 0; k < n.children.size(); ++k) {
            if (k) os << ",";
            rec(n.children[k], os);
        }
        os << ")";
    };
    std::ostringstream os;
    if (root >= 0) rec(root, os);
    return os.str();
}

// ---- decomposition -----------------------------------------------------------------------------

namespace {

struct Cluster {
    std::vector<char> in;
    int node = -1;
    int size = 0;
    int min_vertex() const {
        for (size_t i = 0; i < in.size(); ++i)
            if (in[i]) return static_cast<int>(i);
        return -1;
    }
};

struct Decomposer {
    const ConstraintGraph& g;
    DecomposeOptions opt;
    int n = 0;
    // Real graph edges 0..m-1, then virtual edges.
    std::vector<std::pair<int, int>> ends;
    std::vector<int> rank;
    std::vector<char> consumed;
    std::vector<Cluster> clusters;  // active clusters only
    DecompositionTree tree;

    Decomposer(const ConstraintGraph& graph, const DecomposeOptions& o) : g(graph), opt(o), n(graph.vertex_count()) {
        for (const GraphEdge& e : g.edges) ends.push_back({e.u, e.v});
        size_t m = ends.size();
        std::vector<int> order(m);
        for (size_t i = 0; i < m; ++i) order[i] = static_cast<int>(i);
        if (opt.seed != 0) {
            std::mt19937 rng(opt.seed);
            for (size_t i = m; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
        }
        rank.assign(m, 0);
        for (size_t i = 0; i < m; ++i) rank[static_cast<size_t>(order[i])] = static_cast<int>(i);
        consumed.assign(m, 0);
    }

    int m_real() const { return static_cast<int>(g.edges.size()); }
    bool is_virtual(int e) const { return e >= m_real(); }
    int tree_edge(int e) const { return is_virtual(e) ? -1 - (e - m_real()) : e; }
    int other(int e, int y) const { return ends[static_cast<size_t>(e)].first == y ? ends[static_cast<size_t>(e)].second : ends[static_cast<size_t>(e)].first; }

    bool usable(int e, int y, int x) const { return is_virtual(e) || growth_usable(g, e, y, x); }
    bool seedable(int e) const { return is_virtual(e) || is_minimal_edge(g, e); }

    int add_node(TreeNode node) {
        std::sort(node.vertices.begin(), node.vertices.end());
        std::sort(node.edges.begin(), node.edges.end());
        tree.nodes.push_back(std::move(node));
        return static_cast<int>(tree.nodes.size()) - 1;
    }

    int leaf(int e) {
        TreeNode t;
        t.kind = is_virtual(e) ? TreeNode::Kind::RelaxedLeaf : TreeNode::Kind::Leaf;
        t.vertices = {ends[static_cast<size_t>(e)].first, ends[static_cast<size_t>(e)].second};
        t.edges = {tree_edge(e)};
        consumed[static_cast<size_t>(e)] = 1;
        return add_node(t);
    }

    Cluster make_cluster(const std::vector<int>& verts, int node) {
        Cluster c;
        c.in.assign(static_cast<size_t>(n), 0);
        for (int v : verts) c.in[static_cast<size_t>(v)] = 1;
        c.size = static_cast<int>(verts.size());
        c.node = node;
        return c;
    }

    std::vector<int> verts_of(const Cluster& c) const {
        std::vector<int> out;
        for (int i = 0; i < n; ++i)
            if (c.in[static_cast<size_t>(i)]) out.push_back(i);
        return out;
    }

    // Unconsumed edges from x into cluster c, by priority.
    std::vector<int> edges_into(const Cluster& c, int x, bool perimeter) const {
        std::vector<int> out;
        for (int e = 0; e < static_cast<int>(ends.size()); ++e) {
            if (consumed[static_cast<size_t>(e)]) continue;
            auto [a, b] = ends[static_cast<size_t>(e)];
            int y;
            if (a == x) y = b;
            else if (b == x) y = a;
            else continue;
            if (!c.in[static_cast<size_t>(y)]) continue;
            bool ok = perimeter ? (!is_virtual(e) && perimeter_usable(g, e, y, x)) : usable(e, y, x);
            if (ok) out.push_back(e);
        }
        std::sort(out.begin(), out.end(), [&](int p, int q) { return rank_of(p) < rank_of(q); });
        return out;
    }

    int rank_of(int e) const { return is_virtual(e) ? 1000000 + e : rank[static_cast<size_t>(e)]; }

    bool in_any_cluster(int v) const {
        return std::any_of(clusters.begin(), clusters.end(), [&](const Cluster& c) { return c.in[static_cast<size_t>(v)] != 0; });
    }

    // Lowest-priority valid pair of growth edges for x, or nullopt.
    std::optional<std::pair<int, int>> growth_pair(const Cluster& c, int x) const {
        std::vector<int> es = edges_into(c, x, false);
        for (size_t i = 0; i < es.size(); ++i)
            for (size_t j = i + 1; j < es.size(); ++j) {
                int y1 = other(es[i], x), y2 = other(es[j], x);
                if (is_line(g, x) && is_line(g, y1) && is_line(g, y2)) continue;
                return std::make_pair(es[i], es[j]);
            }
        return std::nullopt;
    }

    bool try_grow() {
        for (size_t ci = 0; ci < clusters.size(); ++ci) {
            Cluster& c = clusters[ci];
            int best_x = -1;
            std::pair<int, int> best{};
            std::pair<int, int> best_rank{0, 0};
            for (int x = 0; x < n; ++x) {
                if (c.in[static_cast<size_t>(x)] || is_vc(g, x)) continue;
                auto p = growth_pair(c, x);
                if (!p) continue;
                std::pair<int, int> r{rank_of(p->first), rank_of(p->second)};
                if (best_x < 0 || r < best_rank) {
                    best_x = x;
                    best = *p;
                    best_rank = r;
                }
            }
            if (best_x >= 0) {
                int x = best_x;
                int a = other(best.first, x), b = other(best.second, x);
                int l1 = leaf(best.first), l2 = leaf(best.second);
                TreeNode t;
                t.kind = TreeNode::Kind::Triangle;
                t.children = {c.node, l1, l2};
                t.shared = {a, x, b};
                t.vertices = verts_of(c);
                t.vertices.push_back(x);
                const TreeNode& cn = tree.nodes[static_cast<size_t>(c.node)];
                t.edges = cn.edges;
                t.edges.push_back(tree_edge(best.first));
                t.edges.push_back(tree_edge(best.second));
                int node = add_node(t);
                c.in[static_cast<size_t>(x)] = 1;
                c.size++;
                c.node = node;
                return true;
            }
        }
        // Variable-radius circle from three placed objects of one cluster.
        for (size_t ci = 0; ci < clusters.size(); ++ci) {
            Cluster& c = clusters[ci];
            for (int x = 0; x < n; ++x) {
                if (!is_vc(g, x) || in_any_cluster(x)) continue;
                std::vector<int> es = edges_into(c, x, true);
                if (es.size() < 3) continue;
                es.resize(3);
                TreeNode t;
                t.kind = TreeNode::Kind::VCSequential;
                t.children = {c.node};
                t.vc = x;
                t.vc_edges = es;
                t.vertices = verts_of(c);
                t.vertices.push_back(x);
                t.edges = tree.nodes[static_cast<size_t>(c.node)].edges;
                for (int e : es) {
                    t.edges.push_back(e);
                    consumed[static_cast<size_t>(e)] = 1;
                }
                c.node = add_node(t);
                c.in[static_cast<size_t>(x)] = 1;
                c.size++;
                return true;
            }
        }
        return false;
    }

    std::vector<int> intersection(const Cluster& a, const Cluster& b) const {
        std::vector<int> out;
        for (int i = 0; i < n; ++i)
            if (a.in[static_cast<size_t>(i)] && b.in[static_cast<size_t>(i)]) out.push_back(i);
        return out;
    }

    std::vector<size_t> sorted_clusters() const {
        std::vector<size_t> idx(clusters.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
            return std::make_pair(clusters[a].size, clusters[a].min_vertex()) <
                   std::make_pair(clusters[b].size, clusters[b].min_vertex());
        });
        return idx;
    }

    // Shared vertices (u, v, w) of a mergeable triple, or nullopt.
    std::optional<std::array<int, 3>> triple_shares(const Cluster& a, const Cluster& b, const Cluster& c) const {
        auto ab = intersection(a, b), bc = intersection(b, c), ca = intersection(c, a);
        if (ab.size() != 1 || bc.size() != 1 || ca.size() != 1) return std::nullopt;
        std::array<int, 3> s{ab[0], bc[0], ca[0]};
        if (s[0] == s[1] || s[1] == s[2] || s[0] == s[2]) return std::nullopt;
        for (int v : s)
            if (is_vc(g, v)) return std::nullopt;
        if (is_line(g, s[0]) && is_line(g, s[1]) && is_line(g, s[2])) return std::nullopt;
        return s;
    }

    void replace_clusters(const std::vector<size_t>& gone, Cluster merged) {
        std::vector<Cluster> keep;
        for (size_t i = 0; i < clusters.size(); ++i)
            if (std::find(gone.begin(), gone.end(), i) == gone.end()) keep.push_back(clusters[i]);
        keep.push_back(std::move(merged));
        clusters = std::move(keep);
    }

    bool try_merge() {
        auto idx = sorted_clusters();
        for (size_t i = 0; i < idx.size(); ++i)
            for (size_t j = i + 1; j < idx.size(); ++j)
                for (size_t k = j + 1; k < idx.size(); ++k) {
                    const Cluster &a = clusters[idx[i]], &b = clusters[idx[j]], &c = clusters[idx[k]];
                    auto s = triple_shares(a, b, c);
                    if (!s) continue;
                    TreeNode t;
                    t.kind = TreeNode::Kind::Triangle;
                    t.children = {a.node, b.node, c.node};
                    t.shared = *s;
                    std::set<int> vs;
                    for (const Cluster* cl : {&a, &b, &c})
                        for (int v : verts_of(*cl)) vs.insert(v);
                    t.vertices.assign(vs.begin(), vs.end());
                    for (int ch : t.children) {
                        const auto& es = tree.nodes[static_cast<size_t>(ch)].edges;
                        t.edges.insert(t.edges.end(), es.begin(), es.end());
                    }
                    std::vector<int> verts = t.vertices;
                    int node = add_node(t);
                    replace_clusters({idx[i], idx[j], idx[k]}, make_cluster(verts, node));
                    return true;
                }
        // Variable-radius circle merging two clusters that share one element.
        for (int x = 0; x < n; ++x) {
            if (!is_vc(g, x) || in_any_cluster(x)) continue;
            for (size_t i = 0; i < idx.size(); ++i)
                for (size_t j = 0; j < idx.size(); ++j) {
                    if (i == j) continue;
                    const Cluster &a = clusters[idx[i]], &b = clusters[idx[j]];
                    auto sh = intersection(a, b);
                    if (sh.size() != 1 || is_vc(g, sh[0])) continue;
                    int e0 = sh[0];
                    auto strip = [&](std::vector<int> es) {
                        es.erase(std::remove_if(es.begin(), es.end(), [&](int e) { return other(e, x) == e0; }), es.end());
                        return es;
                    };
                    auto ea = strip(edges_into(a, x, true)), eb = strip(edges_into(b, x, true));
                    if (ea.size() < 2 || eb.size() < 2) continue;
                    TreeNode t;
                    t.kind = TreeNode::Kind::VCMerge;
                    t.children = {a.node, b.node};
                    t.shared = {e0, -1, -1};
                    t.vc = x;
                    t.vc_edges = {ea[0], ea[1], eb[0], eb[1]};
                    std::set<int> vs{x};
                    for (const Cluster* cl : {&a, &b})
                        for (int v : verts_of(*cl)) vs.insert(v);
                    t.vertices.assign(vs.begin(), vs.end());
                    for (int ch : t.children) {
                        const auto& es = tree.nodes[static_cast<size_t>(ch)].edges;
                        t.edges.insert(t.edges.end(), es.begin(), es.end());
                    }
                    for (int e : t.vc_edges) {
                        t.edges.push_back(e);
                        consumed[static_cast<size_t>(e)] = 1;
                    }
                    std::vector<int> verts = t.vertices;
                    int node = add_node(t);
                    replace_clusters({idx[i], idx[j]}, make_cluster(verts, node));
                    return true;
                }
        }
        return false;
    }

    bool try_seed() {
        int best = -1;
        for (int e = 0; e < static_cast<int>(ends.size()); ++e) {
            if (consumed[static_cast<size_t>(e)] || !seedable(e)) continue;
            auto [a, b] = ends[static_cast<size_t>(e)];
            bool inside = std::any_of(clusters.begin(), clusters.end(), [&](const Cluster& c) {
                return c.in[static_cast<size_t>(a)] && c.in[static_cast<size_t>(b)];
            });
            if (inside) continue;
            if (best < 0 || rank_of(e) < rank_of(best)) best = e;
        }
        if (best < 0) return false;
        int node = leaf(best);
        clusters.push_back(make_cluster({ends[static_cast<size_t>(best)].first, ends[static_cast<size_t>(best)].second}, node));
        return true;
    }

    bool adjacent(int a, int b) const {
        for (size_t e = 0; e < ends.size(); ++e)
            if ((ends[e].first == a && ends[e].second == b) || (ends[e].first == b && ends[e].second == a)) return true;
        return false;
    }

    bool enables_growth(int a, int b) const {
        for (const Cluster& c : clusters)
            for (auto [y, x] : {std::make_pair(a, b), std::make_pair(b, a)}) {
                if (!c.in[static_cast<size_t>(y)] || c.in[static_cast<size_t>(x)]) continue;
                for (int e : edges_into(c, x, false)) {
                    int z = other(e, x);
                    if (is_line(g, x) && is_line(g, y) && is_line(g, z)) continue;
                    return true;
                }
            }
        return false;
    }

    bool enables_merge(int a, int b) const {
        Cluster pair = const_cast<Decomposer*>(this)->make_cluster({a, b}, -1);
        for (size_t i = 0; i < clusters.size(); ++i)
            for (size_t j = 0; j < clusters.size(); ++j)
                if (i != j && triple_shares(pair, clusters[i], clusters[j])) return true;
        return false;
    }

    bool add_virtual() {
        std::vector<std::pair<int, int>> cand;
        auto consider = [&](int a, int b) {
            if (a == b || is_vc(g, a) || is_vc(g, b) || adjacent(a, b)) return;
            bool same = std::any_of(clusters.begin(), clusters.end(), [&](const Cluster& c) {
                return c.in[static_cast<size_t>(a)] && c.in[static_cast<size_t>(b)];
            });
            if (!same) cand.push_back({a, b});
        };
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) consider(a, b);
        if (cand.empty()) return false;
        std::optional<std::pair<int, int>> pick;
        for (auto p : cand)
            if (enables_growth(p.first, p.second) || enables_merge(p.first, p.second)) {
                pick = p;
                break;
            }
        if (!pick && !clusters.empty()) {
            size_t big = 0;
            for (size_t i = 1; i < clusters.size(); ++i)
                if (clusters[i].size > clusters[big].size) big = i;
            for (auto p : cand)
                if (clusters[big].in[static_cast<size_t>(p.first)] != clusters[big].in[static_cast<size_t>(p.second)]) {
                    pick = p;
                    break;
                }
        }
        if (!pick) pick = cand.front();
        ends.push_back(*pick);
        consumed.push_back(0);
        tree.virtual_edges.push_back(*pick);
        return true;
    }

    DecomposeResult run() {
        DecomposeResult r;
        while (true) {
            if (try_grow() || try_merge() || try_seed()) continue;
            bool covered = clusters.size() == 1 && clusters[0].size == n;
            if (opt.relaxed && !covered && add_virtual()) continue;
            break;
        }
        for (const Cluster& c : clusters) r.clusters.push_back(verts_of(c));
        std::vector<std::string> unused;
        for (int e = 0; e < m_real(); ++e)
            if (!consumed[static_cast<size_t>(e)]) {
                for (int ci : g.edges[static_cast<size_t>(e)].constraints) unused.push_back(g.constraints[static_cast<size_t>(ci)].id);
            }
        r.tree = tree;
        if (clusters.size() == 1 && clusters[0].size == n && unused.empty()) {
            r.ok = true;
            r.tree.root = clusters[0].node;
            return r;
        }
        std::ostringstream os;
        if (clusters.empty()) os << "no minimal subproblem to start from";
        else os << clusters.size() << " rigid cluster(s) remain and no triple pairwise shares single elements";
        std::vector<std::string> loose;
        for (int v = 0; v < n; ++v)
            if (!in_any_cluster(v)) loose.push_back(g.ids[static_cast<size_t>(v)]);
        if (!loose.empty()) {
            os << "; unplaced:";
            for (const auto& s : loose) os << " " << s;
        }
        if (!unused.empty()) {
            os << "; unused constraints:";
            for (const auto& s : unused) os << " " << s;
        }
        r.diagnostic = os.str();
        return r;
    }
};

}  // namespace

DecomposeResult triangle_decompose(const ConstraintGraph& g, const DecomposeOptions& opt) {
    Decomposer d(g, opt);
    return d.run();
}

std::string check_tree(const DecompositionTree& t, const ConstraintGraph& g) {
    if (t.root < 0) return "no root";
    std::ostringstream err;
    auto has = [](const std::vector<int>& v, int x) { return std::binary_search(v.begin(), v.end(), x); };
    for (size_t i = 0; i < t.nodes.size(); ++i) {
        const TreeNode& nd = t.nodes[i];
        if (nd.kind == TreeNode::Kind::Leaf) {
            const GraphEdge& e = g.edges.at(static_cast<size_t>(nd.edges.at(0)));
            if (nd.vertices.size() != 2 || nd.edges.size() != 1 || !has(nd.vertices, e.u) || !has(nd.vertices, e.v))
                err << "leaf " << i << " is not a two-element subgraph; ";
            continue;
        }
        if (nd.kind != TreeNode::Kind::Triangle) continue;
        if (nd.children.size() != 3) {
            err << "node " << i << " does not have three children; ";
            continue;
        }
        std::vector<int> all_e, all_v;
        for (int c : nd.children) {
            const TreeNode& ch = t.nodes[static_cast<size_t>(c)];
            all_e.insert(all_e.end(), ch.edges.begin(), ch.edges.end());
            all_v.insert(all_v.end(), ch.vertices.begin(), ch.vertices.end());
        }
        std::sort(all_e.begin(), all_e.end());
        if (std::adjacent_find(all_e.begin(), all_e.end()) != all_e.end()) err << "node " << i << " children share an edge; ";
        if (all_e != nd.edges) err << "node " << i << " edges are not partitioned; ";
        std::sort(all_v.begin(), all_v.end());
        all_v.erase(std::unique(all_v.begin(), all_v.end()), all_v.end());
        if (all_v != nd.vertices) err << "node " << i << " vertices are not covered; ";
        for (int k = 0; k < 3; ++k) {
            const auto& a = t.nodes[static_cast<size_t>(nd.children[static_cast<size_t>(k)])].vertices;
            const auto& b = t.nodes[static_cast<size_t>(nd.children[static_cast<size_t>((k + 1) % 3)])].vertices;
            std::vector<int> s;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(s));
            if (s.size() != 1 || s[0] != nd.shared[static_cast<size_t>(k)]) err << "node " << i << " sharing rule broken; ";
        }
    }
    return err.str();
}

// ---- plan emission -----------------------------------------------------------------------------

namespace {

struct Rel {
    Relation r;
    std::string radius_of;
};

double radius_of(const GcsProblem& p, const std::string& id) {
    const Element& e = p.element(id);
    return e.kind == ElementKind::FixedCircle ? e.radius : 0.0;
}

// Relation of the constraint as seen from the placed anchor towards the new element.
Rel relation(const GcsProblem& p, const Constraint& c, const std::string& anchor) {
    Rel out;
    switch (c.kind) {
        case ConstraintKind::PointPointDistance:
        case ConstraintKind::PointLineDistance: out.r.value = std::fabs(c.value); break;
        case ConstraintKind::PointOnLine: out.r.value = 0.0; break;
        case ConstraintKind::LineLineAngle: {
            out.r.angle = true;
            double v = std::fmod(c.value, std::numbers::pi);
            if (v < 0) v += std::numbers::pi;
            out.r.value = (c.a == anchor || v == 0.0) ? v : std::numbers::pi - v;
            break;
        }
        case ConstraintKind::TangentLineCircle:
            if (p.element(c.b).kind == ElementKind::VariableCircle) {
                out.radius_of = c.b;
                out.r.value = c.value;
            } else {
                out.r.value = radius_of(p, c.b) + c.value;
            }
            break;
        case ConstraintKind::TangentCircleCircle: {
            double ra = radius_of(p, c.a), rb = radius_of(p, c.b);
            out.r.value = c.tangency == Constraint::Tangency::Internal ? std::fabs(ra - rb) : ra + rb;
            break;
        }
        case ConstraintKind::CenterDistance:
            if (!c.perimeter) {
                out.r.value = c.value;
            } else if (p.element(c.b).kind == ElementKind::VariableCircle) {
                out.radius_of = c.b;
                out.r.value = c.value;
            } else {
                out.r.value = radius_of(p, c.b) + c.value;
            }
            break;
        default: throw Error(ErrorCode::PlanError, "constraint " + c.id + " cannot drive a construction step");
    }
    return out;
}

CycloSpec cyclo_spec(const GcsProblem& p, const Constraint& c, int ci, const std::string& anchor) {
    CycloSpec s;
    s.element = anchor;
    s.constraint = ci;
    switch (c.kind) {
        case ConstraintKind::TangentLineCircle: s.line = true; break;
        case ConstraintKind::TangentCircleCircle:
            s.rho = radius_of(p, anchor);
            s.tangency = c.tangency;
            break;
        case ConstraintKind::CenterDistance: s.rho = std::fabs(c.value); break;
        default: throw Error(ErrorCode::PlanError, "constraint " + c.id + " does not touch a circle perimeter");
    }
    return s;
}

Cyclo dummy(const CycloSpec& s) { return s.line ? Cyclo::of_line(Line2{}) : Cyclo::of_circle({}, s.rho); }

struct Emitter {
    const DecompositionTree& t;
    const ConstraintGraph& g;
    const GcsProblem& p;
    ConstructionPlan plan;

    const std::string& id(int v) const { return g.ids.at(static_cast<size_t>(v)); }
    ElementKind kind(int v) const { return g.kinds.at(static_cast<size_t>(v)); }

    int constraint_of(int edge) const {
        if (edge < 0) throw Error(ErrorCode::PlanError, "relaxed leaf has no constraint to plan with");
        const GraphEdge& e = g.edges.at(static_cast<size_t>(edge));
        if (e.constraints.size() != 1) throw Error(ErrorCode::PlanError, "leaf edge carries several constraints");
        return e.constraints[0];
    }

    const Constraint& cons(int ci) const { return p.constraints.at(static_cast<size_t>(ci)); }

    int new_slot() { return plan.cluster_count++; }

    bool incident(int a, int b) const {
        int e = g.edge_between(a, b);
        if (e < 0) return false;
        for (int ci : g.edges[static_cast<size_t>(e)].constraints) {
            const Constraint& c = cons(ci);
            if (c.kind == ConstraintKind::PointOnLine) return true;
            if (c.kind == ConstraintKind::PointLineDistance && c.value == 0.0) return true;
        }
        return false;
    }

    int place_leaf(const TreeNode& nd) {
        int ci = constraint_of(nd.edges.at(0));
        const Constraint& c = cons(ci);
        PlanStep s;
        s.kind = StepKind::PlaceMinimal;
        s.cluster = new_slot();
        s.outputs = {c.a, c.b};
        s.constraints = {ci};
        Rel r = relation(p, c, c.a);
        if (!r.radius_of.empty()) throw Error(ErrorCode::PlanError, "seed constraint depends on an unplaced radius");
        s.rel[0] = r.r;
        plan.steps.push_back(s);
        return s.cluster;
    }

    void construct(int slot, int x, int e1, int e2) {
        int c1 = constraint_of(e1), c2 = constraint_of(e2);
        const GraphEdge &g1 = g.edges[static_cast<size_t>(e1)], &g2 = g.edges[static_cast<size_t>(e2)];
        int y1 = g1.u == x ? g1.v : g1.u;
        int y2 = g2.u == x ? g2.v : g2.u;
        PlanStep s;
        s.kind = StepKind::ConstructThird;
        s.cluster = slot;
        s.tcase = third_case(kind(y1), kind(y2), kind(x));
        s.inputs = {id(y1), id(y2)};
        s.outputs = {id(x)};
        s.constraints = {c1, c2};
        Rel r1 = relation(p, cons(c1), id(y1)), r2 = relation(p, cons(c2), id(y2));
        s.rel[0] = r1.r;
        s.rel[1] = r2.r;
        s.rel_radius[0] = r1.radius_of;
        s.rel_radius[1] = r2.radius_of;
        Relation m1 = r1.r, m2 = r2.r;
        if (!r1.radius_of.empty()) m1.value = 1.0;
        if (!r2.radius_of.empty()) m2.value = 1.0;
        s.multiplicity = third_multiplicity(s.tcase, kind(y1), m1, kind(y2), m2);
        plan.steps.push_back(s);
    }

    bool is_leaf(int ni) const { return t.nodes[static_cast<size_t>(ni)].kind == TreeNode::Kind::Leaf; }

    int common(const TreeNode& a, const TreeNode& b) const {
        for (int v : a.vertices)
            if (std::binary_search(b.vertices.begin(), b.vertices.end(), v)) return v;
        return -1;
    }

    int min_constraint(int ni) const { return constraint_of(t.nodes[static_cast<size_t>(ni)].edges.at(0)); }

    int emit(int ni) {
        const TreeNode& nd = t.nodes.at(static_cast<size_t>(ni));
        switch (nd.kind) {
            case TreeNode::Kind::Leaf: return place_leaf(nd);
            case TreeNode::Kind::RelaxedLeaf: throw Error(ErrorCode::PlanError, "relaxed leaves cannot be planned");
            case TreeNode::Kind::Triangle: return emit_triangle(nd);
            case TreeNode::Kind::VCSequential: {
                int slot = emit(nd.children.at(0));
                PlanStep s;
                s.kind = StepKind::VarCircleSequential;
                s.cluster = slot;
                s.outputs = {id(nd.vc)};
                std::array<Cyclo, 3> d;
                for (size_t k = 0; k < 3; ++k) {
                    int e = nd.vc_edges.at(k);
                    const GraphEdge& ge = g.edges[static_cast<size_t>(e)];
                    int y = ge.u == nd.vc ? ge.v : ge.u;
                    int ci = constraint_of(e);
                    s.inputs.push_back(id(y));
                    s.constraints.push_back(ci);
                    s.cyclo.push_back(cyclo_spec(p, cons(ci), ci, id(y)));
                    d[k] = dummy(s.cyclo.back());
                }
                s.multiplicity = vcircle_sequential_slot_count(d);
                plan.steps.push_back(s);
                return slot;
            }
            case TreeNode::Kind::VCMerge: {
                int s1 = emit(nd.children.at(0));
                int s2 = emit(nd.children.at(1));
                PlanStep s;
                s.kind = StepKind::VarCircleMerge;
                s.cluster = s1;
                s.sources = {s2};
                s.shared = {id(nd.shared[0]), "", ""};
                s.outputs = {id(nd.vc)};
                std::array<Cyclo, 2> a, b;
                for (size_t k = 0; k < 4; ++k) {
                    int e = nd.vc_edges.at(k);
                    const GraphEdge& ge = g.edges[static_cast<size_t>(e)];
                    int y = ge.u == nd.vc ? ge.v : ge.u;
                    int ci = constraint_of(e);
                    s.inputs.push_back(id(y));
                    s.constraints.push_back(ci);
                    s.cyclo.push_back(cyclo_spec(p, cons(ci), ci, id(y)));
                    (k < 2 ? a[k] : b[k - 2]) = dummy(s.cyclo.back());
                }
                s.multiplicity = vcircle_merge_slot_count(kind(nd.shared[0]) == ElementKind::Line, a, b);
                plan.steps.push_back(s);
                return s1;
            }
        }
        throw Error(ErrorCode::PlanError, "unknown tree node");
    }

    int emit_triangle(const TreeNode& nd) {
        const auto& ch = nd.children;
        // Two leaf children meeting in a new element: a single ConstructThird.
        std::vector<int> order{0, 1, 2};
        bool all_leaves = is_leaf(ch[0]) && is_leaf(ch[1]) && is_leaf(ch[2]);
        if (all_leaves) {
            std::vector<int> seedable;
            for (int r : order)
                if (is_minimal_edge(g, t.nodes[static_cast<size_t>(ch[static_cast<size_t>(r)])].edges[0])) seedable.push_back(r);
            std::sort(seedable.begin(), seedable.end(), [&](int a, int b) {
                return min_constraint(ch[static_cast<size_t>(a)]) < min_constraint(ch[static_cast<size_t>(b)]);
            });
            for (int r : order)
                if (std::find(seedable.begin(), seedable.end(), r) == seedable.end()) seedable.push_back(r);
            order = seedable;
        }
        for (int r : order) {
            int a = ch[static_cast<size_t>(r)], b = ch[static_cast<size_t>((r + 1) % 3)], c = ch[static_cast<size_t>((r + 2) % 3)];
            if (!is_leaf(b) || !is_leaf(c)) continue;
            const TreeNode &na = t.nodes[static_cast<size_t>(a)], &nb = t.nodes[static_cast<size_t>(b)],
                           &nc = t.nodes[static_cast<size_t>(c)];
            int x = common(nb, nc);
            if (x < 0 || std::binary_search(na.vertices.begin(), na.vertices.end(), x)) continue;
            int yb = nb.vertices[0] == x ? nb.vertices[1] : nb.vertices[0];
            int yc = nc.vertices[0] == x ? nc.vertices[1] : nc.vertices[0];
            if (kind(x) == ElementKind::Line && kind(yb) == ElementKind::Line && kind(yc) == ElementKind::Line) continue;
            int slot = emit(a);
            construct(slot, x, nb.edges[0], nc.edges[0]);
            return slot;
        }
        return emit_merge(nd);
    }

    int emit_merge(const TreeNode& nd) {
        int best = -1;
        for (int r = 0; r < 3 && best < 0; ++r) {
            int v = nd.shared[static_cast<size_t>((r + 1) % 3)];
            if (point_like(kind(v))) best = r;
        }
        for (int r = 0; r < 3 && best < 0; ++r) {
            int u = nd.shared[static_cast<size_t>(r)], w = nd.shared[static_cast<size_t>((r + 2) % 3)];
            if (!(kind(u) == ElementKind::Line && kind(w) == ElementKind::Line)) best = r;
        }
        if (best < 0) throw Error(ErrorCode::PlanError, "merge triple shares only lines");
        int r = best;
        int c0 = nd.children[static_cast<size_t>(r)], c1 = nd.children[static_cast<size_t>((r + 1) % 3)],
            c2 = nd.children[static_cast<size_t>((r + 2) % 3)];
        int u = nd.shared[static_cast<size_t>(r)], v = nd.shared[static_cast<size_t>((r + 1) % 3)],
            w = nd.shared[static_cast<size_t>((r + 2) % 3)];
        int f = emit(c0);
        int s1 = emit(c1);
        int s2 = emit(c2);
        PlanStep s;
        s.kind = StepKind::MergeClusters;
        s.cluster = f;
        s.sources = {s1, s2};
        s.shared = {id(u), id(v), id(w)};
        s.inputs = {id(u), id(w)};
        s.tcase = third_case(kind(u), kind(w), kind(v));
        s.shared_incident[0] = incident(u, v);
        s.shared_incident[1] = incident(v, w);
        Relation ru, rw;
        ru.value = s.shared_incident[0] ? 0.0 : 1.0;
        rw.value = s.shared_incident[1] ? 0.0 : 1.0;
        s.construct_mult = third_multiplicity(s.tcase, kind(u), ru, kind(w), rw);
        s.flip_arity[0] = match_arity(kind(u), kind(v), s.shared_incident[0]);
        s.flip_arity[1] = match_arity(kind(v), kind(w), s.shared_incident[1]);
        s.multiplicity = s.construct_mult * s.flip_arity[0] * s.flip_arity[1];
        const auto& fv = t.nodes[static_cast<size_t>(c0)].vertices;
        for (int ci : {c1, c2})
            for (int x : t.nodes[static_cast<size_t>(ci)].vertices)
                if (!std::binary_search(fv.begin(), fv.end(), x) &&
                    std::find(s.outputs.begin(), s.outputs.end(), id(x)) == s.outputs.end())
                    s.outputs.push_back(id(x));
        plan.steps.push_back(s);
        return f;
    }
};

}  // namespace

ConstructionPlan emit_plan(const DecompositionTree& t, const ConstraintGraph& g, const GcsProblem& problem) {
    if (t.root < 0) throw Error(ErrorCode::PlanError, "tree has no root");
    if (g.vertex_count() != static_cast<int>(problem.elements.size()))
        throw Error(ErrorCode::PlanError, "tree and problem disagree on the element set");
    for (int v = 0; v < g.vertex_count(); ++v)
        if (problem.elements[static_cast<size_t>(v)].id != g.ids[static_cast<size_t>(v)])
            throw Error(ErrorCode::PlanError, "tree and problem disagree on element " + g.ids[static_cast<size_t>(v)]);
    for (const TreeNode& nd : t.nodes)
        for (int e : nd.edges)
            if (e >= static_cast<int>(g.edges.size())) throw Error(ErrorCode::PlanError, "tree refers to a missing constraint");
    Emitter em{t, g, problem, {}};
    em.plan.final_cluster = em.emit(t.root);
    return em.plan;
}

ConstructionPlan make_plan(const GcsProblem& problem, unsigned seed) {
    ConstraintGraph g = build_graph(problem);
    DecomposeOptions opt;
    opt.seed = seed;
    DecomposeResult r = triangle_decompose(g, opt);
    if (!r.ok) throw Error(ErrorCode::NotDecomposable, "not triangle-decomposable: " + r.diagnostic);
    return emit_plan(r.tree, g, problem);
}

std::vector<std::vector<std::string>> describe(const ConstructionPlan& plan, const GcsProblem& problem) {
    std::vector<std::vector<std::string>> out;
    for (const PlanStep& s : plan.steps) {
        std::vector<std::string> ops;
        switch (s.kind) {
            case StepKind::PlaceMinimal: {
                bool la = problem.element(s.outputs[0]).kind == ElementKind::Line;
                bool lb = problem.element(s.outputs[1]).kind == ElementKind::Line;
                if (!la && !lb) ops = {"origin", "distPP"};
                else if (la && lb) ops = {"xaxis", "lineAngle"};
                else ops = {"xaxis", "pointPL"};
                break;
            }
            case StepKind::ConstructThird: {
                bool nz0 = s.rel[0].value != 0.0 || !s.rel_radius[0].empty();
                bool nz1 = s.rel[1].value != 0.0 || !s.rel_radius[1].empty();
                bool l0 = problem.element(s.inputs[0]).kind == ElementKind::Line;
                switch (s.tcase) {
                    case ThirdCase::PPtoP: ops = {"circleCR", "circleCR", "intCC"}; break;
                    case ThirdCase::PLtoP: {
                        bool hnz = l0 ? nz0 : nz1;
                        if (hnz) ops.push_back("lineParallel");
                        ops.push_back("circleCR");
                        ops.push_back("intLC");
                        break;
                    }
                    case ThirdCase::LLtoP:
                        if (nz0) ops.push_back("lineParallel");
                        if (nz1) ops.push_back("lineParallel");
                        ops.push_back("intLL");
                        break;
                    case ThirdCase::PPtoL:
                        if (!nz0 && !nz1) ops = {"line2P"};
                        else if (nz0 && nz1) ops = {"circleCR", "circleCR", "tangentCC"};
                        else ops = {"circleCR", "tangentPC"};
                        break;
                    case ThirdCase::PLtoL: {
                        bool hnz = l0 ? nz1 : nz0;
                        ops = {"linePA"};
                        if (hnz) ops.push_back("lineParallel");
                        break;
                    }
                }
                break;
            }
            case StepKind::MergeClusters: ops = {"construct", "match", "match"}; break;
            case StepKind::VarCircleSequential: ops = {"cyclographic3"}; break;
            case StepKind::VarCircleMerge: ops = {"cyclographicMerge"}; break;
        }
        out.push_back(ops);
    }
    return out;
}

std::string check_topological(const ConstructionPlan& plan) {
    std::set<std::string> made;
    std::ostringstream err;
    for (size_t i = 0; i < plan.steps.size(); ++i) {
        const PlanStep& s = plan.steps[i];
        for (const auto& in : s.inputs)
            if (!made.count(in)) err << "step " << i << " uses " << in << " before it is placed; ";
        for (const auto& o : s.outputs) made.insert(o);
    }
    return err.str();
}

}  // namespace gcs
