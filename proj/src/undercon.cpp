#include "gcs/undercon.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace gcs {

ConstraintGraph with_edges(const ConstraintGraph& g, const std::vector<VertexPair>& extra) {
    ConstraintGraph out = g;
    int k = 0;
    for (auto [a, b] : extra) {
        Constraint c;
        c.id = "added." + std::to_string(++k);
        c.a = g.ids[static_cast<size_t>(a)];
        c.b = g.ids[static_cast<size_t>(b)];
        bool la = g.kinds[static_cast<size_t>(a)] == ElementKind::Line;
        bool lb = g.kinds[static_cast<size_t>(b)] == ElementKind::Line;
        c.value = 1.0;
        if (la && lb) c.kind = ConstraintKind::LineLineAngle;
        else if (la || lb) {
            c.kind = ConstraintKind::PointLineDistance;
            if (la) std::swap(c.a, c.b);
        } else {
            c.kind = ConstraintKind::PointPointDistance;
        }
        out.constraints.push_back(c);
        int ci = static_cast<int>(out.constraints.size()) - 1;
        int e = out.edge_between(a, b);
        if (e < 0) {
            out.edges.push_back(GraphEdge{a, b, 1, {ci}});
        } else {
            out.edges[static_cast<size_t>(e)].label += 1;
            out.edges[static_cast<size_t>(e)].constraints.push_back(ci);
        }
    }
    return out;
}

namespace {

bool completes(const ConstraintGraph& g, const std::vector<VertexPair>& add) {
    ConstraintGraph h = with_edges(g, add);
    if (classify(h).verdict != Verdict::WellConstrained) return false;
    return triangle_decompose(h).ok;
}

bool partial_ok(const ConstraintGraph& g, const std::vector<VertexPair>& add) {
    ConstraintGraph h = with_edges(g, add);
    if (classify(h).verdict == Verdict::OverConstrained) return false;
    DecomposeOptions o;
    o.relaxed = true;
    return triangle_decompose(h, o).ok;
}

// Lexicographic k-subsets of [0, n), stopping when visit returns true or the budget runs out.
bool for_subsets(int n, int k, long& budget, const std::function<bool(const std::vector<int>&)>& visit) {
    if (k > n || k < 0) return false;
    std::vector<int> idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
    while (true) {
        if (budget-- <= 0) return false;
        if (visit(idx)) return true;
        int i = k - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
        if (i < 0) return false;
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
}

}  // namespace

Completion free_completion(const ConstraintGraph& g) {
    Completion c;
    c.mode = Completion::Mode::Free;
    c.required = std::max(0, deficit(g) - 3);
    DecomposeOptions o;
    o.relaxed = true;
    DecomposeResult r = triangle_decompose(g, o);
    if (!r.ok)
        throw Error(ErrorCode::NotCompletableByDecomposition, "no permissive decomposition: " + r.diagnostic);
    c.added = r.tree.virtual_edges;
    c.tree = r.tree;
    return c;
}

Completion conditional_completion(const ConstraintGraph& g, const std::vector<VertexPair>& pool_in) {
    Completion c;
    c.mode = Completion::Mode::Conditional;
    c.required = std::max(0, deficit(g) - 3);
    std::vector<VertexPair> pool;
    std::set<VertexPair> seen;
    for (auto [a, b] : pool_in) {
        VertexPair key{std::min(a, b), std::max(a, b)};
        if (a == b || g.edge_between(a, b) >= 0 || !seen.insert(key).second) continue;
        pool.push_back({a, b});
    }
    int n = static_cast<int>(pool.size());
    auto pick = [&](const std::vector<int>& idx) {
        std::vector<VertexPair> s;
        for (int i : idx) s.push_back(pool[static_cast<size_t>(i)]);
        return s;
    };
    long budget = 200000;
    std::vector<VertexPair> found;
    bool full = for_subsets(n, c.required, budget, [&](const std::vector<int>& idx) {
        auto s = pick(idx);
        if (!completes(g, s)) return false;
        found = s;
        return true;
    });
    if (full) {
        c.added = found;
        return c;
    }
    c.partial = true;
    if (budget <= 0) {
        // Greedy for large pools: keep each pool edge that leaves a valid partial state.
        for (const VertexPair& e : pool) {
            if (static_cast<int>(found.size()) >= c.required) break;
            std::vector<VertexPair> trial = found;
            trial.push_back(e);
            if (partial_ok(g, trial)) found = trial;
        }
        c.added = found;
        return c;
    }
    for (int k = std::min(c.required - 1, n); k >= 0; --k) {
        budget = 200000;
        bool ok = for_subsets(n, k, budget, [&](const std::vector<int>& idx) {
            auto s = pick(idx);
            if (!partial_ok(g, s)) return false;
            found = s;
            return true;
        });
        if (ok) break;
    }
    c.added = found;
    return c;
}

CompletionCheck check_completion(const ConstraintGraph& g, const std::vector<VertexPair>& added) {
    CompletionCheck r;
    ConstraintGraph h = with_edges(g, added);
    Classification cl = classify(h);
    r.well_constrained = cl.verdict == Verdict::WellConstrained;
    if (!r.well_constrained) {
        r.diagnostic = std::string("completed graph is ") + verdict_name(cl.verdict);
        return r;
    }
    DecomposeResult d = triangle_decompose(h);
    r.decomposable = d.ok;
    if (!d.ok) r.diagnostic = "well-constrained but not triangle-decomposable: " + d.diagnostic;
    return r;
}

std::vector<ValuedConstraint> constraint_values_for(const GcsProblem& problem,
                                                    const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::vector<ValuedConstraint> out;
    bool sketch = true;
    for (const auto& [a, b] : pairs)
        if (!problem.element(a).sketch || !problem.element(b).sketch) sketch = false;
    int k = 0;
    for (const auto& [a, b] : pairs) {
        const Element& ea = problem.element(a);
        const Element& eb = problem.element(b);
        if (ea.kind == ElementKind::VariableCircle || eb.kind == ElementKind::VariableCircle)
            throw Error(ErrorCode::KindMismatch, "no single constraint fits the pair " + a + "/" + b);
        ValuedConstraint v;
        Constraint& c = v.constraint;
        std::string id;
        do {
            id = "k" + std::to_string(++k);
        } while (problem.constraint_index(id) >= 0 || problem.element_index(id) >= 0);
        c.id = id;
        c.a = a;
        c.b = b;
        bool la = ea.kind == ElementKind::Line, lb = eb.kind == ElementKind::Line;
        if (la && lb) {
            c.kind = ConstraintKind::LineLineAngle;
            if (sketch) {
                c.value = line_angle(ea.sketch->line, eb.sketch->line);
                if (angle_gap_mod_pi(c.value, 0.0) <= 1e-12)
                    throw Error(ErrorCode::KindMismatch, "lines " + a + " and " + b + " are parallel in the sketch");
            }
        } else if (la || lb) {
            if (la) std::swap(c.a, c.b);
            const Element& pt = la ? eb : ea;
            const Element& ln = la ? ea : eb;
            if (pt.kind == ElementKind::FixedCircle) {
                c.kind = ConstraintKind::TangentLineCircle;
                std::swap(c.a, c.b);
                if (sketch) c.value = std::fabs(ln.sketch->line.signed_distance(pt.sketch->p)) - pt.radius;
            } else {
                c.kind = ConstraintKind::PointLineDistance;
                if (sketch) c.value = std::fabs(ln.sketch->line.signed_distance(pt.sketch->p));
            }
        } else {
            bool pp = ea.kind == ElementKind::Point && eb.kind == ElementKind::Point;
            c.kind = pp ? ConstraintKind::PointPointDistance : ConstraintKind::CenterDistance;
            if (sketch) c.value = norm(ea.sketch->p - eb.sketch->p);
        }
        v.symbolic = !sketch;
        if (!sketch) c.value = std::nan("");
        out.push_back(v);
    }
    return out;
}

}  // namespace gcs
