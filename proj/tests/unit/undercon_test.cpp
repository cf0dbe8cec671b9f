#include <algorithm>
#include <cmath>
#include <random>

#include "common.hpp"
#include "doctest.h"
#include "gcs/graph.hpp"
#include "gcs/planner.hpp"
#include "gcs/undercon.hpp"

using namespace gcs;

namespace {

int weight(const ConstraintGraph& g) {
    int m = 0;
    for (const GraphEdge& e : g.edges) m += e.label;
    return m;
}

bool completes(const ConstraintGraph& g) {
    return classify(g).verdict == Verdict::WellConstrained && triangle_decompose(g).ok;
}

VertexPair pair(const ConstraintGraph& g, const char* a, const char* b) { return {g.vertex(a), g.vertex(b)}; }

}  // namespace

TEST_CASE("free completion of the seven-point graph") {
    ConstraintGraph g = build_graph(corpus("fig16a.gcs"));
    Completion c = free_completion(g);
    CHECK(c.required == 2 * g.vertex_count() - weight(g) - 3);
    CHECK(c.added.size() == 4);
    CHECK(completes(with_edges(g, c.added)));
}

TEST_CASE("free completion of small graphs") {
    ConstraintGraph t = build_graph(corpus("truss.gcs"));
    CHECK(free_completion(t).added.empty());

    ConstraintGraph two = build_graph(corpus("two_points.gcs"));
    Completion c = free_completion(two);
    CHECK(c.added.size() == 1);
    CHECK(completes(with_edges(two, c.added)));

    ConstraintGraph minus = build_graph(corpus("truss_minus_edge.gcs"));
    Completion m = free_completion(minus);
    CHECK(m.added.size() == 1);
    CHECK(completes(with_edges(minus, m.added)));
}

TEST_CASE("free completion of random trees of triangles") {
    std::mt19937 rng(8);
    for (int it = 0; it < 100; ++it) {
        int n = 4 + static_cast<int>(rng() % 6);
        std::vector<std::pair<int, int>> edges{{0, 1}};
        // each new vertex hangs off one earlier vertex, sometimes two
        for (int v = 2; v < n; ++v) {
            int a = static_cast<int>(rng() % static_cast<unsigned>(v));
            edges.push_back({a, v});
            if (rng() % 2) {
                int b = static_cast<int>(rng() % static_cast<unsigned>(v));
                if (b != a) edges.push_back({b, v});
            }
        }
        ConstraintGraph g = unit_graph(n, edges);
        Completion c = free_completion(g);
        CHECK(static_cast<int>(c.added.size()) == 2 * n - weight(g) - 3);
        CHECK(completes(with_edges(g, c.added)));
    }
}

TEST_CASE("conditional completion draws from the pool") {
    ConstraintGraph g = build_graph(corpus("fig16a.gcs"));
    std::vector<VertexPair> pool{pair(g, "A", "B"), pair(g, "A", "E"), pair(g, "A", "G"),
                                 pair(g, "B", "G"), pair(g, "C", "F"), pair(g, "D", "F"),
                                 pair(g, "E", "G"), pair(g, "E", "D"), pair(g, "G", "D")};
    Completion c = conditional_completion(g, pool);
    CHECK_FALSE(c.partial);
    CHECK(c.added.size() == 4);
    for (auto [a, b] : c.added)
        CHECK(std::any_of(pool.begin(), pool.end(), [&](VertexPair q) {
            return (q.first == a && q.second == b) || (q.first == b && q.second == a);
        }));
    CHECK(completes(with_edges(g, c.added)));

    // The four pairs of the reference completion work on their own.
    std::vector<VertexPair> ref{pair(g, "A", "G"), pair(g, "B", "G"), pair(g, "D", "E"), pair(g, "D", "G")};
    CHECK(completes(with_edges(g, ref)));
    Completion r = conditional_completion(g, ref);
    CHECK_FALSE(r.partial);
    CHECK(r.added.size() == 4);

    Completion few = conditional_completion(g, {pair(g, "A", "G"), pair(g, "B", "G")});
    CHECK(few.partial);
    CHECK(few.added.size() == 2);
    ConstraintGraph part = with_edges(g, few.added);
    Completion rest = free_completion(part);
    CHECK(rest.added.size() == 2);
    CHECK(completes(with_edges(part, rest.added)));

    Completion none = conditional_completion(g, {});
    CHECK(none.partial);
    CHECK(none.added.empty());
}

TEST_CASE("completion diagnostics") {
    ConstraintGraph g = build_graph(corpus("fig16a.gcs"));
    CompletionCheck under = check_completion(g, {pair(g, "A", "G")});
    CHECK_FALSE(under.well_constrained);
    CHECK_FALSE(under.diagnostic.empty());
    CompletionCheck ok = check_completion(g, {pair(g, "A", "G"), pair(g, "B", "G"), pair(g, "D", "E"), pair(g, "D", "G")});
    CHECK(ok.well_constrained);
    CHECK(ok.decomposable);

    // well-constrained but not decomposable: K33 minus an edge plus the same edge back
    ConstraintGraph k = build_graph(corpus("k33.gcs"));
    CHECK(classify(k).verdict == Verdict::WellConstrained);
    CHECK_FALSE(triangle_decompose(k).ok);
}

TEST_CASE("values for added constraints") {
    GcsProblem p = corpus("fig16a.gcs");
    std::vector<ValuedConstraint> v = constraint_values_for(p, {{"A", "G"}, {"B", "G"}});
    REQUIRE(v.size() == 2);
    CHECK_FALSE(v[0].symbolic);
    CHECK(v[0].constraint.kind == ConstraintKind::PointPointDistance);
    CHECK(v[0].constraint.value == doctest::Approx(std::hypot(0.5, 3.5)));
    CHECK(p.constraint_index(v[0].constraint.id) < 0);
    CHECK(v[0].constraint.id != v[1].constraint.id);

    GcsProblem bare = p;
    for (Element& e : bare.elements) e.sketch.reset();
    auto s = constraint_values_for(bare, {{"A", "G"}, {"B", "G"}, {"A", "D"}, {"A", "E"}});
    CHECK(std::count_if(s.begin(), s.end(), [](const ValuedConstraint& c) { return c.symbolic; }) == 4);

    GcsProblem lines = parse_problem("elements\nline L1 through 0 0 1 0\nline L2 through 0 0 1 1\n");
    auto a = constraint_values_for(lines, {{"L1", "L2"}});
    REQUIRE(a.size() == 1);
    CHECK(a[0].constraint.kind == ConstraintKind::LineLineAngle);
    CHECK(a[0].constraint.value == doctest::Approx(std::numbers::pi / 4));
}
