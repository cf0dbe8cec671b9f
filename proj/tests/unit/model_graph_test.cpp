#include <algorithm>
#include <random>
#include <set>

#include "common.hpp"
#include "doctest.h"
#include "gcs/graph.hpp"

using namespace gcs;

TEST_CASE("arc expands to a variable circle, two points and two incidences") {
    GcsProblem p = parse_document(
        "elements\npoint S at 0 0\npoint E at 4 0\narc R S E\nconstraints\nSE distance S E 4\n");
    GcsProblem x = expand_compound(p);
    CHECK(x.arcs.empty());
    int vcs = 0, pts = 0;
    for (const Element& e : x.elements) {
        if (e.kind == ElementKind::VariableCircle) ++vcs;
        if (e.kind == ElementKind::Point) ++pts;
    }
    CHECK(vcs == 1);
    CHECK(pts == 2);
    CHECK(x.constraints.size() == 3);
    // 3 + 2 + 2 dof, minus two incidences and the three placement dof
    int dofs = 0;
    for (const Element& e : x.elements) dofs += dof(e.kind);
    for (size_t i = 1; i < x.constraints.size(); ++i) dofs -= equation_count(x.constraints[i].kind);
    CHECK(dofs - 3 == 2);
}

TEST_CASE("two arcs sharing an endpoint") {
    GcsProblem p = parse_document("elements\npoint A at 0 0\npoint B at 4 0\npoint C at 4 4\narc R A B\narc Q B C\n");
    GcsProblem x = expand_compound(p);
    int vcs = 0, pts = 0;
    for (const Element& e : x.elements) {
        if (e.kind == ElementKind::VariableCircle) ++vcs;
        if (e.kind == ElementKind::Point) ++pts;
    }
    CHECK(vcs == 2);
    CHECK(pts == 3);
    CHECK(x.constraints.size() == 4);
}

TEST_CASE("arc-free problems pass through expansion unchanged") {
    GcsProblem p = corpus("truss.gcs");
    GcsProblem x = expand_compound(p);
    CHECK(serialize_problem(x) == serialize_problem(p));
}

TEST_CASE("validation") {
    CHECK(validate(corpus("truss.gcs")).empty());

    GcsProblem p;
    p.elements = {point("A", 0, 0), point("B", 1, 0)};
    p.constraints = {distance("d", "A", "B", 0.0)};
    auto v = validate(p);
    REQUIRE(v.size() == 1);
    CHECK(v[0].message == "zero distance must be PointOnPoint");

    p.constraints = {distance("d", "A", "Z", 1.0)};
    v = validate(p);
    REQUIRE(v.size() == 1);
    CHECK(v[0].subject == "d");

    Element c;
    c.id = "C";
    c.kind = ElementKind::FixedCircle;
    c.radius = 0.0;
    p.elements.push_back(c);
    p.constraints.clear();
    CHECK(validate(p).size() == 1);
}

TEST_CASE("graph labels") {
    ConstraintGraph g = build_graph(corpus("truss.gcs"));
    CHECK(g.vertex_count() == 4);
    CHECK(g.edges.size() == 5);
    for (int l : g.labels) CHECK(l == 2);
    for (const GraphEdge& e : g.edges) CHECK(e.label == 1);

    GcsProblem one;
    one.elements = {point("A", 0, 0)};
    ConstraintGraph g1 = build_graph(one);
    CHECK(g1.vertex_count() == 1);
    CHECK(g1.edges.empty());

    ConstraintGraph gc = build_graph(corpus("concentric.gcs"));
    CHECK(gc.vertex_count() == 2);
    REQUIRE(gc.edges.size() == 1);
    CHECK(gc.edges[0].label == 2);
    CHECK(gc.labels == std::vector<int>{2, 2});
}

TEST_CASE("deficits") {
    CHECK(deficit(build_graph(corpus("truss.gcs"))) == 3);
    ConstraintGraph f2 = build_graph(corpus("fig2.gcs"));
    std::vector<int> s{f2.vertex("v1"), f2.vertex("v2"), f2.vertex("v3"), f2.vertex("v4")};
    CHECK(deficit(f2, s) == 2);
    CHECK(deficit(build_graph(corpus("k33.gcs"))) == 3);
}

TEST_CASE("classification verdicts") {
    ConstraintGraph f2 = build_graph(corpus("fig2.gcs"));
    Classification c = classify(f2);
    CHECK(c.verdict == Verdict::OverConstrained);
    std::set<std::string> w;
    for (int v : c.witness) w.insert(f2.ids[static_cast<size_t>(v)]);
    CHECK(w == std::set<std::string>{"v1", "v2", "v3", "v4"});

    CHECK(classify(build_graph(corpus("k33.gcs"))).verdict == Verdict::WellConstrained);
    Classification u = classify(build_graph(corpus("truss_minus_edge.gcs")));
    CHECK(u.verdict == Verdict::UnderConstrained);
    CHECK(u.deficit == 4);
    CHECK(classify(build_graph(corpus("concentric.gcs"))).verdict == Verdict::Symmetric);
}

// Brute-force oracle: well-constrained iff deficit 3 and every induced subgraph on >= 2
// vertices keeps deficit >= 3.
Verdict brute_verdict(const ConstraintGraph& g) {
    int n = g.vertex_count();
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<int> s;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1) s.push_back(i);
        if (s.size() >= 2 && deficit(g, s) < 3) return Verdict::OverConstrained;
    }
    return deficit(g) == 3 ? Verdict::WellConstrained : Verdict::UnderConstrained;
}

TEST_CASE("classification agrees with exhaustive subgraph counting on random point graphs") {
    std::mt19937 rng(5);
    for (int it = 0; it < 300; ++it) {
        int n = 3 + static_cast<int>(rng() % 5);
        std::vector<std::pair<int, int>> edges;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (rng() % 100 < 55) edges.push_back({a, b});
        ConstraintGraph g = unit_graph(n, edges);
        Classification c = classify(g);
        Verdict want = brute_verdict(g);
        CHECK(c.verdict == want);
        if (c.verdict == Verdict::OverConstrained) CHECK(deficit(g, c.witness) < 3);
    }
}

TEST_CASE("shared variable circle across clusters is reported") {
    GcsProblem p;
    Element v;
    v.id = "V1";
    v.kind = ElementKind::VariableCircle;
    p.elements = {point("A", 0, 0), point("B", 1, 0), v};
    CHECK(check_vradius_sharing(p, {{"A", "V1"}, {"B", "V1"}}).size() == 1);
    CHECK(check_vradius_sharing(p, {{"A", "V1", "B"}}).empty());
    GcsProblem q = corpus("truss.gcs");
    CHECK(check_vradius_sharing(q, {{"A", "B", "C"}, {"B", "C", "D"}}).empty());
}
