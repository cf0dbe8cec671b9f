#include <cmath>
#include <random>

#include "common.hpp"
#include "doctest.h"
#include "gcs/construct.hpp"
#include "gcs/planner.hpp"

using namespace gcs;

namespace {

Input pt(double x, double y, double d) {
    Input in;
    in.kind = ElementKind::Point;
    in.pose.p = {x, y};
    in.rel = {false, d};
    return in;
}

bool near(Vec2 a, Vec2 b, double tol = 1e-12) { return norm(a - b) <= tol; }

}  // namespace

TEST_CASE("minimal placements") {
    Placement a = place_minimal("p1", ElementKind::Point, "p2", ElementKind::Point, {false, 5.0});
    CHECK(near(a["p1"].p, {0, 0}));
    CHECK(near(a["p2"].p, {5, 0}));

    Placement b = place_minimal("p", ElementKind::Point, "L", ElementKind::Line, {false, 0.0});
    CHECK(near(b["p"].p, {0, 0}));
    CHECK(std::fabs(b["L"].line.d) < 1e-15);
    CHECK(std::fabs(std::fabs(b["L"].line.n.y) - 1.0) < 1e-15);

    Placement c = place_minimal("L1", ElementKind::Line, "L2", ElementKind::Line, {true, std::numbers::pi / 2});
    CHECK(std::fabs(std::fabs(c["L1"].line.n.y) - 1.0) < 1e-15);
    CHECK(std::fabs(std::fabs(c["L2"].line.n.x) - 1.0) < 1e-15);
    CHECK(std::fabs(c["L2"].line.d) < 1e-15);
}

TEST_CASE("circle-circle intersection against the closed form") {
    auto r = construct_third_roots(ThirdCase::PPtoP, pt(0, 0, 5), pt(6, 0, 5));
    REQUIRE(r.size() == 2);
    REQUIRE(r[0]);
    REQUIRE(r[1]);
    CHECK(near(r[0]->p, {3, 4}));
    CHECK(near(r[1]->p, {3, -4}));

    auto t = construct_third_roots(ThirdCase::PPtoP, pt(0, 0, 1), pt(2, 0, 1));
    REQUIRE(t[0]);
    REQUIRE(t[1]);
    CHECK(near(t[0]->p, {1, 0}));
    CHECK(near(t[1]->p, {1, 0}));

    auto none = construct_third_roots(ThirdCase::PPtoP, pt(0, 0, 0.4), pt(1, 0, 0.4));
    CHECK_FALSE(none[0]);
    CHECK_FALSE(none[1]);
}

TEST_CASE("random circle-circle roots satisfy both distances") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> U(-10, 10);
    for (int i = 0; i < 500; ++i) {
        Vec2 a{U(rng), U(rng)}, b{U(rng), U(rng)}, c{U(rng), U(rng)};
        double ra = norm(c - a), rb = norm(c - b);
        auto r = construct_third_roots(ThirdCase::PPtoP, pt(a.x, a.y, ra), pt(b.x, b.y, rb));
        REQUIRE(r[0]);
        REQUIRE(r[1]);
        CHECK(orient(a, b, r[0]->p) >= 0);
        CHECK(orient(a, b, r[1]->p) <= 0);
        for (const auto& q : r) {
            CHECK(std::fabs(norm(q->p - a) - ra) <= 1e-9 * std::max(1.0, ra));
            CHECK(std::fabs(norm(q->p - b) - rb) <= 1e-9 * std::max(1.0, rb));
        }
        CHECK((near(r[0]->p, c, 1e-7) || near(r[1]->p, c, 1e-7)));
    }
}

TEST_CASE("common tangents of two unit circles") {
    auto r = construct_third_roots(ThirdCase::PPtoL, pt(0, 0, 1), pt(4, 0, 1));
    REQUIRE(r.size() == 4);
    for (const auto& q : r) {
        REQUIRE(q);
        CHECK(std::fabs(std::fabs(q->line.signed_distance({0, 0})) - 1) < 1e-12);
        CHECK(std::fabs(std::fabs(q->line.signed_distance({4, 0})) - 1) < 1e-12);
    }
    // (+,+) and (-,-) are the outer tangents y = 1 and y = -1
    for (int slot : {0, 3}) {
        CHECK(std::fabs(std::fabs(r[static_cast<size_t>(slot)]->line.n.y) - 1) < 1e-12);
        CHECK(std::fabs(std::fabs(r[static_cast<size_t>(slot)]->line.d) - 1) < 1e-12);
    }
    CHECK(r[0]->line.signed_distance({0, 0}) > 0);
    CHECK(r[3]->line.signed_distance({0, 0}) < 0);
}

TEST_CASE("touching circles have a doubled inner tangent") {
    auto r = construct_third_roots(ThirdCase::PPtoL, pt(0, 0, 2), pt(4, 0, 2));
    int vertical = 0;
    for (const auto& q : r) {
        REQUIRE(q);
        if (std::fabs(std::fabs(q->line.n.x) - 1) < 1e-9) {
            ++vertical;
            CHECK(std::fabs(std::fabs(q->line.d) - 2) < 1e-9);
        }
    }
    CHECK(vertical == 2);
}

TEST_CASE("cluster merge") {
    GcsProblem p = corpus("truss.gcs");
    double h = std::sqrt(3.0) / 2;
    Placement fixed, moving;
    fixed["A"].p = {0, 0};
    fixed["B"].p = {1, 0};
    fixed["C"].p = {0.5, h};
    // triangle B C D in its own frame
    Rigid m = Rigid::rotation(0.7).then(Rigid::translation({3, -2}));
    moving["B"].p = m.apply(Vec2{1, 0});
    moving["C"].p = m.apply(Vec2{0.5, h});
    moving["D"].p = m.apply(Vec2{1.5, h});
    Placement merged = merge_clusters(p, fixed, moving, {"B", "C"});
    CHECK(merged.size() == 4);
    CHECK(max_residual(p, merged) < 1e-12);

    Placement same = merge_clusters(p, fixed, fixed, {"B", "C"});
    CHECK(placement_gap(p, same, fixed) < 1e-15);

    moving["C"].p = m.apply(Vec2{0.5, h + 0.1});
    CHECK_THROWS_AS(merge_clusters(p, fixed, moving, {"B", "C"}), Error);
}

TEST_CASE("truss execution") {
    GcsProblem p = corpus("truss.gcs");
    ConstructionPlan plan = make_plan(p);
    double h = std::sqrt(3.0) / 2;
    std::vector<Vec2> ds;
    for (int s1 : {0, 1}) {
        ExecResult r = execute_plan(plan, p, {0, s1});
        REQUIRE(r.ok);
        CHECK(max_residual(p, r.placement) < 1e-12);
        Vec2 a = r.placement["A"].p, b = r.placement["B"].p, c = r.placement["C"].p;
        CHECK(near(a, {0, 0}));
        CHECK(near(b, {1, 0}));
        // C is built from B and A, on the left of B->A
        CHECK(near(c, {0.5, -h}));
        ds.push_back(r.placement["D"].p);
    }
    // ++ opens the rhombus, +- folds D back onto A.
    CHECK(near(ds[0], {1.5, -h}));
    CHECK(near(ds[1], {0, 0}, 1e-15));

    GcsProblem q = corpus("truss_infeasible.gcs");
    ConstructionPlan qp = make_plan(q);
    ExecResult bad = execute_plan(qp, q, {0, 0});
    CHECK_FALSE(bad.ok);
    CHECK(bad.failed_step == 2);
}

TEST_CASE("congruence gap ignores rigid motions") {
    GcsProblem p = corpus("quad_fig10.gcs");
    ExecResult r = execute_plan(make_plan(p), p, {0, 0, 0});
    REQUIRE(r.ok);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-5, 5);
    for (int i = 0; i < 50; ++i) {
        Rigid m = Rigid::rotation(U(rng)).then(Rigid::translation({U(rng), U(rng)}));
        Placement moved = transform(p, r.placement, m);
        CHECK(congruence_gap(p, moved, r.placement) < 1e-12);
        CHECK(max_residual(p, moved) < 1e-12);
    }
}
