#include <random>

#include "common.hpp"
#include "doctest.h"
#include "gcs/planner.hpp"
#include "gcs/roots.hpp"

using namespace gcs;

TEST_CASE("sign strings") {
    ConstructionPlan truss = make_plan(corpus("truss.gcs"));
    CHECK(parse_signs("+-", truss) == SignVector{0, 1});
    CHECK(format_signs({1, 0}, truss) == "-+");
    CHECK_THROWS_AS(parse_signs("+", truss), Error);
    CHECK_THROWS_AS(parse_signs("+x", truss), Error);

    ConstructionPlan corner = make_plan(corpus("corner_point.gcs"));
    CHECK(parse_signs("c", corner) == SignVector{2});
    CHECK(parse_signs("{3}", corner) == SignVector{3});
    CHECK(format_signs({3}, corner) == "d");
    CHECK_THROWS_AS(parse_signs("{4}", corner), Error);
}

TEST_CASE("enumeration order and limits") {
    GcsProblem p = corpus("truss.gcs");
    ConstructionPlan plan = make_plan(p);
    EnumerateResult all = enumerate(plan, p);
    CHECK(all.exhausted);
    CHECK(all.signs.size() == 4);
    CHECK(std::is_sorted(all.signs.begin(), all.signs.end()));
    for (const Placement& pl : all.placements) CHECK(max_residual(p, pl) < 1e-8);
    EnumerateResult one = enumerate(plan, p, 1);
    REQUIRE(one.signs.size() == 1);
    CHECK(one.signs[0] == all.signs[0]);
    CHECK_FALSE(one.exhausted);

    GcsProblem bad = corpus("truss_infeasible.gcs");
    EnumerateResult none = enumerate(make_plan(bad), bad);
    CHECK(none.signs.empty());
    CHECK(none.exhausted);
    CHECK(none.step_executions[2] > 0);
}

TEST_CASE("every enumerated sign vector executes to its placement") {
    for (const char* name : {"three_trusses.gcs", "quad_fig10.gcs", "apollonius.gcs", "hexagon.gcs", "vc_merge.gcs"}) {
        GcsProblem p = corpus(name);
        ConstructionPlan plan = make_plan(p);
        EnumerateResult e = enumerate(plan, p);
        INFO(name);
        CHECK(e.signs.size() <= static_cast<size_t>(plan.solution_bound()));
        for (size_t i = 0; i < e.signs.size(); ++i) {
            ExecResult r = execute_plan(plan, p, e.signs[i]);
            REQUIRE(r.ok);
            CHECK(placement_gap(p, r.placement, e.placements[i]) == 0.0);
            CHECK(max_residual(p, r.placement) < 1e-8);
        }
    }
}

TEST_CASE("sketch heuristic") {
    GcsProblem tri = corpus("triangle.gcs");
    ConstructionPlan tp = make_plan(tri);
    HeuristicResult h = heuristic_signs(tp, tri);
    ExecResult r = execute_plan(tp, tri, h.signs);
    REQUIRE(r.ok);
    // the sketch has C left of A->B
    CHECK(orient(r.placement["A"].p, r.placement["B"].p, r.placement["C"].p) > 0);
    CHECK(h.fallback_steps.empty());

    for (const char* name : {"quad_fig10.gcs", "three_trusses.gcs", "truss.gcs"}) {
        GcsProblem p = corpus(name);
        ConstructionPlan plan = make_plan(p);
        EnumerateResult e = enumerate(plan, p);
        for (size_t i = 0; i < e.signs.size(); i += 3) {
            GcsProblem q = p;
            for (Element& el : q.elements) el.sketch = e.placements[i].at(el.id);
            if (max_residual(q, e.placements[i]) > 1e-9) continue;
            HeuristicResult hh = heuristic_signs(plan, q);
            ExecResult rr = execute_plan(plan, q, hh.signs);
            REQUIRE(rr.ok);
            INFO(name, " ", i);
            CHECK(congruence_gap(q, rr.placement, e.placements[i]) < 1e-9);
        }
    }
}

TEST_CASE("navigator flips") {
    GcsProblem p = corpus("truss.gcs");
    ConstructionPlan plan = make_plan(p);
    Navigator nav(plan, p, {0, 0});
    Placement start = nav.placement();
    FlipResult f = nav.flip(2);
    CHECK(f.signs == SignVector{0, 1});
    CHECK(f.feasible);
    CHECK(f.changed == std::vector<std::string>{"D"});
    CHECK(placement_gap(p, f.placement, execute_plan(plan, p, {0, 1}).placement) <= 1e-12);
    FlipResult back = nav.flip(2);
    CHECK(placement_gap(p, back.placement, start) == 0.0);

    FlipResult first = nav.flip(1);
    CHECK(first.changed.size() == 2);
    CHECK(first.reexecuted == 2);

    CHECK_THROWS_AS(nav.flip(0), Error);
    CHECK_THROWS_AS(nav.flip(7), Error);

    GcsProblem bad = corpus("truss_infeasible.gcs");
    ConstructionPlan bp = make_plan(bad);
    Navigator bn(bp, bad, {0, 0});
    CHECK_FALSE(bn.feasible());
    CHECK(bn.failed_step() == 2);
    FlipResult bf = bn.flip(1);
    CHECK_FALSE(bf.feasible);
    CHECK(bf.failed_step == 2);
}

TEST_CASE("predicates on a placement") {
    GcsProblem p = corpus("triangle.gcs");
    Placement pl;
    pl["A"].p = {0, 0};
    pl["B"].p = {3, 0};
    pl["C"].p = {1, 2};
    OrientationPredicate side{OrientationPredicate::Kind::PointOnSide, {"C", "A", "B"}, OrientationPredicate::Side::Left};
    CHECK(evaluate(side, pl, p));
    side.side = OrientationPredicate::Side::Right;
    CHECK_FALSE(evaluate(side, pl, p));
    OrientationPredicate chi{OrientationPredicate::Kind::Chirality, {"A", "B", "B", "C"}};
    chi.clockwise = false;
    CHECK(evaluate(chi, pl, p));
    chi.clockwise = true;
    CHECK_FALSE(evaluate(chi, pl, p));
}
