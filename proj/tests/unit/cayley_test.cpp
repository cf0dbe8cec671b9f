#include <cmath>
#include <random>

#include "common.hpp"
#include "doctest.h"
#include "gcs/cayley.hpp"

using namespace gcs;

namespace {

void check_sound(const Linkage& lk, const CayleySpace& cs, int samples, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(cs.domain_lo, cs.domain_hi);
    double tol = 1e-9 * (cs.domain_hi - cs.domain_lo);
    for (int i = 0; i < samples; ++i) {
        size_t o = rng() % cs.orientations.size();
        double v = U(rng);
        bool inside = interval_of(cs, o, v) >= 0;
        if (inside != (interval_of(cs, o, v, tol) >= 0)) continue;
        CHECK(execute_at(lk, cs.orientations[o].signs, v).ok == inside);
    }
}

}  // namespace

TEST_CASE("triangle linkage has one interval per orientation") {
    Linkage lk = make_linkage(corpus("triangle_linkage.gcs"));
    CayleySpace cs = cayley_space(lk);
    REQUIRE(cs.orientations.size() == 2);
    for (const auto& o : cs.orientations) {
        REQUIRE(o.intervals.size() == 1);
        CHECK(std::fabs(o.intervals[0].lo - 2.0) < 1e-8);
        CHECK(std::fabs(o.intervals[0].hi - 8.0) < 1e-8);
        CHECK_FALSE(o.intervals[0].lo_domain);
        CHECK_FALSE(o.intervals[0].hi_domain);
    }
    check_sound(lk, cs, 500, 1);
}

TEST_CASE("crankshaft over the rod length") {
    Linkage lk = make_linkage(corpus("crankshaft.gcs"));
    CayleySpace cs = cayley_space(lk);
    CHECK(cs.orientations.size() == 4);
    size_t n = 0;
    for (const auto& o : cs.orientations) n += o.intervals.size();
    CHECK(n == 4);
    check_sound(lk, cs, 500, 2);
}

TEST_CASE("crankshaft over the angle covers the whole domain") {
    GcsProblem p = corpus("crankshaft.gcs");
    p.linkage = "alpha";
    Linkage lk = make_linkage(p);
    CHECK(lk.angle);
    CayleySpace cs = cayley_space(lk);
    for (const auto& o : cs.orientations) {
        REQUIRE(o.intervals.size() == 1);
        CHECK(o.intervals[0].lo_domain);
        CHECK(o.intervals[0].hi_domain);
    }
    check_sound(lk, cs, 300, 4);
}

TEST_CASE("crank and slider has two components per orientation") {
    Linkage lk = make_linkage(corpus("crank_slider.gcs"));
    CayleySpace cs = cayley_space(lk);
    for (const auto& o : cs.orientations) CHECK(o.intervals.size() == 2);
    check_sound(lk, cs, 500, 3);
    // the rod reaches L1 only while sin(alpha) <= 1.5 / 2
    double edge = std::asin(0.75);
    const auto& first = cs.orientations[0].intervals;
    CHECK(std::fabs(first[0].hi - edge) < 1e-8);
    CHECK(std::fabs(first[1].lo - (std::numbers::pi - edge)) < 1e-8);
}

TEST_CASE("reachability") {
    Linkage lk = make_linkage(corpus("triangle_linkage.gcs"));
    CayleySpace cs = cayley_space(lk);
    ReachPath direct = reachable(lk, cs, {cs.orientations[0].signs, 3.0}, {cs.orientations[0].signs, 7.5});
    CHECK(direct.segments.size() == 1);
    CHECK(direct.length == doctest::Approx(4.5));

    ReachPath flip = reachable(lk, cs, {cs.orientations[0].signs, 3.0}, {cs.orientations[1].signs, 3.0});
    REQUIRE(flip.transitions.size() == 1);
    CHECK(std::fabs(flip.transitions[0] - 2.0) < 1e-8);
    CHECK(flip.length == doctest::Approx(2.0).epsilon(1e-8));

    CHECK_THROWS_AS(reachable(lk, cs, {cs.orientations[0].signs, 1.0}, {cs.orientations[0].signs, 3.0}), Error);

    Linkage sl = make_linkage(corpus("crank_slider.gcs"));
    CayleySpace ss = cayley_space(sl);
    double a = 10 * std::numbers::pi / 180;
    try {
        reachable(sl, ss, {ss.orientations[0].signs, a}, {ss.orientations[3].signs, a});
        FAIL("expected Unreachable");
    } catch (const Error& e) {
        CHECK(e.code == ErrorCode::Unreachable);
    }
}

TEST_CASE("locating placements") {
    Linkage lk = make_linkage(corpus("triangle_linkage.gcs"));
    for (const auto& signs : {SignVector{0}, SignVector{1}}) {
        ExecResult r = execute_at(lk, signs, 5.5);
        REQUIRE(r.ok);
        ReachEndpoint e = locate(lk, r.placement);
        CHECK(e.signs == signs);
        CHECK(e.value == doctest::Approx(5.5).epsilon(1e-12));
    }
}

TEST_CASE("linkage errors") {
    CHECK_THROWS_AS(make_linkage(corpus("truss.gcs")), Error);
}
