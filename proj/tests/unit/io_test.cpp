#include <filesystem>
#include <regex>

#include "common.hpp"
#include "doctest.h"
#include "gcs/construct.hpp"
#include "gcs/planner.hpp"

using namespace gcs;

namespace {

size_t count(const std::string& s, const std::string& needle) {
    size_t n = 0;
    for (size_t at = s.find(needle); at != std::string::npos; at = s.find(needle, at + 1)) ++n;
    return n;
}

ErrorCode code_of(const std::string& text) {
    try {
        parse_problem(text);
    } catch (const Error& e) {
        return e.code;
    }
    FAIL("expected a parse failure");
    return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("parse the truss document") {
    GcsProblem p = corpus("truss.gcs");
    CHECK(p.elements.size() == 4);
    CHECK(p.constraints.size() == 5);
    REQUIRE(p.element("D").sketch);
    CHECK(p.element("D").sketch->p.x == 1.5);
    CHECK(p.constraints[3].a == "B");
    CHECK(p.constraints[3].b == "D");
    CHECK(p.constraints[3].value == 1.0);
}

TEST_CASE("angles in degrees") {
    GcsProblem p = parse_problem("version 1\nelements\nline L1\nline L2\nconstraints\nq angle L1 L2 90deg\n");
    CHECK(p.constraints[0].value == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
}

TEST_CASE("parse errors") {
    CHECK(code_of("") == ErrorCode::EmptyProblem);
    CHECK(code_of("version 1\nelements\n") == ErrorCode::EmptyProblem);
    CHECK(code_of("version 1\nelements\npoint A\npoint A\n") == ErrorCode::DuplicateId);
    CHECK(code_of("version 1\nelements\nblob A\n") == ErrorCode::UnknownKind);
    CHECK(code_of("version 1\nelements\npoint A\nline L\nconstraints\nx angle A L 1\n") == ErrorCode::ParseError);
    try {
        parse_problem("version 1\nelements\npoint A at 0 0\nconstraints\nX distance A Q 1\n");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code == ErrorCode::ParseError);
        CHECK(e.line == 5);
        CHECK(e.column == 14);
    }
}

TEST_CASE("serialization round-trips the corpus") {
    int n = 0;
    for (const auto& f : std::filesystem::directory_iterator(GCS_CORPUS_DIR)) {
        if (f.path().extension() != ".gcs") continue;
        std::string text = read_file(f.path().string());
        INFO(f.path().filename().string());
        GcsProblem a = parse_document(text);
        std::string once = serialize_problem(a);
        GcsProblem b = parse_document(once);
        CHECK(serialize_problem(b) == once);
        CHECK(to_json(a) == to_json(b));
        ++n;
    }
    CHECK(n >= 25);
}

TEST_CASE("svg rendering") {
    GcsProblem p = corpus("truss.gcs");
    ExecResult r = execute_plan(make_plan(p), p, {0, 0});
    REQUIRE(r.ok);
    std::string svg = render_svg(r.placement, p);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(count(svg, "<circle ") == 4);
    CHECK(count(svg, "<line ") == 5);
    CHECK(count(svg, "stroke-dasharray") == 0);
    CHECK(render_svg(r.placement, p) == svg);

    Placement off = r.placement;
    off["D"].p.x += 0.25;
    std::string bad = render_svg(off, p);
    CHECK(count(bad, "stroke-dasharray") == 2);
    CHECK(std::regex_search(bad, std::regex("id=\"BD\"[^>]*stroke-dasharray")));

    std::string empty = render_svg({}, p);
    CHECK(empty.find("<svg") != std::string::npos);
    CHECK(empty.find("</svg>") != std::string::npos);
    CHECK(count(empty, "<circle ") == 0);
}

TEST_CASE("predicate lines") {
    GcsProblem p = corpus("quad_fig10.gcs");
    auto ps = parse_predicates("side P3 P1 P2 left\nchirality P2 P3 P3 P4 cw\n", p);
    REQUIRE(ps.size() == 2);
    CHECK(ps[0].kind == OrientationPredicate::Kind::PointOnSide);
    CHECK(ps[1].clockwise);
    try {
        parse_predicates("side P3 P1 P2 left\nside P3 P1 Z left\n", p);
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.line == 2);
    }
}
