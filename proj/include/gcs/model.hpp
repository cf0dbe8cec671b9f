#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcs/geometry.hpp"

namespace gcs {

enum class ErrorCode {
    InvalidSubset,
    DegenerateCompound,
    DegenerateMinimal,
    Infeasible,
    TagUnavailable,
    MergeIncongruent,
    PlanError,
    NotDecomposable,
    DegenerateConfiguration,
    SketchRequired,
    BadStep,
    NotMultiRoot,
    KindMismatch,
    NotCompletableByDecomposition,
    BadEndpoint,
    Unreachable,
    ParseError,
    EmptyProblem,
    UnknownKind,
    DuplicateId,
    IoError,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg, int step = -1)
        : std::runtime_error(msg), code(code), step(step) {}
    ErrorCode code;
    int step = -1;
    int line = 0;
    int column = 0;
};

enum class ElementKind { Point, Line, FixedCircle, VariableCircle };

int dof(ElementKind k);
const char* kind_name(ElementKind k);
inline bool is_circle(ElementKind k) {
    return k == ElementKind::FixedCircle || k == ElementKind::VariableCircle;
}
// Elements that act as a single point in constructions (fixed circles are reduced to their center).
inline bool point_like(ElementKind k) { return k == ElementKind::Point || k == ElementKind::FixedCircle; }

// Coordinates of one element. Points use p; lines use line; circles use p (center) and r.
struct Pose {
    Vec2 p{};
    Line2 line{};
    double r = 0.0;
};

struct Element {
    std::string id;
    ElementKind kind = ElementKind::Point;
    double radius = 0.0;
    std::optional<Pose> sketch;
};

enum class ConstraintKind {
    PointPointDistance,
    PointLineDistance,
    LineLineAngle,
    PointOnPoint,
    PointOnLine,
    LineLineParallelDistance,
    TangentLineCircle,
    TangentCircleCircle,
    CenterDistance,
};

int equation_count(ConstraintKind k);
const char* kind_name(ConstraintKind k);

struct Constraint {
    std::string id;
    ConstraintKind kind = ConstraintKind::PointPointDistance;
    std::string a;
    std::string b;
    // Length, or directed angle from a to b in radians within [0, pi).
    double value = 0.0;
    // CenterDistance only: measure from the perimeter of b, |c(a) - c(b)| = r(b) + value.
    bool perimeter = false;
    // TangentCircleCircle only: which tangency the constraint admits.
    enum class Tangency { Any, External, Internal } tangency = Tangency::Any;
};

// Compound sugar: a circular arc with two endpoints on a variable-radius circle.
struct Arc {
    std::string id;
    std::string start;
    std::string end;
    std::optional<Pose> sketch_circle;
};

struct OrientationPredicate {
    enum class Kind { PointOnSide, Chirality };
    enum class Side { Left, Right, On };
    Kind kind = Kind::PointOnSide;
    // PointOnSide: {point, a, b} (directed pair a->b) or {point, line}.
    // Chirality: {a, b, c, d} for directed pairs a->b and c->d.
    std::vector<std::string> args;
    Side side = Side::Left;
    bool clockwise = true;
};

struct GcsProblem {
    std::vector<Element> elements;
    std::vector<Constraint> constraints;
    std::vector<OrientationPredicate> predicates;
    std::vector<Arc> arcs;
    std::optional<std::string> linkage;

    int element_index(const std::string& id) const;
    int constraint_index(const std::string& id) const;
    const Element& element(const std::string& id) const;
    bool has_sketch() const;
};

struct Violation {
    std::string subject;
    std::string message;
};

GcsProblem expand_compound(const GcsProblem& problem);
std::vector<Violation> validate(const GcsProblem& problem);

}  // namespace gcs
