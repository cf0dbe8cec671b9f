#include "gcs/model.hpp"

#include <algorithm>
#include <numbers>
#include <set>

namespace gcs {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidSubset: return "InvalidSubset";
        case ErrorCode::DegenerateCompound: return "DegenerateCompound";
        case ErrorCode::DegenerateMinimal: return "DegenerateMinimal";
        case ErrorCode::Infeasible: return "Infeasible";
        case ErrorCode::TagUnavailable: return "TagUnavailable";
        case ErrorCode::MergeIncongruent: return "MergeIncongruent";
        case ErrorCode::PlanError: return "PlanError";
        case ErrorCode::NotDecomposable: return "NotDecomposable";
        case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
        case ErrorCode::SketchRequired: return "SketchRequired";
        case ErrorCode::BadStep: return "BadStep";
        case ErrorCode::NotMultiRoot: return "NotMultiRoot";
        case ErrorCode::KindMismatch: return "KindMismatch";
        case ErrorCode::NotCompletableByDecomposition: return "NotCompletableByDecomposition";
        case ErrorCode::BadEndpoint: return "BadEndpoint";
        case ErrorCode::Unreachable: return "Unreachable";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::EmptyProblem: return "EmptyProblem";
        case ErrorCode::UnknownKind: return "UnknownKind";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

int dof(ElementKind k) { return k == ElementKind::VariableCircle ? 3 : 2; }

const char* kind_name(ElementKind k) {
    switch (k) {
        case ElementKind::Point: return "point";
        case ElementKind::Line: return "line";
        case ElementKind::FixedCircle: return "circle";
        case ElementKind::VariableCircle: return "vcircle";
    }
    return "?";
}

int equation_count(ConstraintKind k) {
    return (k == ConstraintKind::PointOnPoint || k == ConstraintKind::LineLineParallelDistance) ? 2 : 1;
}

const char* kind_name(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::PointPointDistance: return "PointPointDistance";
        case ConstraintKind::PointLineDistance: return "PointLineDistance";
        case ConstraintKind::LineLineAngle: return "LineLineAngle";
        case ConstraintKind::PointOnPoint: return "PointOnPoint";
        case ConstraintKind::PointOnLine: return "PointOnLine";
        case ConstraintKind::LineLineParallelDistance: return "LineLineParallelDistance";
        case ConstraintKind::TangentLineCircle: return "TangentLineCircle";
        case ConstraintKind::TangentCircleCircle: return "TangentCircleCircle";
        case ConstraintKind::CenterDistance: return "CenterDistance";
    }
    return "?";
}

int GcsProblem::element_index(const std::string& id) const {
    for (size_t i = 0; i < elements.size(); ++i)
        if (elements[i].id == id) return static_cast<int>(i);
    return -1;
}

int GcsProblem::constraint_index(const std::string& id) const {
    for (size_t i = 0; i < constraints.size(); ++i)
        if (constraints[i].id == id) return static_cast<int>(i);
    return -1;
}

const Element& GcsProblem::element(const std::string& id) const {
    int i = element_index(id);
    if (i < 0) throw Error(ErrorCode::PlanError, "unknown element " + id);
    return elements[static_cast<size_t>(i)];
}

bool GcsProblem::has_sketch() const {
    return !elements.empty() &&
           std::all_of(elements.begin(), elements.end(), [](const Element& e) { return e.sketch.has_value(); });
}

GcsProblem expand_compound(const GcsProblem& problem) {
    GcsProblem out = problem;
    out.arcs.clear();
    for (const Arc& arc : problem.arcs) {
        if (arc.start == arc.end)
            throw Error(ErrorCode::DegenerateCompound, "arc " + arc.id + " has coincident endpoints");
        int si = out.element_index(arc.start);
        int ei = out.element_index(arc.end);
        if (si >= 0 && ei >= 0) {
            const auto& s = out.elements[static_cast<size_t>(si)].sketch;
            const auto& e = out.elements[static_cast<size_t>(ei)].sketch;
            if (s && e && norm(s->p - e->p) == 0.0)
                throw Error(ErrorCode::DegenerateCompound, "arc " + arc.id + " has coincident endpoints");
        }
        Element vc;
        vc.id = arc.id;
        vc.kind = ElementKind::VariableCircle;
        vc.sketch = arc.sketch_circle;
        out.elements.push_back(vc);
        for (const std::string& end : {arc.start, arc.end}) {
            if (out.element_index(end) < 0) out.elements.push_back(Element{end, ElementKind::Point, 0.0, {}});
            Constraint c;
            c.id = arc.id + "." + end;
            c.kind = ConstraintKind::CenterDistance;
            c.a = end;
            c.b = arc.id;
            c.value = 0.0;
            c.perimeter = true;
            out.constraints.push_back(c);
        }
    }
    return out;
}

namespace {

bool kinds_ok(const Constraint& c, ElementKind a, ElementKind b) {
    using K = ElementKind;
    switch (c.kind) {
        case ConstraintKind::PointPointDistance: return a == K::Point && b == K::Point;
        case ConstraintKind::PointLineDistance:
        case ConstraintKind::PointOnLine: return a == K::Point && b == K::Line;
        case ConstraintKind::LineLineAngle:
        case ConstraintKind::LineLineParallelDistance: return a == K::Line && b == K::Line;
        case ConstraintKind::PointOnPoint: return a != K::Line && b != K::Line;
        case ConstraintKind::TangentLineCircle: return a == K::Line && is_circle(b);
        case ConstraintKind::TangentCircleCircle: return is_circle(a) && is_circle(b);
        case ConstraintKind::CenterDistance:
            if (a == K::Line || b == K::Line) return false;
            return !c.perimeter || is_circle(b);
    }
    return false;
}

}  // namespace

std::vector<Violation> validate(const GcsProblem& problem) {
    std::vector<Violation> out;
    std::set<std::string> ids;
    for (const Element& e : problem.elements) {
        if (!ids.insert(e.id).second) out.push_back({e.id, "duplicate element id"});
        if (e.kind == ElementKind::FixedCircle && !(e.radius > 0.0))
            out.push_back({e.id, "fixed circle radius must be positive"});
    }
    std::set<std::string> cids;
    std::set<std::tuple<int, std::string, std::string>> seen;
    for (const Constraint& c : problem.constraints) {
        if (!cids.insert(c.id).second) out.push_back({c.id, "duplicate constraint id"});
        int ia = problem.element_index(c.a);
        int ib = problem.element_index(c.b);
        if (ia < 0 || ib < 0) {
            out.push_back({c.id, "dangling reference to " + (ia < 0 ? c.a : c.b)});
            continue;
        }
        if (ia == ib) out.push_back({c.id, "constraint joins an element to itself"});
        ElementKind ka = problem.elements[static_cast<size_t>(ia)].kind;
        ElementKind kb = problem.elements[static_cast<size_t>(ib)].kind;
        if (!kinds_ok(c, ka, kb))
            out.push_back({c.id, std::string("kind mismatch: ") + kind_name(c.kind) + " on " + kind_name(ka) +
                                     "/" + kind_name(kb)});
        if (c.kind == ConstraintKind::PointPointDistance && c.value == 0.0)
            out.push_back({c.id, "zero distance must be PointOnPoint"});
        else if (c.kind == ConstraintKind::PointPointDistance && c.value < 0.0)
            out.push_back({c.id, "negative distance"});
        if ((c.kind == ConstraintKind::PointLineDistance || c.kind == ConstraintKind::LineLineParallelDistance ||
             (c.kind == ConstraintKind::CenterDistance && !c.perimeter)) &&
            c.value < 0.0)
            out.push_back({c.id, "negative distance"});
        if (c.kind == ConstraintKind::LineLineAngle && (c.value < 0.0 || c.value >= std::numbers::pi))
            out.push_back({c.id, "angle outside [0, pi)"});
        auto key = std::make_tuple(static_cast<int>(c.kind), std::min(c.a, c.b), std::max(c.a, c.b));
        if (!seen.insert(key).second) out.push_back({c.id, "duplicate constraint on the same pair"});
    }
    return out;
}

}  // namespace gcs
