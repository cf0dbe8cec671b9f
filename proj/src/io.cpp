#include "gcs/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace gcs {

namespace {

struct Token {
    std::string text;
    int column = 0;
};

struct Line {
    int number = 0;
    std::vector<Token> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
        ++no;
        Line l;
        l.number = no;
        size_t i = 0;
        while (i < raw.size()) {
            if (raw[i] == '#') break;
            if (std::isspace(static_cast<unsigned char>(raw[i]))) {
                ++i;
                continue;
            }
            size_t j = i;
            while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j])) && raw[j] != '#') ++j;
            l.tokens.push_back({raw.substr(i, j - i), static_cast<int>(i) + 1});
            i = j;
        }
        if (!l.tokens.empty()) out.push_back(l);
    }
    return out;
}

[[noreturn]] void fail(ErrorCode code, const std::string& msg, int line, int col) {
    Error e(code, msg + " (line " + std::to_string(line) + ", column " + std::to_string(col) + ")");
    e.line = line;
    e.column = col;
    throw e;
}

const Token& tok(const Line& l, size_t i, const char* what) {
    if (i >= l.tokens.size()) {
        int col = l.tokens.empty() ? 1 : l.tokens.back().column + static_cast<int>(l.tokens.back().text.size());
        fail(ErrorCode::ParseError, std::string("expected ") + what, l.number, col);
    }
    return l.tokens[i];
}

double number(const Line& l, size_t i, const char* what) {
    const Token& t = tok(l, i, what);
    char* end = nullptr;
    double v = std::strtod(t.text.c_str(), &end);
    if (end == t.text.c_str() || *end != '\0' || !std::isfinite(v))
        fail(ErrorCode::ParseError, std::string("expected ") + what + ", got '" + t.text + "'", l.number, t.column);
    return v;
}

double angle_value(const Line& l, size_t i) {
    const Token& t = tok(l, i, "angle");
    char* end = nullptr;
    double v = std::strtod(t.text.c_str(), &end);
    if (end == t.text.c_str() || !std::isfinite(v))
        fail(ErrorCode::ParseError, "expected angle, got '" + t.text + "'", l.number, t.column);
    std::string unit(end);
    if (unit == "deg") v = v * std::numbers::pi / 180.0;
    else if (unit != "rad" && !unit.empty())
        fail(ErrorCode::ParseError, "unknown angle unit '" + unit + "'", l.number, t.column);
    v = std::fmod(v, std::numbers::pi);
    if (v < 0) v += std::numbers::pi;
    if (v >= std::numbers::pi) v -= std::numbers::pi;
    return v;
}

void expect_end(const Line& l, size_t i) {
    if (i < l.tokens.size())
        fail(ErrorCode::ParseError, "unexpected '" + l.tokens[i].text + "'", l.number, l.tokens[i].column);
}

struct PendingConstraint {
    Line line;
};

}  // namespace

GcsProblem parse_document(const std::string& text) {
    GcsProblem p;
    std::vector<Line> lines = tokenize(text);
    std::string section;
    std::set<std::string> ids;
    std::vector<Line> pending;
    std::vector<Line> preds;
    bool seen_version = false;
    for (const Line& l : lines) {
        const std::string& head = l.tokens[0].text;
        if (l.tokens.size() == 1 &&
            (head == "elements" || head == "constraints" || head == "predicates" || head == "linkage")) {
            section = head;
            continue;
        }
        if (head == "version") {
            if (seen_version || !section.empty())
                fail(ErrorCode::ParseError, "version must come first and only once", l.number, l.tokens[0].column);
            double v = number(l, 1, "version number");
            if (v != 1.0) fail(ErrorCode::ParseError, "unsupported version", l.number, l.tokens[1].column);
            expect_end(l, 2);
            seen_version = true;
            continue;
        }
        if (section.empty()) fail(ErrorCode::ParseError, "content outside a section", l.number, l.tokens[0].column);
        if (section == "elements") {
            Element e;
            const Token& id = tok(l, 1, "element id");
            e.id = id.text;
            if (!ids.insert(e.id).second) fail(ErrorCode::DuplicateId, "duplicate id '" + e.id + "'", l.number, id.column);
            size_t i = 2;
            if (head == "point") {
                e.kind = ElementKind::Point;
                if (i < l.tokens.size()) {
                    if (l.tokens[i].text != "at") fail(ErrorCode::ParseError, "expected 'at'", l.number, l.tokens[i].column);
                    Pose s;
                    s.p = {number(l, i + 1, "x"), number(l, i + 2, "y")};
                    e.sketch = s;
                    i += 3;
                }
            } else if (head == "line") {
                e.kind = ElementKind::Line;
                if (i < l.tokens.size()) {
                    const std::string& how = l.tokens[i].text;
                    Pose s;
                    if (how == "normal") {
                        Vec2 n{number(l, i + 1, "nx"), number(l, i + 2, "ny")};
                        double d = number(l, i + 3, "d");
                        double len = norm(n);
                        if (len == 0.0) fail(ErrorCode::ParseError, "zero normal", l.number, l.tokens[i + 1].column);
                        if (std::fabs(len - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) len = 1.0;
                        s.line = Line2{(1.0 / len) * n, d / len};
                        i += 4;
                    } else if (how == "through") {
                        Vec2 a{number(l, i + 1, "x1"), number(l, i + 2, "y1")};
                        Vec2 b{number(l, i + 3, "x2"), number(l, i + 4, "y2")};
                        if (norm(b - a) == 0.0)
                            fail(ErrorCode::ParseError, "coincident points", l.number, l.tokens[i + 1].column);
                        s.line = Line2::through(a, b - a);
                        i += 5;
                    } else {
                        fail(ErrorCode::ParseError, "expected 'normal' or 'through'", l.number, l.tokens[i].column);
                    }
                    e.sketch = s;
                }
            } else if (head == "circle") {
                e.kind = ElementKind::FixedCircle;
                if (tok(l, i, "'radius'").text != "radius")
                    fail(ErrorCode::ParseError, "expected 'radius'", l.number, l.tokens[i].column);
                e.radius = number(l, i + 1, "radius");
                i += 2;
                if (i < l.tokens.size()) {
                    if (l.tokens[i].text != "at") fail(ErrorCode::ParseError, "expected 'at'", l.number, l.tokens[i].column);
                    Pose s;
                    s.p = {number(l, i + 1, "x"), number(l, i + 2, "y")};
                    s.r = e.radius;
                    e.sketch = s;
                    i += 3;
                }
            } else if (head == "vcircle") {
                e.kind = ElementKind::VariableCircle;
                if (i < l.tokens.size()) {
                    if (l.tokens[i].text != "at") fail(ErrorCode::ParseError, "expected 'at'", l.number, l.tokens[i].column);
                    Pose s;
                    s.p = {number(l, i + 1, "x"), number(l, i + 2, "y")};
                    s.r = number(l, i + 3, "r");
                    e.sketch = s;
                    i += 4;
                }
            } else if (head == "arc") {
                Arc a;
                a.id = e.id;
                a.start = tok(l, 2, "start point").text;
                a.end = tok(l, 3, "end point").text;
                i = 4;
                if (i < l.tokens.size()) {
                    if (l.tokens[i].text != "center")
                        fail(ErrorCode::ParseError, "expected 'center'", l.number, l.tokens[i].column);
                    Pose s;
                    s.p = {number(l, i + 1, "x"), number(l, i + 2, "y")};
                    s.r = number(l, i + 3, "r");
                    a.sketch_circle = s;
                    i += 4;
                }
                expect_end(l, i);
                p.arcs.push_back(a);
                continue;
            } else {
                fail(ErrorCode::UnknownKind, "unknown element kind '" + head + "'", l.number, l.tokens[0].column);
            }
            expect_end(l, i);
            p.elements.push_back(e);
        } else if (section == "constraints") {
            pending.push_back(l);
        } else if (section == "predicates") {
            preds.push_back(l);
        } else if (section == "linkage") {
            if (head != "free") fail(ErrorCode::ParseError, "expected 'free'", l.number, l.tokens[0].column);
            p.linkage = tok(l, 1, "constraint id").text;
            expect_end(l, 2);
        }
    }

    auto kind_of = [&](const Line& l, size_t i) -> ElementKind {
        const Token& t = tok(l, i, "element id");
        int k = p.element_index(t.text);
        if (k >= 0) return p.elements[static_cast<size_t>(k)].kind;
        for (const Arc& a : p.arcs) {
            if (a.id == t.text) return ElementKind::VariableCircle;
            if (a.start == t.text || a.end == t.text) return ElementKind::Point;
        }
        fail(ErrorCode::ParseError, "unknown element '" + t.text + "'", l.number, t.column);
    };

    std::set<std::string> cids;
    for (const Line& l : pending) {
        Constraint c;
        c.id = l.tokens[0].text;
        if (!cids.insert(c.id).second || ids.count(c.id))
            fail(ErrorCode::DuplicateId, "duplicate id '" + c.id + "'", l.number, l.tokens[0].column);
        const Token& kt = tok(l, 1, "constraint kind");
        const std::string& kind = kt.text;
        c.a = tok(l, 2, "first element").text;
        c.b = tok(l, 3, "second element").text;
        ElementKind ka = kind_of(l, 2), kb = kind_of(l, 3);
        bool la = ka == ElementKind::Line, lb = kb == ElementKind::Line;
        auto swap_ab = [&] {
            std::swap(c.a, c.b);
            std::swap(ka, kb);
            std::swap(la, lb);
        };
        auto mismatch = [&] {
            fail(ErrorCode::ParseError, "'" + kind + "' does not apply to " + kind_name(ka) + "/" + kind_name(kb), l.number,
                 kt.column);
        };
        size_t i = 4;
        if (kind == "distance") {
            c.value = number(l, i++, "distance");
            if (la && lb) mismatch();
            if (la) swap_ab();
            if (lb) {
                if (ka != ElementKind::Point) mismatch();
                c.kind = ConstraintKind::PointLineDistance;
            } else if (ka == ElementKind::Point && kb == ElementKind::Point) {
                c.kind = ConstraintKind::PointPointDistance;
            } else {
                c.kind = ConstraintKind::CenterDistance;
            }
        } else if (kind == "angle") {
            if (!la || !lb) mismatch();
            c.kind = ConstraintKind::LineLineAngle;
            c.value = angle_value(l, i++);
        } else if (kind == "on") {
            if (la) swap_ab();
            if (lb) {
                if (ka != ElementKind::Point) mismatch();
                c.kind = ConstraintKind::PointOnLine;
            } else if (is_circle(kb) && !la) {
                c.kind = ConstraintKind::CenterDistance;
                c.perimeter = true;
            } else {
                mismatch();
            }
        } else if (kind == "coincident") {
            c.kind = ConstraintKind::PointOnPoint;
        } else if (kind == "parallel") {
            if (!la || !lb) mismatch();
            c.kind = ConstraintKind::LineLineParallelDistance;
            c.value = number(l, i++, "distance");
        } else if (kind == "tangent") {
            if (lb) swap_ab();
            if (la) {
                if (!is_circle(kb)) mismatch();
                c.kind = ConstraintKind::TangentLineCircle;
            } else {
                if (!is_circle(ka) || !is_circle(kb)) mismatch();
                c.kind = ConstraintKind::TangentCircleCircle;
            }
            if (i < l.tokens.size() && l.tokens[i].text != "external" && l.tokens[i].text != "internal")
                c.value = number(l, i++, "offset");
            if (i < l.tokens.size()) {
                const Token& t = l.tokens[i];
                if (c.kind != ConstraintKind::TangentCircleCircle || (t.text != "external" && t.text != "internal"))
                    fail(ErrorCode::ParseError, "unexpected '" + t.text + "'", l.number, t.column);
                c.tangency = t.text == "external" ? Constraint::Tangency::External : Constraint::Tangency::Internal;
                ++i;
            }
        } else if (kind == "center") {
            if (la || lb) mismatch();
            c.kind = ConstraintKind::CenterDistance;
            c.value = number(l, i++, "distance");
            if (i < l.tokens.size() && l.tokens[i].text == "perimeter") {
                c.perimeter = true;
                ++i;
            }
        } else {
            fail(ErrorCode::UnknownKind, "unknown constraint kind '" + kind + "'", l.number, kt.column);
        }
        expect_end(l, i);
        p.constraints.push_back(c);
    }

    for (const Line& l : preds) {
        OrientationPredicate op;
        const std::string& head = l.tokens[0].text;
        if (head == "side") {
            op.kind = OrientationPredicate::Kind::PointOnSide;
            size_t i = 1;
            while (i < l.tokens.size() && l.tokens[i].text != "left" && l.tokens[i].text != "right" &&
                   l.tokens[i].text != "on")
                op.args.push_back(l.tokens[i++].text);
            if (op.args.size() != 2 && op.args.size() != 3)
                fail(ErrorCode::ParseError, "side takes a point and a line or a point pair", l.number, l.tokens[0].column);
            const Token& s = tok(l, i, "left, right or on");
            op.side = s.text == "left" ? OrientationPredicate::Side::Left
                      : s.text == "right" ? OrientationPredicate::Side::Right
                                          : OrientationPredicate::Side::On;
            expect_end(l, i + 1);
        } else if (head == "chirality") {
            op.kind = OrientationPredicate::Kind::Chirality;
            for (size_t i = 1; i <= 4; ++i) op.args.push_back(tok(l, i, "point").text);
            const Token& s = tok(l, 5, "cw or ccw");
            if (s.text != "cw" && s.text != "ccw") fail(ErrorCode::ParseError, "expected cw or ccw", l.number, s.column);
            op.clockwise = s.text == "cw";
            expect_end(l, 6);
        } else {
            fail(ErrorCode::UnknownKind, "unknown predicate '" + head + "'", l.number, l.tokens[0].column);
        }
        for (size_t i = 0; i < op.args.size(); ++i) kind_of(l, i + 1);
        p.predicates.push_back(op);
    }
    if (p.elements.empty() && p.arcs.empty()) throw Error(ErrorCode::EmptyProblem, "document has no elements");
    return p;
}

GcsProblem parse_problem(const std::string& text) {
    GcsProblem p = expand_compound(parse_document(text));
    auto v = validate(p);
    if (!v.empty()) throw Error(ErrorCode::ParseError, v[0].subject + ": " + v[0].message);
    if (p.linkage && p.constraint_index(*p.linkage) < 0)
        throw Error(ErrorCode::ParseError, "linkage refers to unknown constraint " + *p.linkage);
    return p;
}

std::vector<OrientationPredicate> parse_predicates(const std::string& text, const GcsProblem& problem) {
    GcsProblem bare = problem;
    bare.predicates.clear();
    bare.linkage.reset();
    std::string head = serialize_problem(bare) + "predicates\n";
    int offset = static_cast<int>(std::count(head.begin(), head.end(), '\n'));
    try {
        return parse_document(head + text).predicates;
    } catch (Error& e) {
        if (e.line > offset) e.line -= offset;
        throw;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

GcsProblem load_problem(const std::string& path) { return parse_problem(read_file(path)); }

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string serialize_problem(const GcsProblem& p) {
    std::ostringstream os;
    os << "version 1\nelements\n";
    auto f = format_double;
    for (const Element& e : p.elements) {
        os << kind_name(e.kind) << " " << e.id;
        switch (e.kind) {
            case ElementKind::Point:
                if (e.sketch) os << " at " << f(e.sketch->p.x) << " " << f(e.sketch->p.y);
                break;
            case ElementKind::Line:
                if (e.sketch)
                    os << " normal " << f(e.sketch->line.n.x) << " " << f(e.sketch->line.n.y) << " " << f(e.sketch->line.d);
                break;
            case ElementKind::FixedCircle:
                os << " radius " << f(e.radius);
                if (e.sketch) os << " at " << f(e.sketch->p.x) << " " << f(e.sketch->p.y);
                break;
            case ElementKind::VariableCircle:
                if (e.sketch) os << " at " << f(e.sketch->p.x) << " " << f(e.sketch->p.y) << " " << f(e.sketch->r);
                break;
        }
        os << "\n";
    }
    for (const Arc& a : p.arcs) {
        os << "arc " << a.id << " " << a.start << " " << a.end;
        if (a.sketch_circle)
            os << " center " << f(a.sketch_circle->p.x) << " " << f(a.sketch_circle->p.y) << " " << f(a.sketch_circle->r);
        os << "\n";
    }
    os << "constraints\n";
    for (const Constraint& c : p.constraints) {
        os << c.id << " ";
        switch (c.kind) {
            case ConstraintKind::PointPointDistance:
            case ConstraintKind::PointLineDistance: os << "distance " << c.a << " " << c.b << " " << f(c.value); break;
            case ConstraintKind::LineLineAngle: os << "angle " << c.a << " " << c.b << " " << f(c.value) << "rad"; break;
            case ConstraintKind::PointOnPoint: os << "coincident " << c.a << " " << c.b; break;
            case ConstraintKind::PointOnLine: os << "on " << c.a << " " << c.b; break;
            case ConstraintKind::LineLineParallelDistance: os << "parallel " << c.a << " " << c.b << " " << f(c.value); break;
            case ConstraintKind::TangentLineCircle: os << "tangent " << c.a << " " << c.b << " " << f(c.value); break;
            case ConstraintKind::TangentCircleCircle:
                os << "tangent " << c.a << " " << c.b << " " << f(c.value);
                if (c.tangency == Constraint::Tangency::External) os << " external";
                if (c.tangency == Constraint::Tangency::Internal) os << " internal";
                break;
            case ConstraintKind::CenterDistance:
                os << "center " << c.a << " " << c.b << " " << f(c.value);
                if (c.perimeter) os << " perimeter";
                break;
        }
        os << "\n";
    }
    if (!p.predicates.empty()) {
        os << "predicates\n";
        for (const OrientationPredicate& op : p.predicates) {
            if (op.kind == OrientationPredicate::Kind::PointOnSide) {
                os << "side";
                for (const auto& a : op.args) os << " " << a;
                os << (op.side == OrientationPredicate::Side::Left    ? " left"
                       : op.side == OrientationPredicate::Side::Right ? " right"
                                                                      : " on");
            } else {
                os << "chirality";
                for (const auto& a : op.args) os << " " << a;
                os << (op.clockwise ? " cw" : " ccw");
            }
            os << "\n";
        }
    }
    if (p.linkage) os << "linkage\nfree " << *p.linkage << "\n";
    return os.str();
}

// ---- JSON --------------------------------------------------------------------------------------

nlohmann::json to_json(const GcsProblem& p) {
    using nlohmann::json;
    json j;
    j["version"] = 1;
    j["elements"] = json::array();
    for (const Element& e : p.elements) {
        json je{{"id", e.id}, {"kind", kind_name(e.kind)}};
        if (e.kind == ElementKind::FixedCircle) je["radius"] = e.radius;
        j["elements"].push_back(je);
    }
    j["constraints"] = json::array();
    for (const Constraint& c : p.constraints) {
        json jc{{"id", c.id}, {"kind", kind_name(c.kind)}, {"a", c.a}, {"b", c.b}, {"value", c.value}};
        if (c.perimeter) jc["perimeter"] = true;
        if (c.tangency != Constraint::Tangency::Any)
            jc["tangency"] = c.tangency == Constraint::Tangency::External ? "external" : "internal";
        j["constraints"].push_back(jc);
    }
    if (p.linkage) j["linkage"] = *p.linkage;
    return j;
}

nlohmann::json to_json(const Placement& pl, const GcsProblem& p) {
    nlohmann::json j = nlohmann::json::array();
    for (const Element& e : p.elements) {
        auto it = pl.find(e.id);
        if (it == pl.end()) continue;
        const Pose& q = it->second;
        nlohmann::json je{{"id", e.id}, {"kind", kind_name(e.kind)}};
        if (e.kind == ElementKind::Line) {
            je["nx"] = q.line.n.x;
            je["ny"] = q.line.n.y;
            je["d"] = q.line.d;
        } else {
            je["x"] = q.p.x;
            je["y"] = q.p.y;
            if (is_circle(e.kind)) je["r"] = e.kind == ElementKind::FixedCircle ? e.radius : q.r;
        }
        j.push_back(je);
    }
    return j;
}

nlohmann::json to_json(const ConstructionPlan& plan, const GcsProblem& p) {
    nlohmann::json steps = nlohmann::json::array();
    for (size_t i = 0; i < plan.steps.size(); ++i) {
        const PlanStep& s = plan.steps[i];
        nlohmann::json js{{"index", i}, {"kind", step_kind_name(s.kind)}, {"inputs", s.inputs}, {"outputs", s.outputs},
                          {"multiplicity", s.multiplicity}};
        if (s.kind == StepKind::ConstructThird || s.kind == StepKind::MergeClusters) js["case"] = third_case_name(s.tcase);
        std::vector<std::string> cs;
        for (int c : s.constraints) cs.push_back(p.constraints[static_cast<size_t>(c)].id);
        js["constraints"] = cs;
        steps.push_back(js);
    }
    return {{"steps", steps},
            {"multi_root_steps", plan.multi_root_steps()},
            {"solution_bound", static_cast<double>(plan.solution_bound())}};
}

nlohmann::json to_json(const Classification& c, const ConstraintGraph& g) {
    std::vector<std::string> w;
    for (int v : c.witness) w.push_back(g.ids[static_cast<size_t>(v)]);
    nlohmann::json j{{"verdict", verdict_name(c.verdict)}, {"deficit", c.deficit}, {"witness", w}};
    if (c.budget_limited) j["budget_limited"] = true;
    return j;
}

nlohmann::json error_json(const Error& e) {
    nlohmann::json j{{"code", error_code_name(e.code)}, {"message", e.what()}};
    if (e.step >= 0) j["step"] = e.step;
    if (e.line > 0) {
        j["line"] = e.line;
        j["column"] = e.column;
    }
    return j;
}

// ---- SVG ---------------------------------------------------------------------------------------

namespace {

std::string fx(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

bool clip(Vec2& a, Vec2& b, double x0, double y0, double x1, double y1) {
    double t0 = 0.0, t1 = 1.0;
    Vec2 d = b - a;
    double p[4] = {-d.x, d.x, -d.y, d.y};
    double q[4] = {a.x - x0, x1 - a.x, a.y - y0, y1 - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
            continue;
        }
        double r = q[i] / p[i];
        if (p[i] < 0.0) t0 = std::max(t0, r);
        else t1 = std::min(t1, r);
        if (t0 > t1) return false;
    }
    Vec2 a2 = a + t0 * d, b2 = a + t1 * d;
    a = a2;
    b = b2;
    return true;
}

}  // namespace

std::string render_svg(const Placement& pl, const GcsProblem& p, const SvgOptions& opt) {
    double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x, hi_x = -lo_x, hi_y = -lo_x;
    auto grow = [&](Vec2 v, double r) {
        lo_x = std::min(lo_x, v.x - r);
        hi_x = std::max(hi_x, v.x + r);
        lo_y = std::min(lo_y, v.y - r);
        hi_y = std::max(hi_y, v.y + r);
    };
    for (const Element& e : p.elements) {
        auto it = pl.find(e.id);
        if (it == pl.end()) continue;
        if (e.kind == ElementKind::Line) continue;
        grow(it->second.p, e.kind == ElementKind::FixedCircle ? e.radius : it->second.r);
    }
    for (const Element& e : p.elements) {
        auto it = pl.find(e.id);
        if (it != pl.end() && e.kind == ElementKind::Line && !std::isfinite(lo_x)) grow(it->second.line.anchor(), 1.0);
    }
    if (!std::isfinite(lo_x)) lo_x = lo_y = -1.0, hi_x = hi_y = 1.0;
    double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
    double mx = 0.1 * span;
    double x0 = lo_x - mx, x1 = hi_x + mx, y0 = lo_y - mx, y1 = hi_y + mx;
    double sc = std::min(opt.width / (x1 - x0), opt.height / (y1 - y0));
    auto X = [&](double x) { return fx((x - x0) * sc); };
    auto Y = [&](double y) { return fx((y1 - y) * sc); };

    std::map<std::string, double> resid;
    double diam = diameter(p, pl);
    for (const Constraint& c : p.constraints) {
        if (!pl.count(c.a) || !pl.count(c.b)) continue;
        double r = constraint_residual(p, c, pl);
        if (c.kind != ConstraintKind::LineLineAngle) r /= diam;
        resid[c.id] = r;
    }
    auto anchor = [&](const std::string& id) {
        const Pose& q = pl.at(id);
        if (p.element(id).kind == ElementKind::Line) return q.line.foot({0.5 * (x0 + x1), 0.5 * (y0 + y1)});
        return q.p;
    };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opt.width << "\" height=\""
       << opt.height << "\" viewBox=\"0 0 " << opt.width << " " << opt.height << "\">\n";
    os << "<g id=\"constraints\">\n";
    for (const Constraint& c : p.constraints) {
        auto it = resid.find(c.id);
        if (it == resid.end()) continue;
        bool bad = it->second > opt.tol;
        bool segment = c.kind == ConstraintKind::PointPointDistance ||
                       (c.kind == ConstraintKind::CenterDistance && !c.perimeter);
        if (!segment && !bad) continue;
        Vec2 a = anchor(c.a), b = anchor(c.b);
        os << "<line id=\"" << c.id << "\" x1=\"" << X(a.x) << "\" y1=\"" << Y(a.y) << "\" x2=\"" << X(b.x) << "\" y2=\""
           << Y(b.y) << "\"";
        if (bad) os << " stroke=\"red\" stroke-dasharray=\"4 3\"";
        else os << " stroke=\"gray\"";
        os << "/>\n";
    }
    os << "</g>\n<g id=\"elements\">\n";
    for (const Element& e : p.elements) {
        auto it = pl.find(e.id);
        if (it == pl.end()) continue;
        const Pose& q = it->second;
        if (e.kind == ElementKind::Line) {
            Vec2 f = q.line.foot({0.5 * (x0 + x1), 0.5 * (y0 + y1)});
            double far = 4.0 * (x1 - x0 + y1 - y0);
            Vec2 a = f - far * q.line.direction(), b = f + far * q.line.direction();
            if (!clip(a, b, x0, y0, x1, y1)) continue;
            os << "<line id=\"" << e.id << "\" x1=\"" << X(a.x) << "\" y1=\"" << Y(a.y) << "\" x2=\"" << X(b.x)
               << "\" y2=\"" << Y(b.y) << "\" stroke=\"black\"/>\n";
        } else if (is_circle(e.kind)) {
            double r = e.kind == ElementKind::FixedCircle ? e.radius : q.r;
            os << "<circle id=\"" << e.id << "\" cx=\"" << X(q.p.x) << "\" cy=\"" << Y(q.p.y) << "\" r=\"" << fx(r * sc)
               << "\" fill=\"none\" stroke=\"blue\"/>\n";
        } else {
            os << "<circle id=\"" << e.id << "\" cx=\"" << X(q.p.x) << "\" cy=\"" << Y(q.p.y)
               << "\" r=\"3\" fill=\"black\"/>\n";
            os << "<text x=\"" << fx((q.p.x - x0) * sc + 5.0) << "\" y=\"" << fx((y1 - q.p.y) * sc - 5.0)
               << "\" font-size=\"12\">" << e.id << "</text>\n";
        }
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace gcs
