#include "gcs/construct.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

namespace gcs {

const char* third_case_name(ThirdCase c) {
    switch (c) {
        case ThirdCase::PPtoP: return "pp->p";
        case ThirdCase::PLtoP: return "pL->p";
        case ThirdCase::LLtoP: return "LL->p";
        case ThirdCase::PPtoL: return "pp->L";
        case ThirdCase::PLtoL: return "pL->L";
    }
    return "?";
}

const char* step_kind_name(StepKind k) {
    switch (k) {
        case StepKind::PlaceMinimal: return "PlaceMinimal";
        case StepKind::ConstructThird: return "ConstructThird";
        case StepKind::MergeClusters: return "MergeClusters";
        case StepKind::VarCircleSequential: return "VarCircleSequential";
        case StepKind::VarCircleMerge: return "VarCircleMerge";
    }
    return "?";
}

ThirdCase third_case(ElementKind a, ElementKind b, ElementKind target) {
    bool pa = point_like(a), pb = point_like(b);
    if (a == ElementKind::VariableCircle || b == ElementKind::VariableCircle ||
        target == ElementKind::VariableCircle)
        throw Error(ErrorCode::PlanError, "variable-radius circles are not built by ConstructThird");
    bool to_point = point_like(target);
    if (pa && pb) return to_point ? ThirdCase::PPtoP : ThirdCase::PPtoL;
    if (pa || pb) return to_point ? ThirdCase::PLtoP : ThirdCase::PLtoL;
    if (to_point) return ThirdCase::LLtoP;
    throw Error(ErrorCode::PlanError, "(L,L)->L is under-constrained");
}

int third_multiplicity(ThirdCase c, ElementKind ka, const Relation& ra, ElementKind kb, const Relation& rb) {
    int nz = (ra.value != 0.0 ? 1 : 0) + (rb.value != 0.0 ? 1 : 0);
    double h = ka == ElementKind::Line ? ra.value : rb.value;
    double p = kb == ElementKind::Line ? ra.value : rb.value;
    switch (c) {
        case ThirdCase::PPtoP: return 2;
        case ThirdCase::PLtoP: return h == 0.0 ? 2 : 4;
        case ThirdCase::LLtoP:
        case ThirdCase::PPtoL: return 1 << nz;
        case ThirdCase::PLtoL: return p == 0.0 ? 1 : 2;
    }
    return 1;
}

namespace {

double snap_sq(double v, double scale2) { return std::fabs(v) <= 1e-12 * scale2 ? 0.0 : v; }

std::vector<double> offsets(double h) {
    if (h == 0.0) return {0.0};
    return {h, -h};
}

Pose point_pose(Vec2 p) {
    Pose q;
    q.p = p;
    return q;
}

Pose line_pose(const Line2& l) {
    Pose q;
    q.line = l;
    return q;
}

}  // namespace

Placement place_minimal(const std::string& a, ElementKind ka, const std::string& b, ElementKind kb,
                        const Relation& rel) {
    Placement out;
    bool la = ka == ElementKind::Line, lb = kb == ElementKind::Line;
    if (!la && !lb) {
        if (!(rel.value > 0.0)) throw Error(ErrorCode::DegenerateMinimal, "point-point distance must be positive");
        out[a] = point_pose({0.0, 0.0});
        out[b] = point_pose({rel.value, 0.0});
    } else if (la != lb) {
        if (rel.value < 0.0) throw Error(ErrorCode::DegenerateMinimal, "negative point-line distance");
        const std::string& line = la ? a : b;
        const std::string& pt = la ? b : a;
        out[line] = line_pose(Line2{{0.0, 1.0}, 0.0});
        out[pt] = point_pose({0.0, rel.value});
    } else {
        if (angle_gap_mod_pi(rel.value, 0.0) <= 1e-12)
            throw Error(ErrorCode::DegenerateMinimal, "parallel lines do not fix a frame");
        Line2 l1{{0.0, 1.0}, 0.0};
        Line2 l2{rotate(l1.n, std::cos(rel.value), std::sin(rel.value)), 0.0};
        out[a] = line_pose(l1);
        out[b] = line_pose(l2);
    }
    return out;
}

std::vector<std::optional<Pose>> construct_third_roots(ThirdCase c, const Input& a_in, const Input& b_in) {
    Input a = a_in, b = b_in;
    if ((c == ThirdCase::PLtoP || c == ThirdCase::PLtoL) && a.kind == ElementKind::Line) std::swap(a, b);
    std::vector<std::optional<Pose>> out;
    switch (c) {
        case ThirdCase::PPtoP: {
            Vec2 A = a.pose.p, B = b.pose.p;
            double ra = a.rel.value, rb = b.rel.value;
            double D = norm(B - A);
            if (D == 0.0) return {std::nullopt, std::nullopt};
            Vec2 e = (1.0 / D) * (B - A);
            double x = (ra * ra - rb * rb + D * D) / (2.0 * D);
            double h2 = snap_sq(ra * ra - x * x, std::max({ra * ra, rb * rb, D * D}));
            if (h2 < 0.0) return {std::nullopt, std::nullopt};
            double h = std::sqrt(h2);
            out.push_back(point_pose(A + x * e + h * perp(e)));
            out.push_back(point_pose(A + x * e - h * perp(e)));
            return out;
        }
        case ThirdCase::PLtoP: {
            Vec2 P = a.pose.p;
            double r = a.rel.value;
            const Line2& L = b.pose.line;
            for (double off : offsets(b.rel.value)) {
                double s = L.signed_distance(P) - off;
                double w2 = snap_sq(r * r - s * s, std::max(r * r, s * s));
                if (w2 < 0.0) {
                    out.push_back(std::nullopt);
                    out.push_back(std::nullopt);
                    continue;
                }
                double w = std::sqrt(w2);
                Vec2 f = P - s * L.n;
                out.push_back(point_pose(f + w * L.direction()));
                out.push_back(point_pose(f - w * L.direction()));
            }
            return out;
        }
        case ThirdCase::LLtoP: {
            const Line2& L1 = a.pose.line;
            const Line2& L2 = b.pose.line;
            for (double o1 : offsets(a.rel.value))
                for (double o2 : offsets(b.rel.value)) {
                    Vec2 x;
                    if (line_intersection(Line2{L1.n, L1.d + o1}, Line2{L2.n, L2.d + o2}, x))
                        out.push_back(point_pose(x));
                    else
                        out.push_back(std::nullopt);
                }
            return out;
        }
        case ThirdCase::PPtoL: {
            Vec2 A = a.pose.p, B = b.pose.p;
            double ha = a.rel.value, hb = b.rel.value;
            double D = norm(B - A);
            for (double sa : offsets(ha))
                for (double sb : offsets(hb)) {
                    if (D == 0.0) {
                        out.push_back(std::nullopt);
                        continue;
                    }
                    Vec2 e = (1.0 / D) * (B - A);
                    double k = (sb - sa) / D;
                    double beta2 = snap_sq(1.0 - k * k, 1.0);
                    if (beta2 < 0.0) {
                        out.push_back(std::nullopt);
                        continue;
                    }
                    Vec2 n = k * e + std::sqrt(beta2) * perp(e);
                    n = (1.0 / norm(n)) * n;
                    out.push_back(line_pose(Line2{n, dot(n, A) - sa}));
                }
            return out;
        }
        case ThirdCase::PLtoL: {
            Vec2 P = a.pose.p;
            const Line2& L = b.pose.line;
            double t = b.rel.value;
            Vec2 n = rotate(L.n, std::cos(t), std::sin(t));
            for (double off : offsets(a.rel.value)) out.push_back(line_pose(Line2{n, dot(n, P) - off}));
            return out;
        }
    }
    return out;
}

Pose construct_third(ThirdCase c, const Input& a, const Input& b, int choice) {
    auto roots = construct_third_roots(c, a, b);
    bool any = std::any_of(roots.begin(), roots.end(), [](const auto& r) { return r.has_value(); });
    if (!any) throw Error(ErrorCode::Infeasible, std::string("no real root for ") + third_case_name(c));
    if (choice < 0 || choice >= static_cast<int>(roots.size()) || !roots[static_cast<size_t>(choice)])
        throw Error(ErrorCode::TagUnavailable, "requested root is not real");
    return *roots[static_cast<size_t>(choice)];
}

// ---- matching ----------------------------------------------------------------------------------

namespace {

Rigid rotation_between(Vec2 from, Vec2 to) {
    double nf = norm(from), nt = norm(to);
    if (nf == 0.0 || nt == 0.0) return Rigid{};
    double c = dot(from, to) / (nf * nt), s = cross(from, to) / (nf * nt);
    double h = std::hypot(c, s);
    return Rigid{c / h, s / h, {}};
}

Rigid with_translation(Rigid r, Vec2 from, Vec2 to) {
    r.t = to - rotate(from, r.c, r.s);
    return r;
}

}  // namespace

int match_arity(ElementKind ka, ElementKind kb, bool incident) {
    bool la = ka == ElementKind::Line, lb = kb == ElementKind::Line;
    if (la && lb) return 2;
    if (la || lb) return incident ? 2 : 1;
    return 1;
}

std::vector<Rigid> rigid_matches(ElementKind ka, const Pose& fa, const Pose& ma, ElementKind kb, const Pose& fb,
                                 const Pose& mb, double tol) {
    bool la = ka == ElementKind::Line, lb = kb == ElementKind::Line;
    std::vector<Rigid> out;
    if (!la && !lb) {
        Vec2 m = mb.p - ma.p, f = fb.p - fa.p;
        if (std::fabs(norm(m) - norm(f)) > tol) return out;
        out.push_back(with_translation(rotation_between(m, f), ma.p, fa.p));
        return out;
    }
    if (la != lb) {
        const Pose& fp = la ? fb : fa;
        const Pose& mp = la ? mb : ma;
        const Pose& fl = la ? fa : fb;
        const Pose& ml = la ? ma : mb;
        double hm = ml.line.signed_distance(mp.p), hf = fl.line.signed_distance(fp.p);
        if (std::fabs(std::fabs(hm) - std::fabs(hf)) > tol) return out;
        for (int s : {1, -1}) {
            bool incident = std::fabs(hm) <= tol;
            if (!incident && (hm * hf * s) < 0.0) continue;
            Rigid r = rotation_between(ml.line.n, s * fl.line.n);
            out.push_back(with_translation(r, mp.p, fp.p));
        }
        return out;
    }
    double am = line_angle(ma.line, mb.line), af = line_angle(fa.line, fb.line);
    if (angle_gap_mod_pi(am, af) > tol) return out;
    Vec2 xm, xf;
    if (!line_intersection(ma.line, mb.line, xm) || !line_intersection(fa.line, fb.line, xf)) return out;
    for (int s : {1, -1}) {
        Rigid r = rotation_between(ma.line.n, s * fa.line.n);
        out.push_back(with_translation(r, xm, xf));
    }
    return out;
}

Placement transform(const GcsProblem& problem, const Placement& p, const Rigid& m) {
    Placement out;
    for (const auto& [id, pose] : p) {
        Pose q = pose;
        int i = problem.element_index(id);
        if (i >= 0 && problem.elements[static_cast<size_t>(i)].kind == ElementKind::Line) q.line = m.apply(pose.line);
        else q.p = m.apply(pose.p);
        out[id] = q;
    }
    return out;
}

double placement_gap(const GcsProblem& problem, const Placement& a, const Placement& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double s = std::max(1.0, diameter(problem, a));
    double gap = 0.0;
    for (const auto& [id, pa] : a) {
        auto it = b.find(id);
        if (it == b.end()) return std::numeric_limits<double>::infinity();
        const Pose& pb = it->second;
        switch (problem.element(id).kind) {
            case ElementKind::Line: {
                double same = std::max(s * norm(pa.line.n - pb.line.n), std::fabs(pa.line.d - pb.line.d));
                double flip = std::max(s * norm(pa.line.n + pb.line.n), std::fabs(pa.line.d + pb.line.d));
                gap = std::max(gap, std::min(same, flip));
                break;
            }
            case ElementKind::Point: gap = std::max(gap, norm(pa.p - pb.p)); break;
            default: gap = std::max({gap, norm(pa.p - pb.p), std::fabs(pa.r - pb.r)});
        }
    }
    return gap;
}

namespace {

std::vector<Vec2> alignment_features(const GcsProblem& problem, const Placement& pl) {
    std::vector<Vec2> pts;
    std::vector<Line2> lines;
    for (const Element& e : problem.elements) {
        auto it = pl.find(e.id);
        if (it == pl.end()) continue;
        if (e.kind == ElementKind::Line) lines.push_back(it->second.line);
        else pts.push_back(it->second.p);
    }
    if (!pts.empty()) {
        Vec2 c{};
        for (Vec2 p : pts) c = c + p;
        c = (1.0 / static_cast<double>(pts.size())) * c;
        for (const Line2& l : lines) pts.push_back(l.foot(c));
    } else {
        for (size_t i = 0; i < lines.size(); ++i)
            for (size_t j = i + 1; j < lines.size(); ++j) {
                Vec2 x;
                if (line_intersection(lines[i], lines[j], x)) pts.push_back(x);
            }
    }
    return pts;
}

}  // namespace

Rigid best_alignment(const GcsProblem& problem, const Placement& a, const Placement& b) {
    std::vector<Vec2> fa = alignment_features(problem, a), fb = alignment_features(problem, b);
    if (fa.empty() || fa.size() != fb.size()) return {};
    Vec2 ca{}, cb{};
    for (size_t i = 0; i < fa.size(); ++i) {
        ca = ca + fa[i];
        cb = cb + fb[i];
    }
    double inv = 1.0 / static_cast<double>(fa.size());
    ca = inv * ca;
    cb = inv * cb;
    double sc = 0.0, ss = 0.0;
    for (size_t i = 0; i < fa.size(); ++i) {
        Vec2 u = fa[i] - ca, v = fb[i] - cb;
        sc += dot(u, v);
        ss += cross(u, v);
    }
    double th = std::atan2(ss, sc);
    Rigid r = Rigid::rotation(th);
    r.t = cb - r.apply(ca);
    return r;
}

double congruence_gap(const GcsProblem& problem, const Placement& a, const Placement& b) {
    return placement_gap(problem, transform(problem, a, best_alignment(problem, a, b)), b);
}

Placement merge_clusters(const GcsProblem& problem, const Placement& fixed, const Placement& moving,
                         const std::array<std::string, 2>& shared, int flip) {
    for (const auto& s : shared)
        if (!fixed.count(s) || !moving.count(s))
            throw Error(ErrorCode::PlanError, "shared element " + s + " missing from a cluster");
    ElementKind ka = problem.element(shared[0]).kind, kb = problem.element(shared[1]).kind;
    Placement both = fixed;
    for (const auto& kv : moving) both.insert(kv);
    double tol = 1e-9 * std::max(1.0, diameter(problem, both));
    auto ms = rigid_matches(ka, fixed.at(shared[0]), moving.at(shared[0]), kb, fixed.at(shared[1]),
                            moving.at(shared[1]), tol);
    if (ms.empty()) throw Error(ErrorCode::MergeIncongruent, "shared elements are not congruent in both clusters");
    Rigid m = ms[static_cast<size_t>(flip) % ms.size()];
    Placement out = fixed;
    for (const auto& [id, pose] : transform(problem, moving, m))
        if (!out.count(id)) out[id] = pose;
    return out;
}

// ---- plans -------------------------------------------------------------------------------------

std::vector<int> ConstructionPlan::multi_root_steps() const {
    std::vector<int> out;
    for (size_t i = 0; i < steps.size(); ++i)
        if (steps[i].multiplicity > 1) out.push_back(static_cast<int>(i));
    return out;
}

long double ConstructionPlan::solution_bound() const {
    long double b = 1.0L;
    for (const PlanStep& s : steps) b *= static_cast<long double>(s.multiplicity);
    return b;
}

std::vector<int> step_choices(const ConstructionPlan& plan, const SignVector& signs) {
    std::vector<int> out(plan.steps.size(), 0);
    size_t j = 0;
    for (size_t i = 0; i < plan.steps.size(); ++i) {
        if (plan.steps[i].multiplicity <= 1) continue;
        if (j >= signs.size()) throw Error(ErrorCode::PlanError, "sign vector shorter than the multi-root step count");
        int c = signs[j++];
        if (c < 0 || c >= plan.steps[i].multiplicity)
            throw Error(ErrorCode::PlanError, "sign choice out of range", static_cast<int>(i));
        out[i] = c;
    }
    if (j != signs.size()) throw Error(ErrorCode::PlanError, "sign vector longer than the multi-root step count");
    return out;
}

namespace {

Relation measure(ElementKind ka, const Pose& a, ElementKind kb, const Pose& b, bool forced_zero) {
    Relation r;
    bool la = ka == ElementKind::Line, lb = kb == ElementKind::Line;
    if (la && lb) {
        r.angle = true;
        r.value = line_angle(a.line, b.line);
        return r;
    }
    if (forced_zero) return r;
    if (la) r.value = std::fabs(a.line.signed_distance(b.p));
    else if (lb) r.value = std::fabs(b.line.signed_distance(a.p));
    else r.value = norm(a.p - b.p);
    // Keep the generic slot layout even if the measured value happens to vanish.
    if (r.value == 0.0) r.value = DBL_MIN;
    return r;
}

Cyclo cyclo_of(const CycloSpec& s, const Pose& p) {
    if (s.line) return Cyclo::of_line(p.line);
    return Cyclo::of_circle(p.p, s.rho);
}

bool tangency_ok(const CycloSpec& s, const Cyclo& o, const Circle& c, double scale) {
    if (s.line || s.tangency == Constraint::Tangency::Any) return true;
    double d = norm(c.c - o.c);
    double ext = std::fabs(d - (c.r + o.rho)), inn = std::fabs(d - std::fabs(c.r - o.rho));
    if (s.tangency == Constraint::Tangency::External) return ext <= 1e-8 * scale;
    return inn <= 1e-8 * scale;
}

void set_radius(const GcsProblem& problem, const std::string& id, Pose& p) {
    int i = problem.element_index(id);
    if (i >= 0 && problem.elements[static_cast<size_t>(i)].kind == ElementKind::FixedCircle)
        p.r = problem.elements[static_cast<size_t>(i)].radius;
}

}  // namespace

bool apply_step(const GcsProblem& problem, const ConstructionPlan& plan, size_t k, int choice, ExecState& st,
                std::string* why) {
    const PlanStep& s = plan.steps[k];
    if (st.clusters.size() < static_cast<size_t>(plan.cluster_count))
        st.clusters.resize(static_cast<size_t>(plan.cluster_count));
    Placement& cl = st.clusters[static_cast<size_t>(s.cluster)];
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    auto kind = [&](const std::string& id) { return problem.element(id).kind; };
    switch (s.kind) {
        case StepKind::PlaceMinimal: {
            cl = place_minimal(s.outputs[0], kind(s.outputs[0]), s.outputs[1], kind(s.outputs[1]), s.rel[0]);
            for (auto& [id, p] : cl) set_radius(problem, id, p);
            return true;
        }
        case StepKind::ConstructThird: {
            Input a{kind(s.inputs[0]), cl.at(s.inputs[0]), s.rel[0]};
            Input b{kind(s.inputs[1]), cl.at(s.inputs[1]), s.rel[1]};
            if (!s.rel_radius[0].empty()) a.rel.value += cl.at(s.rel_radius[0]).r;
            if (!s.rel_radius[1].empty()) b.rel.value += cl.at(s.rel_radius[1]).r;
            auto roots = construct_third_roots(s.tcase, a, b);
            if (choice >= static_cast<int>(roots.size()) || !roots[static_cast<size_t>(choice)])
                return fail(std::string("no real root for ") + third_case_name(s.tcase) + " placing " + s.outputs[0]);
            Pose p = *roots[static_cast<size_t>(choice)];
            set_radius(problem, s.outputs[0], p);
            cl[s.outputs[0]] = p;
            return true;
        }
        case StepKind::MergeClusters: {
            Placement& c1 = st.clusters[static_cast<size_t>(s.sources[0])];
            Placement& c2 = st.clusters[static_cast<size_t>(s.sources[1])];
            const std::string &u = s.shared[0], &v = s.shared[1], &w = s.shared[2];
            Relation ruv = measure(kind(u), c1.at(u), kind(v), c1.at(v), s.shared_incident[0]);
            Relation rwv = measure(kind(w), c2.at(w), kind(v), c2.at(v), s.shared_incident[1]);
            int f2 = choice % s.flip_arity[1];
            int rest = choice / s.flip_arity[1];
            int f1 = rest % s.flip_arity[0];
            int ci = rest / s.flip_arity[0];
            Input a{kind(u), cl.at(u), ruv};
            Input b{kind(w), cl.at(w), rwv};
            auto roots = construct_third_roots(s.tcase, a, b);
            if (ci >= static_cast<int>(roots.size()) || !roots[static_cast<size_t>(ci)])
                return fail("shared element " + v + " has no real placement");
            Pose pv = *roots[static_cast<size_t>(ci)];
            set_radius(problem, v, pv);
            cl[v] = pv;
            Placement all = cl;
            for (const auto& kv : c1) all.insert(kv);
            for (const auto& kv : c2) all.insert(kv);
            double tol = 1e-7 * std::max(1.0, diameter(problem, all));
            auto m1 = rigid_matches(kind(u), cl.at(u), c1.at(u), kind(v), cl.at(v), c1.at(v), tol);
            auto m2 = rigid_matches(kind(v), cl.at(v), c2.at(v), kind(w), cl.at(w), c2.at(w), tol);
            if (m1.empty() || m2.empty()) return fail("sub-clusters are incongruent on their shared elements");
            Rigid r1 = m1[static_cast<size_t>(f1) % m1.size()];
            Rigid r2 = m2[static_cast<size_t>(f2) % m2.size()];
            if (static_cast<int>(m1.size()) < s.flip_arity[0] && f1 >= static_cast<int>(m1.size()))
                return fail("match orientation unavailable");
            if (static_cast<int>(m2.size()) < s.flip_arity[1] && f2 >= static_cast<int>(m2.size()))
                return fail("match orientation unavailable");
            for (const auto& [id, p] : transform(problem, c1, r1))
                if (!cl.count(id)) cl[id] = p;
            for (const auto& [id, p] : transform(problem, c2, r2))
                if (!cl.count(id)) cl[id] = p;
            c1.clear();
            c2.clear();
            return true;
        }
        case StepKind::VarCircleSequential: {
            std::array<Cyclo, 3> objs;
            for (size_t i = 0; i < 3; ++i) objs[i] = cyclo_of(s.cyclo[i], cl.at(s.cyclo[i].element));
            auto slots = vcircle_sequential_slots(objs);
            if (choice >= static_cast<int>(slots.size()) || !slots[static_cast<size_t>(choice)])
                return fail("no real circle for " + s.outputs[0] + " in this orientation");
            const Circle& c = *slots[static_cast<size_t>(choice)];
            double scale = std::max(1.0, diameter(problem, cl));
            for (size_t i = 0; i < 3; ++i)
                if (!tangency_ok(s.cyclo[i], objs[i], c, scale)) return fail("tangency type differs from the constraint");
            Pose p;
            p.p = c.c;
            p.r = c.r;
            cl[s.outputs[0]] = p;
            return true;
        }
        case StepKind::VarCircleMerge: {
            Placement& c2 = st.clusters[static_cast<size_t>(s.sources[0])];
            const std::string& e0 = s.shared[0];
            bool e0_line = kind(e0) == ElementKind::Line;
            auto e0c = [&](const Pose& p) {
                return e0_line ? Cyclo::of_line(p.line) : Cyclo::of_circle(p.p, p.r);
            };
            std::array<Cyclo, 2> f{cyclo_of(s.cyclo[0], cl.at(s.cyclo[0].element)),
                                   cyclo_of(s.cyclo[1], cl.at(s.cyclo[1].element))};
            std::array<Cyclo, 2> m{cyclo_of(s.cyclo[2], c2.at(s.cyclo[2].element)),
                                   cyclo_of(s.cyclo[3], c2.at(s.cyclo[3].element))};
            MergeResult res;
            try {
                res = vcircle_merge(f, m, e0c(cl.at(e0)), e0c(c2.at(e0)));
            } catch (const Error& e) {
                return fail(e.what());
            }
            if (choice >= static_cast<int>(res.slots.size()) || !res.slots[static_cast<size_t>(choice)])
                return fail("no real merge root for " + s.outputs[0] + " in this slot");
            const MergeSolution& sol = *res.slots[static_cast<size_t>(choice)];
            Placement moved = transform(problem, c2, sol.motion);
            double scale = std::max(1.0, diameter(problem, cl));
            std::array<Cyclo, 4> placed{f[0], f[1], cyclo_of(s.cyclo[2], moved.at(s.cyclo[2].element)),
                                        cyclo_of(s.cyclo[3], moved.at(s.cyclo[3].element))};
            for (size_t i = 0; i < 4; ++i)
                if (!tangency_ok(s.cyclo[i], placed[i], sol.circle, scale))
                    return fail("tangency type differs from the constraint");
            for (const auto& [id, p] : moved)
                if (!cl.count(id)) cl[id] = p;
            Pose p;
            p.p = sol.circle.c;
            p.r = sol.circle.r;
            cl[s.outputs[0]] = p;
            c2.clear();
            return true;
        }
    }
    return false;
}

Placement collect(const ConstructionPlan& plan, const ExecState& st) {
    Placement out;
    if (static_cast<size_t>(plan.final_cluster) < st.clusters.size())
        out = st.clusters[static_cast<size_t>(plan.final_cluster)];
    for (const Placement& c : st.clusters)
        for (const auto& kv : c) out.insert(kv);
    return out;
}

ExecResult execute_plan(const ConstructionPlan& plan, const GcsProblem& problem, const SignVector& signs) {
    std::vector<int> choices = step_choices(plan, signs);
    ExecState st;
    st.clusters.resize(static_cast<size_t>(plan.cluster_count));
    ExecResult r;
    for (size_t k = 0; k < plan.steps.size(); ++k) {
        std::string why;
        bool ok = false;
        try {
            ok = apply_step(problem, plan, k, choices[k], st, &why);
        } catch (const Error& e) {
            why = e.what();
        }
        if (!ok) {
            r.ok = false;
            r.failed_step = static_cast<int>(k);
            r.message = why;
            r.placement = collect(plan, st);
            return r;
        }
    }
    r.placement = collect(plan, st);
    return r;
}

// ---- residuals ---------------------------------------------------------------------------------

double diameter(const GcsProblem& problem, const Placement& placement) {
    double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x, hi_x = -lo_x, hi_y = -lo_x;
    double d = 0.0;
    bool any = false;
    for (const auto& [id, p] : placement) {
        int i = problem.element_index(id);
        if (i < 0 || problem.elements[static_cast<size_t>(i)].kind == ElementKind::Line) continue;
        lo_x = std::min(lo_x, p.p.x);
        hi_x = std::max(hi_x, p.p.x);
        lo_y = std::min(lo_y, p.p.y);
        hi_y = std::max(hi_y, p.p.y);
        d = std::max(d, p.r);
        any = true;
    }
    if (any) d = std::max(d, std::hypot(hi_x - lo_x, hi_y - lo_y));
    for (const Constraint& c : problem.constraints)
        if (c.kind != ConstraintKind::LineLineAngle) d = std::max(d, std::fabs(c.value));
    for (const Element& e : problem.elements) d = std::max(d, e.radius);
    return d > 0.0 ? d : 1.0;
}

double constraint_residual(const GcsProblem& problem, const Constraint& c, const Placement& pl) {
    const Pose& a = pl.at(c.a);
    const Pose& b = pl.at(c.b);
    auto radius = [&](const std::string& id, const Pose& p) {
        const Element& e = problem.element(id);
        return e.kind == ElementKind::FixedCircle ? e.radius : p.r;
    };
    switch (c.kind) {
        case ConstraintKind::PointPointDistance: return std::fabs(norm(a.p - b.p) - c.value);
        case ConstraintKind::PointLineDistance: return std::fabs(std::fabs(b.line.signed_distance(a.p)) - c.value);
        case ConstraintKind::LineLineAngle: return angle_gap_mod_pi(line_angle(a.line, b.line), c.value);
        case ConstraintKind::PointOnPoint: return norm(a.p - b.p);
        case ConstraintKind::PointOnLine: return std::fabs(b.line.signed_distance(a.p));
        case ConstraintKind::LineLineParallelDistance:
            return angle_gap_mod_pi(line_angle(a.line, b.line), 0.0) +
                   std::fabs(std::fabs(a.line.signed_distance(b.line.anchor())) - c.value);
        case ConstraintKind::TangentLineCircle:
            return std::fabs(std::fabs(a.line.signed_distance(b.p)) - (radius(c.b, b) + c.value));
        case ConstraintKind::TangentCircleCircle: {
            double d = norm(a.p - b.p), ra = radius(c.a, a), rb = radius(c.b, b);
            double ext = std::fabs(d - (ra + rb)), inn = std::fabs(d - std::fabs(ra - rb));
            if (c.tangency == Constraint::Tangency::External) return ext;
            if (c.tangency == Constraint::Tangency::Internal) return inn;
            return std::min(ext, inn);
        }
        case ConstraintKind::CenterDistance: {
            double d = norm(a.p - b.p);
            if (!c.perimeter) return std::fabs(d - c.value);
            double rb = radius(c.b, b), v = std::fabs(c.value);
            if (v == 0.0) return std::fabs(d - rb);
            return std::min(std::fabs(d - (rb + v)), std::fabs(d - std::fabs(rb - v)));
        }
    }
    return 0.0;
}

std::vector<Residual> residuals(const GcsProblem& problem, const Placement& placement) {
    std::vector<Residual> out;
    double diam = diameter(problem, placement);
    for (const Constraint& c : problem.constraints) {
        if (!placement.count(c.a) || !placement.count(c.b)) continue;
        double r = constraint_residual(problem, c, placement);
        if (c.kind != ConstraintKind::LineLineAngle) r /= diam;
        out.push_back({c.id, r});
    }
    return out;
}

double max_residual(const GcsProblem& problem, const Placement& placement) {
    double m = 0.0;
    for (const Residual& r : residuals(problem, placement)) m = std::max(m, r.value);
    return m;
}

}  // namespace gcs
