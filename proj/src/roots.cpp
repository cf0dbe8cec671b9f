#include "gcs/roots.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

namespace gcs {

SignVector parse_signs(const std::string& text, const ConstructionPlan& plan) {
    std::vector<int> multi = plan.multi_root_steps();
    SignVector out;
    size_t i = 0;
    while (i < text.size()) {
        char ch = text[i];
        int v;
        if (ch == '+') v = 0, ++i;
        else if (ch == '-') v = 1, ++i;
        else if (ch >= 'a' && ch <= 'z') v = ch - 'a', ++i;
        else if (ch == '{') {
            size_t j = text.find('}', i);
            if (j == std::string::npos) throw Error(ErrorCode::ParseError, "unterminated '{' in sign string");
            try {
                v = std::stoi(text.substr(i + 1, j - i - 1));
            } catch (...) {
                throw Error(ErrorCode::ParseError, "bad index in sign string");
            }
            i = j + 1;
        } else if (ch == ' ' || ch == ',') {
            ++i;
            continue;
        } else {
            throw Error(ErrorCode::ParseError, std::string("bad sign character '") + ch + "'");
        }
        out.push_back(v);
    }
    if (out.size() != multi.size())
        throw Error(ErrorCode::ParseError, "sign string has " + std::to_string(out.size()) + " entries, plan has " +
                                               std::to_string(multi.size()) + " multi-root steps");
    for (size_t k = 0; k < out.size(); ++k) {
        int m = plan.steps[static_cast<size_t>(multi[k])].multiplicity;
        if (out[k] < 0 || out[k] >= m)
            throw Error(ErrorCode::BadStep, "choice out of range at step " + std::to_string(multi[k]), multi[k]);
    }
    return out;
}

std::string format_signs(const SignVector& signs, const ConstructionPlan& plan) {
    std::vector<int> multi = plan.multi_root_steps();
    std::string s;
    for (size_t k = 0; k < signs.size() && k < multi.size(); ++k) {
        int m = plan.steps[static_cast<size_t>(multi[k])].multiplicity;
        int v = signs[k];
        if (m == 2) s += v == 0 ? '+' : '-';
        else if (v < 26) s += static_cast<char>('a' + v);
        else s += "{" + std::to_string(v) + "}";
    }
    return s;
}

// ---- predicates --------------------------------------------------------------------------------

bool evaluate(const OrientationPredicate& pred, const Placement& pl, const GcsProblem& problem) {
    double scale = diameter(problem, pl);
    auto pt = [&](const std::string& id) { return pl.at(id).p; };
    if (pred.kind == OrientationPredicate::Kind::PointOnSide) {
        double s;
        if (pred.args.size() == 2) s = pl.at(pred.args[1]).line.signed_distance(pt(pred.args[0])) * scale;
        else s = orient(pt(pred.args[1]), pt(pred.args[2]), pt(pred.args[0]));
        bool on = std::fabs(s) <= 1e-9 * scale * scale;
        switch (pred.side) {
            case OrientationPredicate::Side::On: return on;
            case OrientationPredicate::Side::Left: return !on && s > 0;
            case OrientationPredicate::Side::Right: return !on && s < 0;
        }
        return false;
    }
    Vec2 a = pt(pred.args[0]), b = pt(pred.args[1]), c = pt(pred.args[2]), d = pt(pred.args[3]);
    double x = cross(b - a, d - c);
    if (std::fabs(x) <= 1e-9 * scale * scale) return false;
    return pred.clockwise ? x < 0 : x > 0;
}

bool satisfies_all(const std::vector<OrientationPredicate>& preds, const Placement& pl, const GcsProblem& problem) {
    return std::all_of(preds.begin(), preds.end(), [&](const OrientationPredicate& p) { return evaluate(p, pl, problem); });
}

// ---- enumeration -------------------------------------------------------------------------------

EnumerateResult enumerate(const ConstructionPlan& plan, const GcsProblem& problem, size_t limit,
                          const std::vector<OrientationPredicate>& predicates) {
    EnumerateResult r;
    r.step_executions.assign(plan.steps.size(), 0);
    if (limit == 0) limit = 1;
    std::vector<int> choices(plan.steps.size(), 0);
    bool stopped = false;
    std::function<void(size_t, const ExecState&)> dfs = [&](size_t k, const ExecState& st) {
        if (stopped) return;
        if (k == plan.steps.size()) {
            Placement pl = collect(plan, st);
            if (!satisfies_all(predicates, pl, problem)) {
                ++r.filtered;
                return;
            }
            SignVector sv;
            for (int s : plan.multi_root_steps()) sv.push_back(choices[static_cast<size_t>(s)]);
            r.signs.push_back(sv);
            r.placements.push_back(std::move(pl));
            if (r.placements.size() >= limit) stopped = true;
            return;
        }
        int m = plan.steps[k].multiplicity;
        for (int c = 0; c < m && !stopped; ++c) {
            ExecState next = st;
            bool ok = false;
            ++r.step_executions[k];
            try {
                ok = apply_step(problem, plan, k, c, next);
            } catch (const Error&) {
                ok = false;
            }
            if (!ok) {
                ++r.infeasible_branches;
                continue;
            }
            choices[k] = c;
            dfs(k + 1, next);
        }
    };
    ExecState st;
    st.clusters.resize(static_cast<size_t>(plan.cluster_count));
    dfs(0, st);
    r.exhausted = !stopped;
    return r;
}

// ---- heuristic ---------------------------------------------------------------------------------

namespace {

// Similarity-invariant features of a set of placed elements: points, line intersections,
// and feet of points on lines.
std::vector<Vec2> features(const GcsProblem& problem, const std::vector<std::string>& ids,
                           const std::function<const Pose&(const std::string&)>& pose) {
    std::vector<Vec2> pts;
    std::vector<Line2> lines;
    for (const auto& id : ids) {
        ElementKind k = problem.element(id).kind;
        if (k == ElementKind::Line) lines.push_back(pose(id).line);
        else pts.push_back(pose(id).p);
    }
    std::vector<Vec2> out = pts;
    for (size_t i = 0; i < lines.size(); ++i)
        for (size_t j = i + 1; j < lines.size(); ++j) {
            Vec2 x;
            if (line_intersection(lines[i], lines[j], x)) out.push_back(x);
        }
    for (const Line2& l : lines)
        for (Vec2 p : pts) out.push_back(l.foot(p));
    return out;
}

// Residual of the best proper similarity carrying a onto b, relative to b's spread.
double similarity_misfit(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    using C = std::complex<double>;
    size_t n = a.size();
    if (n == 0 || n != b.size()) return 0.0;
    C ca{}, cb{};
    for (size_t i = 0; i < n; ++i) {
        ca += C(a[i].x, a[i].y);
        cb += C(b[i].x, b[i].y);
    }
    ca /= static_cast<double>(n);
    cb /= static_cast<double>(n);
    C num{};
    double den = 0.0, spread = 0.0;
    for (size_t i = 0; i < n; ++i) {
        C x = C(a[i].x, a[i].y) - ca, y = C(b[i].x, b[i].y) - cb;
        num += y * std::conj(x);
        den += std::norm(x);
        spread += std::norm(y);
    }
    if (den == 0.0 || spread == 0.0) return 0.0;
    C z = num / den;
    double err = 0.0;
    for (size_t i = 0; i < n; ++i) {
        C x = C(a[i].x, a[i].y) - ca, y = C(b[i].x, b[i].y) - cb;
        err += std::norm(y - z * x);
    }
    return std::sqrt(err / spread);
}

// Tangency types of a variable circle against its constraining objects: external vs internal
// for circles/points, side of the center for lines.
std::vector<int> tangency_types(const PlanStep& s, const std::function<const Pose&(const std::string&)>& pose,
                                const Pose& vc) {
    std::vector<int> out;
    for (const CycloSpec& c : s.cyclo) {
        const Pose& o = pose(c.element);
        if (c.line) {
            out.push_back(o.line.signed_distance(vc.p) >= 0 ? 1 : -1);
        } else {
            double d = norm(vc.p - o.p);
            out.push_back(std::fabs(d - (vc.r + c.rho)) <= std::fabs(d - std::fabs(vc.r - c.rho)) ? 1 : -1);
        }
    }
    return out;
}

}  // namespace

HeuristicResult heuristic_signs(const ConstructionPlan& plan, const GcsProblem& problem) {
    if (!problem.has_sketch()) throw Error(ErrorCode::SketchRequired, "every element needs a sketch pose");
    HeuristicResult r;
    ExecState st;
    st.clusters.resize(static_cast<size_t>(plan.cluster_count));
    auto sketch = [&](const std::string& id) -> const Pose& { return *problem.element(id).sketch; };
    double scale = 0.0;
    {
        Placement sk;
        for (const Element& e : problem.elements) sk[e.id] = *e.sketch;
        scale = diameter(problem, sk);
    }
    bool dead = false;
    for (size_t k = 0; k < plan.steps.size(); ++k) {
        const PlanStep& s = plan.steps[k];
        int m = s.multiplicity;
        if (dead) {
            if (m > 1) {
                r.signs.push_back(0);
                r.fallback_steps.push_back(static_cast<int>(k));
            }
            continue;
        }
        if (m <= 1) {
            if (!apply_step(problem, plan, k, 0, st)) dead = true;
            continue;
        }
        struct Cand {
            int choice;
            ExecState st;
            double side;  // sidedness agreement (0 good, 1 bad)
            int type_miss;
            double misfit;
        };
        std::vector<Cand> cands;
        for (int c = 0; c < m; ++c) {
            ExecState next = st;
            bool ok = false;
            try {
                ok = apply_step(problem, plan, k, c, next);
            } catch (const Error&) {
            }
            if (!ok) continue;
            const Placement& cl = next.clusters[static_cast<size_t>(s.cluster)];
            auto cur = [&](const std::string& id) -> const Pose& { return cl.at(id); };
            Cand cd{c, next, 0.0, 0, 0.0};
            if (s.kind == StepKind::ConstructThird && s.tcase == ThirdCase::PPtoP) {
                Vec2 a = sketch(s.inputs[0]).p, b = sketch(s.inputs[1]).p, x = sketch(s.outputs[0]).p;
                double o = orient(a, b, x);
                if (std::fabs(o) > 1e-9 * scale * scale) {
                    double oc = orient(cl.at(s.inputs[0]).p, cl.at(s.inputs[1]).p, cl.at(s.outputs[0]).p);
                    cd.side = (o > 0) == (oc > 0) ? 0.0 : 1.0;
                }
            }
            if (s.kind == StepKind::VarCircleSequential || s.kind == StepKind::VarCircleMerge) {
                std::vector<int> want = tangency_types(s, sketch, sketch(s.outputs[0]));
                std::vector<int> got = tangency_types(s, cur, cl.at(s.outputs[0]));
                for (size_t i = 0; i < want.size(); ++i) cd.type_miss += want[i] != got[i];
            }
            std::vector<std::string> ids;
            for (const auto& kv : cl) ids.push_back(kv.first);
            cd.misfit = similarity_misfit(features(problem, ids, sketch), features(problem, ids, cur));
            cands.push_back(std::move(cd));
        }
        if (cands.empty()) {
            r.signs.push_back(0);
            r.fallback_steps.push_back(static_cast<int>(k));
            dead = true;
            continue;
        }
        auto key = [](const Cand& c) { return std::make_tuple(c.side, c.type_miss, c.misfit); };
        std::stable_sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) { return key(a) < key(b); });
        bool indifferent = cands.size() > 1 && cands[0].side == cands[1].side && cands[0].type_miss == cands[1].type_miss &&
                           std::fabs(cands[0].misfit - cands[1].misfit) <= 1e-9;
        if (indifferent) {
            auto it = std::find_if(cands.begin(), cands.end(), [](const Cand& c) { return c.choice == 0; });
            const Cand& pick = it != cands.end() ? *it : cands[0];
            r.signs.push_back(pick.choice);
            st = pick.st;
            r.fallback_steps.push_back(static_cast<int>(k));
        } else {
            r.signs.push_back(cands[0].choice);
            st = cands[0].st;
        }
    }
    return r;
}

// ---- navigation --------------------------------------------------------------------------------

Navigator::Navigator(const ConstructionPlan& plan, const GcsProblem& problem, const SignVector& signs)
    : plan_(&plan), problem_(&problem) {
    choices_ = step_choices(plan, signs);
    states_.resize(plan.steps.size() + 1);
    states_[0].clusters.resize(static_cast<size_t>(plan.cluster_count));
    rebuild(0);
}

int Navigator::rebuild(size_t from) {
    failed_ = -1;
    message_.clear();
    int n = 0;
    for (size_t k = from; k < plan_->steps.size(); ++k) {
        ExecState next = states_[k];
        std::string why;
        bool ok = false;
        ++n;
        try {
            ok = apply_step(*problem_, *plan_, k, choices_[k], next, &why);
        } catch (const Error& e) {
            why = e.what();
        }
        if (!ok) {
            failed_ = static_cast<int>(k);
            message_ = why;
            return n;
        }
        states_[k + 1] = std::move(next);
    }
    return n;
}

SignVector Navigator::signs() const {
    SignVector out;
    for (int s : plan_->multi_root_steps()) out.push_back(choices_[static_cast<size_t>(s)]);
    return out;
}

Placement Navigator::placement() const {
    size_t last = failed_ >= 0 ? static_cast<size_t>(failed_) : plan_->steps.size();
    return collect(*plan_, states_[last]);
}

namespace {

bool same_pose(const Pose& a, const Pose& b) {
    return a.p.x == b.p.x && a.p.y == b.p.y && a.r == b.r && a.line.n.x == b.line.n.x && a.line.n.y == b.line.n.y &&
           a.line.d == b.line.d;
}

}  // namespace

FlipResult Navigator::flip(int step) {
    if (step < 0 || step >= static_cast<int>(plan_->steps.size()))
        throw Error(ErrorCode::BadStep, "step " + std::to_string(step) + " out of range", step);
    int m = plan_->steps[static_cast<size_t>(step)].multiplicity;
    if (m <= 1) throw Error(ErrorCode::NotMultiRoot, "step " + std::to_string(step) + " has a single root", step);
    Placement before = placement();
    choices_[static_cast<size_t>(step)] = (choices_[static_cast<size_t>(step)] + 1) % m;
    size_t from = static_cast<size_t>(step);
    if (failed_ >= 0 && failed_ < step) from = static_cast<size_t>(failed_);
    FlipResult r;
    r.reexecuted = rebuild(from);
    r.signs = signs();
    r.feasible = feasible();
    r.failed_step = failed_;
    r.message = message_;
    r.placement = placement();
    for (const auto& [id, pose] : r.placement) {
        auto it = before.find(id);
        if (it == before.end() || !same_pose(it->second, pose)) r.changed.push_back(id);
    }
    for (const auto& kv : before)
        if (!r.placement.count(kv.first)) r.changed.push_back(kv.first);
    return r;
}

FlipResult Navigator::set_signs(const SignVector& signs) {
    Placement before = placement();
    std::vector<int> next = step_choices(*plan_, signs);
    size_t from = plan_->steps.size();
    for (size_t k = 0; k < next.size(); ++k)
        if (next[k] != choices_[k]) {
            from = k;
            break;
        }
    if (failed_ >= 0 && static_cast<size_t>(failed_) < from) from = static_cast<size_t>(failed_);
    choices_ = next;
    FlipResult r;
    if (from < plan_->steps.size()) r.reexecuted = rebuild(from);
    r.signs = this->signs();
    r.feasible = feasible();
    r.failed_step = failed_;
    r.message = message_;
    r.placement = placement();
    for (const auto& [id, pose] : r.placement) {
        auto it = before.find(id);
        if (it == before.end() || !same_pose(it->second, pose)) r.changed.push_back(id);
    }
    return r;
}

}  // namespace gcs
