#include "gcs/cayley.hpp"

#include "gcs/roots.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

namespace gcs {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_length(ConstraintKind k) {
    return k == ConstraintKind::PointPointDistance || k == ConstraintKind::PointLineDistance ||
           k == ConstraintKind::CenterDistance || k == ConstraintKind::LineLineParallelDistance;
}

double wrap_pi(double v) {
    double t = std::fmod(v, kPi);
    if (t < 0) t += kPi;
    return t >= kPi ? 0.0 : t;
}

// Feasible-side evaluation point of an interval endpoint.
double eval_point(const Linkage& lk, double v) {
    if (!lk.angle) return v;
    if (v >= kPi) {
        double w = v - kPi;
        return w == 0.0 ? std::nextafter(kPi, 0.0) : w;
    }
    return v;
}

struct Sample {
    double t;
    bool ok;
    int step;
};

}  // namespace

Linkage make_linkage(const GcsProblem& problem) {
    if (!problem.linkage) throw Error(ErrorCode::PlanError, "problem has no free constraint (linkage section)");
    Linkage lk;
    lk.problem = problem;
    lk.free = problem.constraint_index(*problem.linkage);
    if (lk.free < 0) throw Error(ErrorCode::PlanError, "unknown free constraint " + *problem.linkage);
    const Constraint& fc = problem.constraints[static_cast<size_t>(lk.free)];
    if (fc.kind == ConstraintKind::LineLineAngle) lk.angle = true;
    else if (!is_length(fc.kind))
        throw Error(ErrorCode::KindMismatch, "free constraint " + fc.id + " has no scalar value to vary");
    lk.graph = build_graph(problem);
    DecomposeResult r = triangle_decompose(lk.graph);
    if (!r.ok) throw Error(ErrorCode::NotDecomposable, "base problem is not triangle-decomposable: " + r.diagnostic);
    lk.tree = r.tree;
    lk.plan = emit_plan(lk.tree, lk.graph, problem);
    if (lk.angle) {
        lk.domain_hi = kPi;
    } else {
        double sum = 0.0;
        for (size_t i = 0; i < problem.constraints.size(); ++i)
            if (static_cast<int>(i) != lk.free && is_length(problem.constraints[i].kind))
                sum += std::fabs(problem.constraints[i].value);
        for (const Element& e : problem.elements) sum += e.radius;
        lk.domain_hi = sum > 0.0 ? 2.0 * sum : 1.0;
    }
    return lk;
}

ExecResult execute_at(const Linkage& lk, const SignVector& signs, double value) {
    GcsProblem p = lk.problem;
    p.constraints[static_cast<size_t>(lk.free)].value = lk.angle ? wrap_pi(value) : value;
    try {
        ConstructionPlan plan = emit_plan(lk.tree, lk.graph, p);
        std::vector<int> base = step_choices(lk.plan, signs);
        SignVector sv;
        for (size_t k = 0; k < plan.steps.size(); ++k)
            if (plan.steps[k].multiplicity > 1) sv.push_back(std::min(base[k], plan.steps[k].multiplicity - 1));
        return execute_plan(plan, p, sv);
    } catch (const Error& e) {
        ExecResult r;
        r.ok = false;
        r.failed_step = e.step;
        r.message = e.what();
        return r;
    }
}

CayleySpace cayley_space(const Linkage& lk, int resolution) {
    CayleySpace cs;
    cs.free_id = lk.problem.constraints[static_cast<size_t>(lk.free)].id;
    cs.angle = lk.angle;
    cs.domain_lo = lk.domain_lo;
    cs.domain_hi = lk.domain_hi;
    if (resolution < 64) {
        cs.warnings.push_back("resolution raised to the minimum of 64");
        resolution = 64;
    }
    cs.resolution = resolution;
    const double range = lk.domain_hi - lk.domain_lo;
    const double cell_floor = range / static_cast<double>(1 << 20);

    std::vector<int> mults;
    for (int k : lk.plan.multi_root_steps()) mults.push_back(lk.plan.steps[static_cast<size_t>(k)].multiplicity);
    SignVector signs(mults.size(), 0);
    while (true) {
        OrientationSpace os;
        os.signs = signs;
        auto eval = [&](double t) {
            ExecResult r = execute_at(lk, signs, eval_point(lk, t));
            return Sample{t, r.ok, r.ok ? -1 : r.failed_step};
        };

        std::vector<Sample> base;
        int n = lk.angle ? resolution + 1 : resolution;
        for (int i = 0; i < n; ++i) {
            double t = lk.angle ? kPi * i / resolution : lk.domain_lo + range * i / (resolution - 1);
            base.push_back(eval(t));
        }

        // Two infeasible samples blocked at different steps may hide a thin feasible window.
        std::vector<Sample> samples;
        bool escalated = false;
        std::function<void(const Sample&, const Sample&)> refine = [&](const Sample& a, const Sample& b) {
            if (a.ok || b.ok || a.step == b.step || b.t - a.t <= cell_floor) return;
            Sample m = eval(a.t + (b.t - a.t) / 2);
            refine(a, m);
            samples.push_back(m);
            if (m.ok) escalated = true;
            refine(m, b);
        };
        for (size_t i = 0; i < base.size(); ++i) {
            if (i > 0) refine(base[i - 1], base[i]);
            samples.push_back(base[i]);
        }
        if (escalated) {
            std::ostringstream w;
            w << "orientation " << format_signs(signs, lk.plan) << ": intervals found only after local refinement";
            cs.warnings.push_back(w.str());
        }

        // Boundary between a feasible and an infeasible sample, refined until no double lies between.
        auto bisect = [&](Sample in, Sample out) {
            while (true) {
                double m = in.t + (out.t - in.t) / 2;
                if (m == in.t || m == out.t) break;
                Sample s = eval(m);
                if (s.ok) in = s;
                else out = s;
            }
            return std::make_pair(in.t, out.step);
        };

        for (size_t i = 0; i < samples.size(); ++i) {
            if (!samples[i].ok) continue;
            size_t j = i;
            while (j + 1 < samples.size() && samples[j + 1].ok) ++j;
            CayleyInterval iv;
            if (i == 0) {
                iv.lo = samples[0].t;
                iv.lo_domain = true;
            } else {
                auto [t, st] = bisect(samples[i], samples[i - 1]);
                iv.lo = t;
                iv.lo_step = st;
            }
            if (j + 1 == samples.size()) {
                iv.hi = samples[j].t;
                iv.hi_domain = true;
            } else {
                auto [t, st] = bisect(samples[j], samples[j + 1]);
                iv.hi = t;
                iv.hi_step = st;
            }
            os.intervals.push_back(iv);
            i = j;
        }

        if (lk.angle && !os.intervals.empty() && os.intervals.front().lo_domain && os.intervals.back().hi_domain) {
            ExecResult r0 = execute_at(lk, signs, 0.0), r1 = execute_at(lk, signs, eval_point(lk, kPi));
            double scale = std::max(1.0, diameter(lk.problem, r0.placement));
            if (r0.ok && r1.ok && placement_gap(lk.problem, r0.placement, r1.placement) <= 1e-8 * scale) {
                if (os.intervals.size() == 1) {
                    os.intervals[0].full = true;
                } else {
                    CayleyInterval a = os.intervals.back(), b = os.intervals.front();
                    CayleyInterval m;
                    m.lo = a.lo;
                    m.lo_step = a.lo_step;
                    m.hi = b.hi + kPi;
                    m.hi_step = b.hi_step;
                    os.intervals.pop_back();
                    os.intervals.erase(os.intervals.begin());
                    os.intervals.push_back(m);
                }
            }
        }
        cs.orientations.push_back(os);

        int k = static_cast<int>(signs.size()) - 1;
        while (k >= 0 && ++signs[static_cast<size_t>(k)] == mults[static_cast<size_t>(k)]) signs[static_cast<size_t>(k--)] = 0;
        if (k < 0) break;
    }
    return cs;
}

namespace {

// Position of value inside the interval on its unwrapped axis, or NaN.
double position_in(const CayleyInterval& iv, double v, bool angle, double tol) {
    if (iv.full) return wrap_pi(v);
    double cand[2] = {angle ? wrap_pi(v) : v, wrap_pi(v) + kPi};
    for (int k = 0; k < (angle ? 2 : 1); ++k)
        if (cand[k] >= iv.lo - tol && cand[k] <= iv.hi + tol) return std::clamp(cand[k], iv.lo, iv.hi);
    return std::nan("");
}

}  // namespace

int interval_of(const CayleySpace& cs, size_t orientation, double value, double tol) {
    const auto& ivs = cs.orientations.at(orientation).intervals;
    for (size_t i = 0; i < ivs.size(); ++i)
        if (!std::isnan(position_in(ivs[i], value, cs.angle, tol))) return static_cast<int>(i);
    return -1;
}

ReachEndpoint locate(const Linkage& lk, const Placement& placement) {
    const Constraint& fc = lk.problem.constraints[static_cast<size_t>(lk.free)];
    auto pose = [&](const std::string& id) -> const Pose& {
        auto it = placement.find(id);
        if (it == placement.end()) throw Error(ErrorCode::BadEndpoint, "placement lacks element " + id);
        return it->second;
    };
    const Pose& a = pose(fc.a);
    const Pose& b = pose(fc.b);
    ReachEndpoint ep;
    switch (fc.kind) {
        case ConstraintKind::LineLineAngle: ep.value = line_angle(a.line, b.line); break;
        case ConstraintKind::PointLineDistance: ep.value = std::fabs(b.line.signed_distance(a.p)); break;
        case ConstraintKind::LineLineParallelDistance: ep.value = std::fabs(a.line.d - b.line.d * dot(a.line.n, b.line.n)); break;
        case ConstraintKind::CenterDistance: ep.value = norm(a.p - b.p) - (fc.perimeter ? b.r : 0.0); break;
        default: ep.value = norm(a.p - b.p);
    }
    double scale = std::max(1.0, diameter(lk.problem, placement));
    std::vector<int> mults;
    for (int k : lk.plan.multi_root_steps()) mults.push_back(lk.plan.steps[static_cast<size_t>(k)].multiplicity);
    SignVector signs(mults.size(), 0);
    while (true) {
        ExecResult r = execute_at(lk, signs, ep.value);
        if (r.ok && congruence_gap(lk.problem, r.placement, placement) <= 1e-6 * scale) {
            ep.signs = signs;
            return ep;
        }
        int k = static_cast<int>(signs.size()) - 1;
        while (k >= 0 && ++signs[static_cast<size_t>(k)] == mults[static_cast<size_t>(k)]) signs[static_cast<size_t>(k--)] = 0;
        if (k < 0) break;
    }
    throw Error(ErrorCode::BadEndpoint, "placement matches no orientation of the linkage");
}

ReachPath reachable(const Linkage& lk, const CayleySpace& cs, const ReachEndpoint& start, const ReachEndpoint& end) {
    const double range = cs.domain_hi - cs.domain_lo;
    const double vtol = 1e-9 * range;

    auto find_orientation = [&](const SignVector& s) {
        for (size_t o = 0; o < cs.orientations.size(); ++o)
            if (cs.orientations[o].signs == s) return static_cast<int>(o);
        return -1;
    };
    struct Node {
        int o, i;
        double pos;
        int boundary;  // 0 lo, 1 hi, -1 endpoint of the query
    };
    std::vector<Node> nodes;
    std::vector<std::vector<std::pair<int, double>>> adj;
    auto add_node = [&](Node nd) {
        nodes.push_back(nd);
        adj.emplace_back();
        return static_cast<int>(nodes.size()) - 1;
    };
    auto link = [&](int a, int b, double w) {
        adj[static_cast<size_t>(a)].push_back({b, w});
        adj[static_cast<size_t>(b)].push_back({a, w});
    };

    int src = -1, dst = -1;
    auto endpoint_slot = [&](const ReachEndpoint& e, const char* what) {
        int o = find_orientation(e.signs);
        if (o < 0) throw Error(ErrorCode::BadEndpoint, std::string(what) + " orientation is not a sign vector of the plan");
        if (!execute_at(lk, e.signs, e.value).ok)
            throw Error(ErrorCode::BadEndpoint, std::string(what) + " configuration is not realizable");
        int i = interval_of(cs, static_cast<size_t>(o), e.value, vtol);
        if (i < 0) throw Error(ErrorCode::BadEndpoint, std::string(what) + " value lies in no interval");
        return std::make_pair(o, i);
    };
    auto [so, si] = endpoint_slot(start, "start");
    auto [eo, ei] = endpoint_slot(end, "end");

    std::vector<std::pair<int, double>> boundary_nodes;  // node, evaluation value
    for (size_t o = 0; o < cs.orientations.size(); ++o) {
        const auto& ivs = cs.orientations[o].intervals;
        for (size_t i = 0; i < ivs.size(); ++i) {
            const CayleyInterval& iv = ivs[i];
            std::vector<int> ids;
            int lo = add_node({static_cast<int>(o), static_cast<int>(i), iv.lo, 0});
            int hi = add_node({static_cast<int>(o), static_cast<int>(i), iv.hi, 1});
            ids = {lo, hi};
            if (static_cast<int>(o) == so && static_cast<int>(i) == si)
                ids.push_back(src = add_node({so, si, position_in(iv, start.value, cs.angle, vtol), -1}));
            if (static_cast<int>(o) == eo && static_cast<int>(i) == ei)
                ids.push_back(dst = add_node({eo, ei, position_in(iv, end.value, cs.angle, vtol), -1}));
            std::sort(ids.begin(), ids.end(), [&](int a, int b) {
                return nodes[static_cast<size_t>(a)].pos < nodes[static_cast<size_t>(b)].pos;
            });
            for (size_t k = 1; k < ids.size(); ++k)
                link(ids[k - 1], ids[k], nodes[static_cast<size_t>(ids[k])].pos - nodes[static_cast<size_t>(ids[k - 1])].pos);
            if (iv.full) link(lo, hi, 0.0);
            boundary_nodes.push_back({lo, eval_point(lk, iv.lo)});
            boundary_nodes.push_back({hi, eval_point(lk, iv.hi)});
        }
    }

    // Orientations switch continuously only where their placements coincide.
    std::vector<ExecResult> at(boundary_nodes.size());
    for (size_t k = 0; k < boundary_nodes.size(); ++k) {
        const Node& nd = nodes[static_cast<size_t>(boundary_nodes[k].first)];
        at[k] = execute_at(lk, cs.orientations[static_cast<size_t>(nd.o)].signs, boundary_nodes[k].second);
    }
    for (size_t a = 0; a < boundary_nodes.size(); ++a)
        for (size_t b = a + 1; b < boundary_nodes.size(); ++b) {
            const Node& na = nodes[static_cast<size_t>(boundary_nodes[a].first)];
            const Node& nb = nodes[static_cast<size_t>(boundary_nodes[b].first)];
            if (na.o == nb.o || !at[a].ok || !at[b].ok) continue;
            double va = boundary_nodes[a].second, vb = boundary_nodes[b].second;
            double dv = cs.angle ? angle_gap_mod_pi(va, vb) : std::fabs(va - vb);
            if (dv > vtol) continue;
            double scale = std::max(1.0, diameter(lk.problem, at[a].placement));
            if (placement_gap(lk.problem, at[a].placement, at[b].placement) <= 1e-8 * scale)
                link(boundary_nodes[a].first, boundary_nodes[b].first, 0.0);
        }

    std::vector<double> dist(nodes.size(), std::numeric_limits<double>::infinity());
    std::vector<int> prev(nodes.size(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[static_cast<size_t>(src)] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[static_cast<size_t>(u)]) continue;
        for (auto [v, w] : adj[static_cast<size_t>(u)])
            if (d + w < dist[static_cast<size_t>(v)]) {
                dist[static_cast<size_t>(v)] = d + w;
                prev[static_cast<size_t>(v)] = u;
                pq.push({d + w, v});
            }
    }
    if (!std::isfinite(dist[static_cast<size_t>(dst)]))
        throw Error(ErrorCode::Unreachable, "no continuous path joins the two configurations");

    std::vector<int> chain;
    for (int v = dst; v >= 0; v = prev[static_cast<size_t>(v)]) chain.push_back(v);
    std::reverse(chain.begin(), chain.end());
    ReachPath path;
    path.length = dist[static_cast<size_t>(dst)];
    auto out_value = [&](double pos) { return cs.angle ? wrap_pi(pos) : pos; };
    for (size_t k = 0; k < chain.size(); ++k) {
        const Node& nd = nodes[static_cast<size_t>(chain[k])];
        if (path.segments.empty() || path.segments.back().interval != nd.i ||
            path.segments.back().signs != cs.orientations[static_cast<size_t>(nd.o)].signs) {
            if (!path.segments.empty()) path.transitions.push_back(out_value(nd.pos));
            path.segments.push_back({cs.orientations[static_cast<size_t>(nd.o)].signs, nd.i, out_value(nd.pos), out_value(nd.pos)});
        } else {
            path.segments.back().to = out_value(nd.pos);
        }
    }
    return path;
}

ReachPath reachable(const Linkage& lk, const CayleySpace& cs, const Placement& start, const Placement& end) {
    return reachable(lk, cs, locate(lk, start), locate(lk, end));
}

}  // namespace gcs
