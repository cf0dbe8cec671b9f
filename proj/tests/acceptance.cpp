// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any line fails.
#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gcs/cayley.hpp"
#include "gcs/construct.hpp"
#include "gcs/graph.hpp"
#include "gcs/io.hpp"
#include "gcs/planner.hpp"
#include "gcs/roots.hpp"
#include "gcs/undercon.hpp"
#include "gcs/varcircle.hpp"

using namespace gcs;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
    std::printf("%s %-22s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

GcsProblem corpus(const std::string& name) { return load_problem(std::string(GCS_CORPUS_DIR) + "/" + name); }

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
void guarded(const char* name, F f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(name, false, std::string("exception: ") + e.what());
    }
}

// ---------------------------------------------------------------------------------------------

void truss() {
    auto t0 = std::chrono::steady_clock::now();
    GcsProblem p = corpus("truss.gcs");
    ConstructionPlan plan = make_plan(p);
    ExecResult one = execute_plan(plan, p, SignVector(plan.multi_root_steps().size(), 0));
    EnumerateResult all = enumerate(plan, p);
    double ms = ms_since(t0);
    double worst = one.ok ? max_residual(p, one.placement) : INFINITY;
    for (const Placement& pl : all.placements) worst = std::max(worst, max_residual(p, pl));
    bool ok = one.ok && worst <= 1e-8 && all.placements.size() <= 4 && !all.placements.empty() && ms < 50.0;
    report("truss", ok, fmt("%zu placements, max residual %.2e, %.2f ms", all.placements.size(), worst, ms));
}

void church_rosser() {
    auto t0 = std::chrono::steady_clock::now();
    GcsProblem p = corpus("three_trusses.gcs");
    ConstraintGraph g = build_graph(p);
    DecomposeResult base = triangle_decompose(g, {0, false});
    std::string shape = base.tree.serialize();
    unsigned other = 0;
    DecomposeResult alt;
    for (unsigned s = 1; s < 64 && !other; ++s) {
        alt = triangle_decompose(g, {s, false});
        if (alt.ok && alt.tree.serialize() != shape) other = s;
    }
    if (!base.ok || !other) {
        report("church-rosser", false, "no second decomposition tree found");
        return;
    }
    ConstructionPlan pa = emit_plan(base.tree, g, p), pb = emit_plan(alt.tree, g, p);
    EnumerateResult ea = enumerate(pa, p), eb = enumerate(pb, p);
    double worst = 0.0;
    bool matched = ea.placements.size() == eb.placements.size() && !ea.placements.empty();
    for (const Placement& a : ea.placements) {
        double best = INFINITY;
        for (const Placement& b : eb.placements) best = std::min(best, congruence_gap(p, a, b));
        worst = std::max(worst, best);
    }
    double ms = ms_since(t0);
    bool ok = matched && worst <= 1e-6 && ms < 200.0;
    report("church-rosser", ok,
           fmt("seeds 0/%u, %zu vs %zu solutions, worst gap %.2e, %.2f ms", other, ea.placements.size(),
               eb.placements.size(), worst, ms));
}

void classification() {
    GcsProblem f2 = corpus("fig2.gcs");
    ConstraintGraph g2 = build_graph(f2);
    Classification c2 = classify(g2);
    std::set<std::string> wit;
    for (int v : c2.witness) wit.insert(g2.ids[static_cast<size_t>(v)]);
    bool fig2 = c2.verdict == Verdict::OverConstrained && wit == std::set<std::string>{"v1", "v2", "v3", "v4"} &&
                deficit(g2, c2.witness) == 2;

    GcsProblem k = corpus("k33.gcs");
    ConstraintGraph gk = build_graph(k);
    Classification ck = classify(gk);
    bool k33_nd = false;
    try {
        make_plan(k);
    } catch (const Error& e) {
        k33_nd = e.code == ErrorCode::NotDecomposable;
    }
    bool k33 = ck.verdict == Verdict::WellConstrained && deficit(gk) == 3 && k33_nd;

    GcsProblem t = corpus("truss.gcs");
    ConstraintGraph gt = build_graph(t);
    bool tr = classify(gt).verdict == Verdict::WellConstrained && triangle_decompose(gt).ok;
    report("classification", fig2 && k33 && tr,
           fmt("fig2 %s witness deficit %d; K33 %s deficit %d %s; truss %s", verdict_name(c2.verdict),
               deficit(g2, c2.witness), verdict_name(ck.verdict), deficit(gk), k33_nd ? "not decomposable" : "decomposable?",
               tr ? "ok" : "bad"));
}

// Distinct unoriented lines among the roots.
int distinct_lines(const std::vector<std::optional<Pose>>& roots, double tol) {
    std::vector<Line2> seen;
    for (const auto& r : roots) {
        if (!r) continue;
        bool dup = false;
        for (const Line2& l : seen) {
            bool same = norm(l.n - r->line.n) <= tol && std::fabs(l.d - r->line.d) <= tol;
            bool opp = norm(l.n + r->line.n) <= tol && std::fabs(l.d + r->line.d) <= tol;
            if (same || opp) dup = true;
        }
        if (!dup) seen.push_back(r->line);
    }
    return static_cast<int>(seen.size());
}

void tangent_counts() {
    auto count = [](double r1, double r2, double d, double& resid) {
        Input a{ElementKind::Point, {}, {false, r1}}, b{ElementKind::Point, {}, {false, r2}};
        a.pose.p = {0.0, 0.0};
        b.pose.p = {d, 0.0};
        auto roots = construct_third_roots(ThirdCase::PPtoL, a, b);
        resid = 0.0;
        for (const auto& r : roots)
            if (r) {
                resid = std::max(resid, std::fabs(std::fabs(r->line.signed_distance(a.pose.p)) - r1));
                resid = std::max(resid, std::fabs(std::fabs(r->line.signed_distance(b.pose.p)) - r2));
            }
        return distinct_lines(roots, 1e-9);
    };
    double e1, e2;
    int apart = count(1.0, 1.0, 4.0, e1);
    int kiss = count(2.0, 2.0, 4.0, e2);
    bool ok = apart == 4 && kiss == 3 && e1 <= 1e-10 && e2 <= 1e-10;
    report("tangent-counts", ok, fmt("separate %d, touching %d, max residual %.2e", apart, kiss, std::max(e1, e2)));
}

void apollonius() {
    std::array<Cyclo, 3> circ{Cyclo::of_circle({0, 0}, 1.0), Cyclo::of_circle({10, 0}, 2.0),
                              Cyclo::of_circle({5, 8}, 1.5)};
    std::vector<Circle> sols = vcircle_sequential(circ);
    double worst = 0.0;
    for (const Circle& s : sols)
        for (const Cyclo& o : circ) worst = std::max(worst, tangency_residual(o, s));

    std::array<Cyclo, 3> pts{Cyclo::of_circle({0, 0}, 0.0), Cyclo::of_circle({10, 0}, 0.0),
                             Cyclo::of_circle({5, 8}, 0.0)};
    std::vector<Circle> cc = vcircle_sequential(pts);
    // Circumcenter from the perpendicular-bisector formula.
    double ax = 0, ay = 0, bx = 10, by = 0, cx = 5, cy = 8;
    double d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    double ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d;
    double uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d;
    double ur = std::hypot(ax - ux, ay - uy);
    double err = cc.size() == 1 ? std::max({std::fabs(cc[0].c.x - ux), std::fabs(cc[0].c.y - uy), std::fabs(cc[0].r - ur)})
                                : INFINITY;

    // The same two problems through the document pipeline, within one placement of the fixed triple.
    auto distinct = [](const char* name) {
        GcsProblem p = corpus(name);
        EnumerateResult e = enumerate(make_plan(p), p);
        std::vector<Pose> seen;
        for (const Placement& pl : e.placements) {
            if (norm(pl.at("C3").p - e.placements.front().at("C3").p) > 1e-9) continue;
            const Pose& x = pl.at("X");
            bool dup = false;
            for (const Pose& s : seen)
                if (norm(s.p - x.p) <= 1e-7 && std::fabs(s.r - x.r) <= 1e-7) dup = true;
            if (!dup) seen.push_back(x);
        }
        return seen.size();
    };
    size_t doc8 = distinct("apollonius.gcs"), doc1 = distinct("apollonius_points.gcs");
    bool ok = sols.size() == 8 && worst <= 1e-8 && cc.size() == 1 && err <= 1e-10 && doc8 == 8 && doc1 == 1;
    report("apollonius", ok,
           fmt("%zu circles (residual %.2e), points give %zu (circumcircle error %.2e); documents %zu and %zu",
               sols.size(), worst, cc.size(), err, doc8, doc1));
}

// Random merge instance: objects tangent to a random circle, split into two clusters that
// share one element; the moving cluster is expressed in a random frame.
struct MergeCase {
    bool shared_line;
    int cones1, cones2;
};

Cyclo random_tangent(std::mt19937& rng, Vec2 c, double r, bool cone) {
    std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), rad(0.5, 2.0);
    double t = ang(rng);
    Vec2 u{std::cos(t), std::sin(t)};
    if (!cone) return Cyclo::of_line(Line2::through(c + r * u, perp(u)));
    double rho = rad(rng);
    bool outside = rng() % 2;
    return Cyclo::of_circle(c + (outside ? r + rho : std::fabs(r - rho)) * u, rho);
}

Cyclo moved(const Rigid& m, const Cyclo& o) {
    Cyclo r = o;
    if (o.line) r.l = m.apply(o.l);
    else r.c = m.apply(o.c);
    return r;
}

void table9() {
    const MergeCase cases[] = {{true, 0, 0}, {true, 1, 0}, {true, 1, 1}, {true, 2, 0}, {true, 2, 1}, {true, 2, 2},
                               {false, 0, 0}, {false, 1, 0}, {false, 1, 1}, {false, 2, 0}, {false, 2, 1}, {false, 2, 2}};
    std::mt19937 rng(20240917);
    std::uniform_real_distribution<double> U(-5, 5), R(1, 4), A(0, 2 * std::numbers::pi);
    int instances = 0, over = 0, bad_roots = 0, degenerate = 0, missed = 0;
    double worst = 0.0;
    std::map<std::string, int> max_deg;
    for (const MergeCase& mc : cases) {
        for (int it = 0; it < 100; ++it) {
            Vec2 c{U(rng), U(rng)};
            double r = R(rng);
            std::array<Cyclo, 2> s1{random_tangent(rng, c, r, mc.cones1 >= 1), random_tangent(rng, c, r, mc.cones1 >= 2)};
            std::array<Cyclo, 2> s2w{random_tangent(rng, c, r, mc.cones2 >= 1), random_tangent(rng, c, r, mc.cones2 >= 2)};
            Cyclo e0 = mc.shared_line ? Cyclo::of_line(Line2::through({U(rng), U(rng)}, {std::cos(A(rng)), std::sin(A(rng))}))
                                      : Cyclo::of_circle({U(rng), U(rng)}, 0.0);
            Rigid frame = Rigid::rotation(A(rng)).then(Rigid::translation({U(rng), U(rng)}));
            std::array<Cyclo, 2> s2{moved(frame, s2w[0]), moved(frame, s2w[1])};
            ++instances;
            MergeResult mr;
            try {
                mr = vcircle_merge(s1, s2, e0, moved(frame, e0));
            } catch (const Error&) {
                ++degenerate;
                continue;
            }
            for (const MergePolynomial& mp : mr.polys) {
                if (mp.degree > mp.bound) ++over;
                max_deg[(mc.shared_line ? "T " : "R ") + mp.case_tag] =
                    std::max(max_deg[(mc.shared_line ? "T " : "R ") + mp.case_tag], mp.degree);
            }
            bool found = false;
            for (const MergeSolution& s : mr.solutions) {
                double e = 0.0;
                for (const Cyclo& o : s1) e = std::max(e, tangency_residual(o, s.circle));
                for (const Cyclo& o : s2) e = std::max(e, tangency_residual(moved(s.motion, o), s.circle));
                worst = std::max(worst, e);
                if (e > 1e-8) ++bad_roots;
                if (norm(s.circle.c - c) <= 1e-6 && std::fabs(s.circle.r - r) <= 1e-6) found = true;
            }
            if (!found) ++missed;
        }
    }
    std::string degs;
    for (auto& [k, v] : max_deg) degs += fmt(" %s:%d", k.c_str(), v);
    bool ok = over == 0 && bad_roots == 0 && degenerate == 0;
    report("table9-degrees", ok,
           fmt("%d instances, %d over bound, %d bad roots (worst %.2e), %d degenerate, %d missed planted;%s", instances,
               over, bad_roots, worst, degenerate, missed, degs.c_str()));
}

GcsProblem chain(int n, std::mt19937& rng, int broken = -1) {
    std::uniform_real_distribution<double> U(-10, 10);
    GcsProblem p;
    std::vector<Vec2> pos;
    for (int i = 0; i < n; ++i) {
        Element e;
        e.id = "P" + std::to_string(i);
        Pose s;
        s.p = {U(rng), U(rng)};
        e.sketch = s;
        pos.push_back(s.p);
        p.elements.push_back(e);
    }
    auto add = [&](int a, int b) {
        Constraint c;
        c.id = "d" + std::to_string(a) + "_" + std::to_string(b);
        c.a = p.elements[static_cast<size_t>(a)].id;
        c.b = p.elements[static_cast<size_t>(b)].id;
        c.value = norm(pos[static_cast<size_t>(a)] - pos[static_cast<size_t>(b)]);
        p.constraints.push_back(c);
    };
    add(0, 1);
    for (int k = 2; k < n; ++k) {
        add(k - 1, k);
        add(k - 2, k);
        if (k == broken) {
            // |P_{k-1} P_k| exceeds the other two sides together.
            double base = norm(pos[static_cast<size_t>(k - 1)] - pos[static_cast<size_t>(k - 2)]);
            p.constraints[p.constraints.size() - 2].value = base + p.constraints.back().value + 1.0;
        }
    }
    return p;
}

void chains() {
    std::mt19937 rng(7);
    bool ok = true;
    std::string detail;
    for (int n = 6; n <= 10; ++n) {
        GcsProblem p = chain(n, rng);
        ConstructionPlan plan = make_plan(p);
        EnumerateResult e = enumerate(plan, p);
        size_t bound = size_t{1} << (n - 2);
        int broken = n - 2;
        GcsProblem q = chain(n, rng, broken);
        ConstructionPlan qp = make_plan(q);
        EnumerateResult f = enumerate(qp, q);
        size_t at = qp.steps.size();
        for (size_t k = 0; k < qp.steps.size(); ++k)
            for (const std::string& o : qp.steps[k].outputs)
                if (o == "P" + std::to_string(broken)) at = std::min(at, k);
        bool pruned = at < qp.steps.size();
        long after = 0;
        for (size_t k = at + 1; k < qp.steps.size(); ++k) after += f.step_executions[k];
        pruned = pruned && after == 0 && f.step_executions[at] > 0;
        bool step_ok = e.exhausted && e.placements.size() <= bound && !e.placements.empty() &&
                       f.placements.size() < e.placements.size() && pruned;
        ok = ok && step_ok;
        detail += fmt("n=%d %zu<=%zu broken %zu (later steps run %ld); ", n, e.placements.size(), bound,
                      f.placements.size(), after);
    }
    report("chain-bound", ok, detail);
}

std::vector<VertexPair> read_pool(const ConstraintGraph& g, const std::string& path) {
    std::ifstream in(path);
    std::vector<VertexPair> pool;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string a, b;
        ss >> a >> b;
        pool.push_back({g.vertex(a), g.vertex(b)});
    }
    return pool;
}

void completion() {
    GcsProblem p = corpus("fig16a.gcs");
    ConstraintGraph g = build_graph(p);
    int n = g.vertex_count(), m = 0;
    for (const GraphEdge& e : g.edges) m += e.label;
    Completion fc = free_completion(g);
    ConstraintGraph full = with_edges(g, fc.added);
    bool well = classify(full).verdict == Verdict::WellConstrained && triangle_decompose(full).ok;

    std::vector<VertexPair> pool = read_pool(g, std::string(GCS_CORPUS_DIR) + "/fig17b.pool");
    Completion cc = conditional_completion(g, pool);
    bool subset = true;
    for (auto [a, b] : cc.added) {
        bool in = std::any_of(pool.begin(), pool.end(), [&](VertexPair q) {
            return (q.first == a && q.second == b) || (q.first == b && q.second == a);
        });
        subset = subset && in;
    }
    ConstraintGraph cfull = with_edges(g, cc.added);
    bool cwell = classify(cfull).verdict == Verdict::WellConstrained && triangle_decompose(cfull).ok;
    int expect = 2 * n - m - 3;
    bool ok = static_cast<int>(fc.added.size()) == expect && expect == 4 && well && cc.added.size() == 4 &&
              !cc.partial && subset && cwell;
    report("completion", ok,
           fmt("free %zu (2|V|-|E|-3 = %d, %s), conditional %zu from pool of %zu (%s)", fc.added.size(), expect,
               well ? "well-constrained, plans" : "not completed", cc.added.size(), pool.size(),
               subset && cwell ? "subset, plans" : "invalid"));
}

void cayley() {
    auto t0 = std::chrono::steady_clock::now();
    Linkage tri = make_linkage(corpus("triangle_linkage.gcs"));
    CayleySpace ts = cayley_space(tri, 256);
    double err = 0.0;
    bool single = !ts.orientations.empty();
    for (const auto& o : ts.orientations) {
        if (o.intervals.size() != 1) {
            single = false;
            continue;
        }
        err = std::max({err, std::fabs(o.intervals[0].lo - 2.0), std::fabs(o.intervals[0].hi - 8.0)});
    }

    // Soundness: samples inside an interval execute, samples outside every interval fail.
    std::mt19937 rng(99);
    auto sound = [&](const Linkage& lk, const CayleySpace& cs, int& bad) {
        std::uniform_real_distribution<double> U(cs.domain_lo, cs.domain_hi);
        for (int i = 0; i < 1000; ++i) {
            size_t o = rng() % cs.orientations.size();
            double v = U(rng);
            bool inside = interval_of(cs, o, v) >= 0;
            bool near = interval_of(cs, o, v, 1e-9 * (cs.domain_hi - cs.domain_lo)) >= 0;
            if (inside != near) continue;  // too close to an endpoint to call
            if (execute_at(lk, cs.orientations[o].signs, v).ok != inside) ++bad;
        }
    };
    int bad_tri = 0, bad_crank = 0, bad_slider = 0;
    sound(tri, ts, bad_tri);

    Linkage crank = make_linkage(corpus("crankshaft.gcs"));
    CayleySpace cs = cayley_space(crank, 256);
    size_t total = 0;
    for (const auto& o : cs.orientations) total += o.intervals.size();
    sound(crank, cs, bad_crank);

    Linkage slider = make_linkage(corpus("crank_slider.gcs"));
    CayleySpace ss = cayley_space(slider, 256);
    size_t gaps = 0;
    for (const auto& o : ss.orientations) gaps = std::max(gaps, o.intervals.size());
    sound(slider, ss, bad_slider);
    double ms = ms_since(t0);
    bool ok = single && err <= 1e-8 && total >= 2 && bad_tri + bad_crank + bad_slider == 0 && ms < 2000.0;
    report("cayley", ok,
           fmt("triangle [2,8] error %.2e; crankshaft %zu intervals over %zu orientations; crank-slider up to %zu per "
               "orientation; unsound samples %d/%d/%d; %.0f ms",
               err, total, cs.orientations.size(), gaps, bad_tri, bad_crank, bad_slider, ms));
}

void navigation() {
    std::vector<std::string> names;
    for (const auto& f : std::filesystem::directory_iterator(GCS_CORPUS_DIR))
        if (f.path().extension() == ".gcs") names.push_back(f.path().filename().string());
    std::sort(names.begin(), names.end());
    std::mt19937 rng(12345);
    double worst = 0.0;
    int problems = 0, flips = 0, mismatches = 0;
    for (const std::string& name : names) {
        GcsProblem p = corpus(name);
        ConstructionPlan plan;
        try {
            plan = make_plan(p);
        } catch (const Error&) {
            continue;
        }
        std::vector<int> multi = plan.multi_root_steps();
        if (multi.empty() || multi.size() > 6) continue;
        ++problems;
        Navigator nav(plan, p, SignVector(multi.size(), 0));
        for (int i = 0; i < 100; ++i) {
            int step = multi[rng() % multi.size()];
            FlipResult fr = nav.flip(step);
            ++flips;
            ExecResult ex = execute_plan(plan, p, fr.signs);
            if (ex.ok != fr.feasible) {
                ++mismatches;
                continue;
            }
            if (!ex.ok) {
                if (ex.failed_step != fr.failed_step) ++mismatches;
                continue;
            }
            double gap = placement_gap(p, fr.placement, ex.placement);
            worst = std::max(worst, gap);
            if (!(gap <= 1e-12)) ++mismatches;
        }
    }
    report("navigation", mismatches == 0 && problems >= 10,
           fmt("%d problems, %d flips, %d mismatches, worst gap %.2e", problems, flips, mismatches, worst));
}

void predicates() {
    GcsProblem p = corpus("quad_fig10.gcs");
    ConstructionPlan plan = make_plan(p);
    EnumerateResult all = enumerate(plan, p);
    EnumerateResult kept = enumerate(plan, p, std::numeric_limits<size_t>::max(), p.predicates);
    // P3 left of P1->P2, and the turn P2->P3 then P3->P4 clockwise, from raw coordinates.
    auto oracle = [](const Placement& pl) {
        Vec2 p1 = pl.at("P1").p, p2 = pl.at("P2").p, p3 = pl.at("P3").p, p4 = pl.at("P4").p;
        double side = (p2.x - p1.x) * (p3.y - p1.y) - (p2.y - p1.y) * (p3.x - p1.x);
        double turn = (p3.x - p2.x) * (p4.y - p3.y) - (p3.y - p2.y) * (p4.x - p3.x);
        return side > 0 && turn < 0;
    };
    std::set<SignVector> want, got(kept.signs.begin(), kept.signs.end());
    for (size_t i = 0; i < all.signs.size(); ++i)
        if (oracle(all.placements[i])) want.insert(all.signs[i]);
    bool ok = p.predicates.size() == 2 && want == got && !got.empty() && got.size() < all.signs.size();
    report("predicate-selection", ok,
           fmt("%zu of %zu solutions kept, oracle selects %zu", got.size(), all.signs.size(), want.size()));
}

}  // namespace

int main() {
    guarded("truss", truss);
    guarded("church-rosser", church_rosser);
    guarded("classification", classification);
    guarded("tangent-counts", tangent_counts);
    guarded("apollonius", apollonius);
    guarded("table9-degrees", table9);
    guarded("chain-bound", chains);
    guarded("completion", completion);
    guarded("cayley", cayley);
    guarded("navigation", navigation);
    guarded("predicate-selection", predicates);
    std::printf("%d failed\n", failures);
    return failures ? 1 : 0;
}
