#include "gcs/varcircle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "gcs/model.hpp"

namespace gcs {

namespace {

struct EqN {
    bool cone = false;
    double ax = 0, ay = 0, az = 0, a0 = 0;

    double eval(double x, double y, double z) const {
        double v = ax * x + ay * y + az * z + a0;
        if (cone) v += x * x + y * y - z * z;
        return v;
    }
};

EqN make_eq(const Cyclo& o, int sigma) {
    EqN e;
    if (o.line) {
        e.ax = sigma * o.l.n.x;
        e.ay = sigma * o.l.n.y;
        e.az = -1.0;
        e.a0 = -sigma * o.l.d;
    } else {
        e.cone = true;
        e.ax = -2.0 * o.c.x;
        e.ay = -2.0 * o.c.y;
        e.az = 2.0 * sigma * o.rho;
        e.a0 = dot(o.c, o.c) - o.rho * o.rho;
    }
    return e;
}

EqN minus(const EqN& a, const EqN& b) { return {false, a.ax - b.ax, a.ay - b.ay, a.az - b.az, a.a0 - b.a0}; }

double det3(double a, double b, double c, double d, double e, double f, double g, double h, double i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

bool solve3(const EqN& r0, const EqN& r1, const EqN& r2, double out[3]) {
    double D = det3(r0.ax, r0.ay, r0.az, r1.ax, r1.ay, r1.az, r2.ax, r2.ay, r2.az);
    auto rn = [](const EqN& e) { return std::sqrt(e.ax * e.ax + e.ay * e.ay + e.az * e.az); };
    double ref = rn(r0) * rn(r1) * rn(r2);
    if (ref == 0.0 || std::fabs(D) <= 1e-12 * ref) return false;
    double h0 = -r0.a0, h1 = -r1.a0, h2 = -r2.a0;
    out[0] = det3(h0, r0.ay, r0.az, h1, r1.ay, r1.az, h2, r2.ay, r2.az) / D;
    out[1] = det3(r0.ax, h0, r0.az, r1.ax, h1, r1.az, r2.ax, h2, r2.az) / D;
    out[2] = det3(r0.ax, r0.ay, h0, r1.ax, r1.ay, h1, r2.ax, r2.ay, h2) / D;
    return true;
}

double objects_scale(const std::vector<Cyclo>& objs) {
    double s = 1.0;
    for (const Cyclo& o : objs) {
        if (o.line) s = std::max(s, std::fabs(o.l.d));
        else s = std::max({s, std::fabs(o.c.x), std::fabs(o.c.y), o.rho});
    }
    return s;
}

Circle make_circle(double x, double y, double z, double scale) {
    Circle c;
    c.c = {x, y};
    c.z = z;
    c.r = std::fabs(z);
    c.zero_radius = c.r <= 1e-12 * scale;
    if (c.zero_radius) c.r = 0.0;
    return c;
}

}  // namespace

int orientation_combos(const std::vector<Cyclo>& objs) {
    int k = 0;
    for (const Cyclo& o : objs)
        if (!o.is_point()) ++k;
    return k == 0 ? 1 : 1 << (k - 1);
}

int orientation_sign(const std::vector<Cyclo>& objs, int combo, size_t i) {
    if (objs[i].is_point()) return 1;
    int j = 0;
    for (size_t m = 0; m < i; ++m)
        if (!objs[m].is_point()) ++j;
    if (j == 0) return 1;
    return (combo >> (j - 1)) & 1 ? -1 : 1;
}

double cyclo_residual(const Cyclo& o, int sigma, const Circle& s) {
    if (o.line) return std::fabs(sigma * o.l.signed_distance(s.c) - s.z);
    return std::fabs(norm(s.c - o.c) - std::fabs(s.z - sigma * o.rho));
}

double tangency_residual(const Cyclo& o, const Circle& s) {
    if (o.line) return std::fabs(std::fabs(o.l.signed_distance(s.c)) - s.r);
    double d = norm(s.c - o.c);
    return std::min(std::fabs(d - (s.r + o.rho)), std::fabs(d - std::fabs(s.r - o.rho)));
}

namespace {

int seq_roots_per_combo(const std::array<Cyclo, 3>& in) {
    bool any_cone = false, all_points = true;
    for (const Cyclo& o : in) {
        any_cone = any_cone || o.is_cone();
        all_points = all_points && o.is_point();
    }
    return (!any_cone || all_points) ? 1 : 2;
}

}  // namespace

int vcircle_sequential_slot_count(const std::array<Cyclo, 3>& in) {
    std::vector<Cyclo> v(in.begin(), in.end());
    return orientation_combos(v) * seq_roots_per_combo(in);
}

std::vector<std::optional<Circle>> vcircle_sequential_slots(const std::array<Cyclo, 3>& in) {
    std::vector<Cyclo> objs(in.begin(), in.end());
    int combos = orientation_combos(objs);
    int per = seq_roots_per_combo(in);
    double scale = objects_scale(objs);
    bool all_points = std::all_of(objs.begin(), objs.end(), [](const Cyclo& o) { return o.is_point(); });
    std::vector<std::optional<Circle>> out;
    for (int k = 0; k < combos; ++k) {
        std::vector<int> sig(3);
        std::vector<EqN> planes, cones;
        for (size_t i = 0; i < 3; ++i) {
            sig[i] = orientation_sign(objs, k, i);
            EqN e = make_eq(objs[i], sig[i]);
            (e.cone ? cones : planes).push_back(e);
        }
        std::vector<std::optional<Circle>> slot(static_cast<size_t>(per));
        auto accept = [&](double x, double y, double z) -> std::optional<Circle> {
            Circle c = make_circle(x, y, z, scale);
            for (size_t i = 0; i < 3; ++i)
                if (cyclo_residual(objs[i], sig[i], c) > 1e-8 * scale) return std::nullopt;
            return c;
        };
        if (cones.empty()) {
            double p[3];
            if (solve3(planes[0], planes[1], planes[2], p)) slot[0] = accept(p[0], p[1], p[2]);
        } else {
            std::vector<EqN> lin = planes;
            for (size_t i = 1; i < cones.size(); ++i) lin.push_back(minus(cones[i], cones[0]));
            const EqN& K = cones[0];
            double n1[3] = {lin[0].ax, lin[0].ay, lin[0].az};
            double n2[3] = {lin[1].ax, lin[1].ay, lin[1].az};
            double d[3] = {n1[1] * n2[2] - n1[2] * n2[1], n1[2] * n2[0] - n1[0] * n2[2], n1[0] * n2[1] - n1[1] * n2[0]};
            double dd = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
            double ref = (n1[0] * n1[0] + n1[1] * n1[1] + n1[2] * n1[2]) * (n2[0] * n2[0] + n2[1] * n2[1] + n2[2] * n2[2]);
            if (dd > 1e-24 * ref) {
                double h1 = -lin[0].a0, h2 = -lin[1].a0;
                auto cr = [](const double a[3], const double b[3], double o[3]) {
                    o[0] = a[1] * b[2] - a[2] * b[1];
                    o[1] = a[2] * b[0] - a[0] * b[2];
                    o[2] = a[0] * b[1] - a[1] * b[0];
                };
                double a[3], b[3];
                cr(n2, d, a);
                cr(d, n1, b);
                double p0[3];
                for (int i = 0; i < 3; ++i) p0[i] = (h1 * a[i] + h2 * b[i]) / dd;
                double A = d[0] * d[0] + d[1] * d[1] - d[2] * d[2];
                double B = 2.0 * (p0[0] * d[0] + p0[1] * d[1] - p0[2] * d[2]) + K.ax * d[0] + K.ay * d[1] + K.az * d[2];
                double C = K.eval(p0[0], p0[1], p0[2]);
                QuadraticRoots q = solve_quadratic(A, B, C);
                std::vector<double> ts(q.r, q.r + q.count);
                if (all_points) {
                    // Both apex heights describe the same circle; keep z >= 0.
                    std::optional<Circle> best;
                    for (double t : ts) {
                        auto cand = accept(p0[0] + t * d[0], p0[1] + t * d[1], p0[2] + t * d[2]);
                        if (cand && (!best || cand->z > best->z)) best = cand;
                    }
                    if (best) {
                        best->z = std::fabs(best->z);
                        slot[0] = best;
                    }
                } else {
                    for (size_t i = 0; i < ts.size() && i < slot.size(); ++i)
                        slot[i] = accept(p0[0] + ts[i] * d[0], p0[1] + ts[i] * d[1], p0[2] + ts[i] * d[2]);
                }
            }
        }
        out.insert(out.end(), slot.begin(), slot.end());
    }
    return out;
}

std::vector<Circle> vcircle_sequential(const std::array<Cyclo, 3>& in) {
    std::vector<Cyclo> objs(in.begin(), in.end());
    double scale = objects_scale(objs);
    std::vector<Circle> out;
    for (const auto& s : vcircle_sequential_slots(in)) {
        if (!s) continue;
        bool dup = false;
        for (const Circle& c : out)
            if (norm(c.c - s->c) <= 1e-9 * scale && std::fabs(c.r - s->r) <= 1e-9 * scale) dup = true;
        if (!dup) out.push_back(*s);
    }
    return out;
}

// ---- cluster merge -------------------------------------------------------------------------

namespace {

template <class R>
R lift(double v);
template <>
Poly lift<Poly>(double v) {
    return Poly::constant(v);
}
template <>
TrigPoly lift<TrigPoly>(double v) {
    return TrigPoly::constant(v);
}

double eval_at(const Poly& p, double t) { return p.eval(t); }
double eval_at(const TrigPoly& p, double th) { return p.eval(th); }
double max_coef(const TrigPoly& p) { return std::max(p.p.max_abs(), p.q.max_abs()); }

template <class R>
struct EqR {
    bool cone = false;
    R ax, ay, az, a0;

    EqN at(double t) const { return {cone, eval_at(ax, t), eval_at(ay, t), eval_at(az, t), eval_at(a0, t)}; }
};

template <class R>
EqR<R> fixed_eq(const Cyclo& o, int sigma) {
    EqN e = make_eq(o, sigma);
    return {e.cone, lift<R>(e.ax), lift<R>(e.ay), lift<R>(e.az), lift<R>(e.a0)};
}

EqR<Poly> moving_eq_translation(const Cyclo& o, int sigma) {
    EqR<Poly> e;
    if (o.line) {
        e.ax = Poly::constant(sigma * o.l.n.x);
        e.ay = Poly::constant(sigma * o.l.n.y);
        e.az = Poly::constant(-1.0);
        e.a0 = Poly::linear(-sigma * o.l.d, -sigma * o.l.n.x);
    } else {
        e.cone = true;
        e.ax = Poly::linear(-2.0 * o.c.x, -2.0);
        e.ay = Poly::constant(-2.0 * o.c.y);
        e.az = Poly::constant(2.0 * sigma * o.rho);
        e.a0 = Poly({dot(o.c, o.c) - o.rho * o.rho, 2.0 * o.c.x, 1.0});
    }
    return e;
}

EqR<TrigPoly> moving_eq_rotation(const Cyclo& o, int sigma) {
    EqR<TrigPoly> e;
    if (o.line) {
        double nx = sigma * o.l.n.x, ny = sigma * o.l.n.y;
        e.ax = {Poly({0.0, nx}), Poly::constant(-ny)};
        e.ay = {Poly({0.0, ny}), Poly::constant(nx)};
        e.az = TrigPoly::constant(-1.0);
        e.a0 = TrigPoly::constant(-sigma * o.l.d);
    } else {
        e.cone = true;
        e.ax = {Poly({0.0, -2.0 * o.c.x}), Poly::constant(2.0 * o.c.y)};
        e.ay = {Poly({0.0, -2.0 * o.c.y}), Poly::constant(-2.0 * o.c.x)};
        e.az = TrigPoly::constant(2.0 * sigma * o.rho);
        // Rotation about the origin keeps |c|, so the constant term stays exact.
        e.a0 = TrigPoly::constant(dot(o.c, o.c) - o.rho * o.rho);
    }
    return e;
}

template <class R>
EqR<R> diff(const EqR<R>& a, const EqR<R>& b) {
    return {false, a.ax - b.ax, a.ay - b.ay, a.az - b.az, a.a0 - b.a0};
}

template <class R>
R det3r(const R& a, const R& b, const R& c, const R& d, const R& e, const R& f, const R& g, const R& h, const R& i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

Rigid to_canonical(const Cyclo& e0, bool flip) {
    if (e0.line) {
        Vec2 target{0.0, 1.0};
        double c = dot(e0.l.n, target), s = cross(e0.l.n, target);
        Rigid r{c, s, {}};
        r = r.then(Rigid::translation({0.0, -e0.l.d}));
        if (flip) r = r.then(Rigid::rotation(std::numbers::pi));
        return r;
    }
    return Rigid::translation(-e0.c);
}

Cyclo apply(const Rigid& m, const Cyclo& o) {
    Cyclo r = o;
    if (o.line) r.l = m.apply(o.l);
    else r.c = m.apply(o.c);
    return r;
}

int cone_count(const std::array<Cyclo, 2>& s) { return (s[0].is_cone() ? 1 : 0) + (s[1].is_cone() ? 1 : 0); }

std::array<Cyclo, 2> cones_first(const std::array<Cyclo, 2>& s) {
    if (!s[0].is_cone() && s[1].is_cone()) return {s[1], s[0]};
    return s;
}

}  // namespace

std::string merge_case_tag(bool shared_line, const std::array<Cyclo, 2>& s1, const std::array<Cyclo, 2>& s2) {
    auto pat = [](const std::array<Cyclo, 2>& s) {
        int c = cone_count(s);
        return std::string(c == 2 ? "CC" : c == 1 ? "CL" : "LL");
    };
    std::string a = pat(s1), b = pat(s2);
    if (cone_count(s2) > cone_count(s1)) std::swap(a, b);
    (void)shared_line;
    return "E(" + a + "," + b + ")";
}

std::pair<int, int> merge_degree_bound(const std::string& tag) {
    static const std::map<std::string, std::pair<int, int>> table = {
        {"E(LL,LL)", {1, 2}}, {"E(CL,LL)", {2, 4}}, {"E(CL,CL)", {4, 4}},
        {"E(CC,LL)", {2, 4}}, {"E(CC,CL)", {4, 4}}, {"E(CC,CC)", {4, 4}},
    };
    auto it = table.find(tag);
    if (it == table.end()) throw Error(ErrorCode::PlanError, "unknown merge case " + tag);
    return it->second;
}

int vcircle_merge_slot_count(bool shared_line, const std::array<Cyclo, 2>& s1, const std::array<Cyclo, 2>& s2) {
    auto [m, n] = merge_degree_bound(merge_case_tag(shared_line, s1, s2));
    std::vector<Cyclo> all{s1[0], s1[1], s2[0], s2[1]};
    int per = shared_line ? m : 2 * n;
    return (shared_line ? 2 : 1) * orientation_combos(all) * per;
}

namespace {

template <class R>
struct System {
    EqR<R> rows[3];
    EqR<R> target;
};

template <class R>
struct Minors {
    R D, Dx, Dy, Dz;
};

// Cramer minors of the three planes; D, Dx, Dy, Dz.
template <class R>
Minors<R> minors(const System<R>& s) {
    const EqR<R>* r = s.rows;
    R h0 = -r[0].a0, h1 = -r[1].a0, h2 = -r[2].a0;
    return {det3r(r[0].ax, r[0].ay, r[0].az, r[1].ax, r[1].ay, r[1].az, r[2].ax, r[2].ay, r[2].az),
            det3r(h0, r[0].ay, r[0].az, h1, r[1].ay, r[1].az, h2, r[2].ay, r[2].az),
            det3r(r[0].ax, h0, r[0].az, r[1].ax, h1, r[1].az, r[2].ax, h2, r[2].az),
            det3r(r[0].ax, r[0].ay, h0, r[1].ax, r[1].ay, h1, r[2].ax, r[2].ay, h2)};
}

template <class R>
R substitute(const System<R>& s, R& D) {
    Minors<R> m = minors(s);
    D = m.D;
    const R &Dx = m.Dx, &Dy = m.Dy, &Dz = m.Dz;
    const EqR<R>& t = s.target;
    R lin = t.ax * Dx + t.ay * Dy + t.az * Dz;
    if (t.cone) return Dx * Dx + Dy * Dy - Dz * Dz + D * lin + t.a0 * (D * D);
    return lin + t.a0 * D;
}

double mag(const Poly& p) { return p.max_abs(); }
double mag(const TrigPoly& p) { return max_coef(p); }

// When the planes are dependent for every parameter value, the system is consistent where
// the largest augmented minor vanishes; returns it, or false if every minor is negligible.
template <class R>
bool rank_deficient_condition(const System<R>& s, double tol, R& out) {
    Minors<R> m = minors(s);
    const R* best = nullptr;
    for (const R* c : {&m.Dx, &m.Dy, &m.Dz})
        if (!best || mag(*c) > mag(*best)) best = c;
    if (mag(*best) <= tol) return false;
    out = *best;
    return true;
}

// Points on the line cut out by two independent planes that satisfy the target equation.
std::vector<std::array<double, 3>> solve_rank2(const std::array<EqN, 4>& rows) {
    auto col = [](const EqN& e, int c) { return c == 0 ? e.ax : c == 1 ? e.ay : e.az; };
    double best = 0.0;
    int bi = -1, bj = -1, c1 = -1, c2 = -1;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            for (int a = 0; a < 3; ++a)
                for (int b = a + 1; b < 3; ++b) {
                    const EqN &ri = rows[static_cast<size_t>(i)], &rj = rows[static_cast<size_t>(j)];
                    double d = col(ri, a) * col(rj, b) - col(ri, b) * col(rj, a);
                    if (std::fabs(d) > std::fabs(best)) best = d, bi = i, bj = j, c1 = a, c2 = b;
                }
    if (bi < 0) return {};
    int f = 3 - c1 - c2;
    const EqN &ri = rows[static_cast<size_t>(bi)], &rj = rows[static_cast<size_t>(bj)];
    auto at = [&](double w) {
        double hi = -ri.a0 - col(ri, f) * w, hj = -rj.a0 - col(rj, f) * w;
        std::array<double, 3> q{};
        q[static_cast<size_t>(c1)] = (hi * col(rj, c2) - hj * col(ri, c2)) / best;
        q[static_cast<size_t>(c2)] = (col(ri, c1) * hj - col(rj, c1) * hi) / best;
        q[static_cast<size_t>(f)] = w;
        return q;
    };
    const EqN& t = rows[3];
    auto g = [&](double w) {
        auto q = at(w);
        return t.eval(q[0], q[1], q[2]);
    };
    double g0 = g(0.0), gp = g(1.0), gm = g(-1.0);
    double qa = 0.5 * (gp + gm) - g0, qb = 0.5 * (gp - gm);
    std::vector<double> ws;
    double scale = std::max({std::fabs(qa), std::fabs(qb), std::fabs(g0)});
    if (std::fabs(qa) <= 1e-12 * scale) {
        if (std::fabs(qb) > 1e-12 * scale) ws.push_back(-g0 / qb);
    } else {
        double disc = qb * qb - 4.0 * qa * g0;
        if (disc < 0.0 && disc > -1e-12 * qb * qb) disc = 0.0;
        if (disc >= 0.0) {
            double sq = std::sqrt(disc);
            double q = -0.5 * (qb + (qb >= 0 ? sq : -sq));
            if (q != 0.0) ws.push_back(q / qa);
            if (q != 0.0) ws.push_back(g0 / q);
            else ws.push_back(0.0);
        }
    }
    std::vector<std::array<double, 3>> out;
    for (double w : ws) out.push_back(at(w));
    return out;
}

// Newton steps on the four tangency equations in (x, y, z, param); keeps the best iterate.
void polish(const std::function<std::array<EqN, 4>(double)>& four_at, double p[3], double& prm) {
    auto resid = [&](const double q[4], double f[4]) {
        std::array<EqN, 4> e = four_at(q[3]);
        double m = 0.0;
        for (int i = 0; i < 4; ++i) {
            f[i] = e[static_cast<size_t>(i)].eval(q[0], q[1], q[2]);
            m = std::max(m, std::fabs(f[i]));
        }
        return m;
    };
    double q[4] = {p[0], p[1], p[2], prm}, f[4];
    double best = resid(q, f);
    for (int it = 0; it < 8 && best > 0.0; ++it) {
        std::array<EqN, 4> e = four_at(q[3]);
        double h = 1e-7 * std::max(1.0, std::fabs(q[3]));
        std::array<EqN, 4> ep = four_at(q[3] + h), em = four_at(q[3] - h);
        double J[4][5];
        for (int i = 0; i < 4; ++i) {
            const EqN& r = e[static_cast<size_t>(i)];
            J[i][0] = r.ax + (r.cone ? 2.0 * q[0] : 0.0);
            J[i][1] = r.ay + (r.cone ? 2.0 * q[1] : 0.0);
            J[i][2] = r.az - (r.cone ? 2.0 * q[2] : 0.0);
            J[i][3] = (ep[static_cast<size_t>(i)].eval(q[0], q[1], q[2]) -
                       em[static_cast<size_t>(i)].eval(q[0], q[1], q[2])) / (2.0 * h);
            J[i][4] = -f[i];
        }
        bool singular = false;
        for (int c = 0; c < 4 && !singular; ++c) {
            int piv = c;
            for (int r = c + 1; r < 4; ++r)
                if (std::fabs(J[r][c]) > std::fabs(J[piv][c])) piv = r;
            if (std::fabs(J[piv][c]) < 1e-300) singular = true;
            else {
                for (int k = 0; k < 5; ++k) std::swap(J[c][k], J[piv][k]);
                for (int r = 0; r < 4; ++r)
                    if (r != c) {
                        double m = J[r][c] / J[c][c];
                        for (int k = c; k < 5; ++k) J[r][k] -= m * J[c][k];
                    }
            }
        }
        if (singular) break;
        double n[4], g[4];
        for (int i = 0; i < 4; ++i) n[i] = q[i] + J[i][4] / J[i][i];
        double r = resid(n, g);
        if (!(r < best)) break;
        best = r;
        std::copy(n, n + 4, q);
        std::copy(g, g + 4, f);
    }
    p[0] = q[0];
    p[1] = q[1];
    p[2] = q[2];
    prm = q[3];
}

template <class R>
System<R> build_system(const std::vector<EqR<R>>& s1eq, const std::vector<EqR<R>>& s2eq) {
    // s1eq/s2eq are ordered cones first. Planes of lines, same-cluster cone differences, then
    // one cross difference as needed; the target is the first fixed cone (or fixed line).
    std::vector<EqR<R>> lin;
    bool any_cone = s1eq[0].cone || s2eq[0].cone;
    EqR<R> target = s1eq[0];
    for (size_t i = 0; i < 2; ++i)
        if (!s1eq[i].cone && !(i == 0 && !any_cone)) lin.push_back(s1eq[i]);
    for (size_t i = 0; i < 2; ++i)
        if (!s2eq[i].cone) lin.push_back(s2eq[i]);
    if (s1eq[0].cone && s1eq[1].cone) lin.push_back(diff(s1eq[0], s1eq[1]));
    if (s2eq[0].cone && s2eq[1].cone) lin.push_back(diff(s2eq[0], s2eq[1]));
    if (lin.size() < 3 && s1eq[0].cone && s2eq[0].cone) lin.push_back(diff(s1eq[0], s2eq[0]));
    if (lin.size() != 3) throw Error(ErrorCode::PlanError, "merge system does not reduce to three planes");
    return {{lin[0], lin[1], lin[2]}, target};
}

}  // namespace

MergeResult vcircle_merge(const std::array<Cyclo, 2>& s1_in, const std::array<Cyclo, 2>& s2_in,
                          const Cyclo& e0_fixed, const Cyclo& e0_moving) {
    if (cone_count(s2_in) > cone_count(s1_in)) {
        MergeResult r = vcircle_merge(s2_in, s1_in, e0_moving, e0_fixed);
        for (auto& slot : r.slots)
            if (slot) {
                slot->motion = slot->motion.inverse();
                slot->circle.c = slot->motion.apply(slot->circle.c);
            }
        r.solutions.clear();
        for (auto& slot : r.slots)
            if (slot) r.solutions.push_back(*slot);
        return r;
    }
    bool shared_line = e0_fixed.line;
    if (e0_moving.line != shared_line) throw Error(ErrorCode::KindMismatch, "shared element kinds differ");
    std::array<Cyclo, 2> s1 = cones_first(s1_in), s2 = cones_first(s2_in);
    MergeResult res;
    res.case_tag = merge_case_tag(shared_line, s1, s2);
    res.kind = shared_line ? MergeParam::Translation : MergeParam::Rotation;
    auto [m, n] = merge_degree_bound(res.case_tag);
    int per = shared_line ? m : 2 * n;
    int sheets = shared_line ? 2 : 1;

    Rigid t1 = to_canonical(e0_fixed, false);
    Rigid t1inv = t1.inverse();
    std::array<Cyclo, 2> f{apply(t1, s1[0]), apply(t1, s1[1])};
    std::vector<Cyclo> all{s1[0], s1[1], s2[0], s2[1]};
    int combos = orientation_combos(all);
    double scale = objects_scale(all);
    scale = std::max({scale, objects_scale({e0_fixed, e0_moving})});
    bool any_ok = false;

    for (int sheet = 0; sheet < sheets; ++sheet) {
        Rigid t2 = to_canonical(e0_moving, sheet == 1);
        std::array<Cyclo, 2> g{apply(t2, s2[0]), apply(t2, s2[1])};
        for (int k = 0; k < combos; ++k) {
            int sg[4];
            for (size_t i = 0; i < 4; ++i) sg[i] = orientation_sign(all, k, i);
            std::vector<double> params;
            std::function<std::array<EqN, 4>(double)> rows_at;  // three planes + target
            std::function<std::array<EqN, 4>(double)> four_at;
            MergePolynomial mp;
            mp.case_tag = res.case_tag;
            mp.kind = res.kind;
            mp.sheet = sheet;
            mp.combo = k;
            mp.bound = shared_line ? m : n;
            bool degenerate = false;
            bool rank2 = false;
            double ref = std::max(1.0, scale);
            if (shared_line) {
                std::vector<EqR<Poly>> a{fixed_eq<Poly>(f[0], sg[0]), fixed_eq<Poly>(f[1], sg[1])};
                std::vector<EqR<Poly>> b{moving_eq_translation(g[0], sg[2]), moving_eq_translation(g[1], sg[3])};
                System<Poly> sys = build_system(a, b);
                Poly D;
                Poly P = substitute(sys, D);
                if (D.max_abs() <= 1e-12 * ref * ref * ref) {
                    rank2 = rank_deficient_condition(sys, 1e-12 * std::pow(ref, 4), P);
                    degenerate = !rank2;
                }
                mp.poly = P.trimmed(1e-10);
                if (mp.poly.max_abs() <= 1e-12 * std::pow(ref, 6)) degenerate = true;
                mp.degree = mp.poly.degree();
                if (!degenerate) params = real_roots(mp.poly);
                rows_at = [sys](double t) {
                    return std::array<EqN, 4>{sys.rows[0].at(t), sys.rows[1].at(t), sys.rows[2].at(t), sys.target.at(t)};
                };
                four_at = [a, b](double t) { return std::array<EqN, 4>{a[0].at(t), a[1].at(t), b[0].at(t), b[1].at(t)}; };
            } else {
                std::vector<EqR<TrigPoly>> a{fixed_eq<TrigPoly>(f[0], sg[0]), fixed_eq<TrigPoly>(f[1], sg[1])};
                std::vector<EqR<TrigPoly>> b{moving_eq_rotation(g[0], sg[2]), moving_eq_rotation(g[1], sg[3])};
                System<TrigPoly> sys = build_system(a, b);
                TrigPoly D;
                TrigPoly P = substitute(sys, D);
                if (max_coef(D) <= 1e-12 * ref * ref * ref) {
                    rank2 = rank_deficient_condition(sys, 1e-12 * std::pow(ref, 4), P);
                    degenerate = !rank2;
                }
                mp.trig = P.trimmed(1e-10);
                if (max_coef(mp.trig) <= 1e-12 * std::pow(ref, 6)) degenerate = true;
                mp.degree = mp.trig.degree();
                mp.poly = mp.trig.to_half_tangent().trimmed(1e-10);
                if (!degenerate) {
                    for (double u : real_roots(mp.poly)) params.push_back(2.0 * std::atan(u));
                    if (std::fabs(mp.trig.eval(std::numbers::pi)) <= 1e-9 * max_coef(mp.trig))
                        params.push_back(std::numbers::pi);
                    std::sort(params.begin(), params.end());
                    params.erase(std::unique(params.begin(), params.end(),
                                             [](double x, double y) { return std::fabs(x - y) <= 1e-9; }),
                                 params.end());
                }
                rows_at = [sys](double t) {
                    return std::array<EqN, 4>{sys.rows[0].at(t), sys.rows[1].at(t), sys.rows[2].at(t), sys.target.at(t)};
                };
                four_at = [a, b](double t) { return std::array<EqN, 4>{a[0].at(t), a[1].at(t), b[0].at(t), b[1].at(t)}; };
            }
            res.polys.push_back(mp);
            if (degenerate) {
                for (int i = 0; i < per; ++i) res.slots.emplace_back();
                continue;
            }
            any_ok = true;
            std::vector<std::optional<MergeSolution>> slot(static_cast<size_t>(per));
            size_t used = 0;
            for (double root : params) {
                std::array<EqN, 4> rows = rows_at(root);
                std::vector<std::array<double, 3>> cands;
                if (rank2) cands = solve_rank2(rows);
                else if (double q[3]; solve3(rows[0], rows[1], rows[2], q)) cands.push_back({q[0], q[1], q[2]});
                for (const auto& cand : cands) {
                    if (used >= slot.size()) break;
                    double p[3] = {cand[0], cand[1], cand[2]};
                    double prm = root;
                    polish(four_at, p, prm);
                    std::array<EqN, 4> four = four_at(prm);
                    Circle c = make_circle(p[0], p[1], p[2], scale);
                    bool ok = true;
                    for (int i = 0; i < 4; ++i) {
                        const EqN& e = four[static_cast<size_t>(i)];
                        double v = e.eval(p[0], p[1], p[2]);
                        double nrm = e.cone ? std::max(1.0, scale * scale) : std::max(1.0, scale);
                        if (std::fabs(v) > 1e-8 * nrm) ok = false;
                    }
                    // points ignore orientation, so +z and -z name one circle
                    for (size_t u = 0; u < used && ok; ++u)
                        if (std::fabs(slot[u]->param - prm) <= 1e-12 * std::max(1.0, std::fabs(prm)) &&
                            norm(slot[u]->circle.c - t1inv.apply(c.c)) <= 1e-12 * scale &&
                            std::fabs(slot[u]->circle.r - c.r) <= 1e-12 * scale)
                            ok = false;
                    if (!ok) continue;
                    Rigid mot = shared_line ? Rigid::translation({prm, 0.0}) : Rigid::rotation(prm);
                    Rigid full = t2.then(mot).then(t1inv);
                    MergeSolution sol;
                    sol.sheet = sheet;
                    sol.combo = k;
                    sol.param = prm;
                    sol.motion = full;
                    sol.circle = c;
                    sol.circle.c = t1inv.apply(c.c);
                    slot[used++] = sol;
                }
            }
            for (auto& s : slot) {
                res.slots.push_back(s);
                if (s) res.solutions.push_back(*s);
            }
        }
    }
    if (!any_ok) throw Error(ErrorCode::DegenerateConfiguration, "merge planes are degenerate for every orientation");
    return res;
}

}  // namespace gcs
