#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gcs {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 rotate(Vec2 a, double c, double s) { return {c * a.x - s * a.y, s * a.x + c * a.y}; }

// Twice the signed area of (a, b, c); positive when c is left of a->b.
inline double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

// Line {p : dot(n, p) = d} with unit normal n; n is the left normal of direction().
struct Line2 {
    Vec2 n{0.0, 1.0};
    double d = 0.0;

    Vec2 direction() const { return {n.y, -n.x}; }
    double signed_distance(Vec2 p) const { return dot(n, p) - d; }
    Vec2 foot(Vec2 p) const { return p - signed_distance(p) * n; }
    Vec2 anchor() const { return d * n; }
    Line2 reversed() const { return {-n, -d}; }

    static Line2 through(Vec2 p, Vec2 dir) {
        double len = norm(dir);
        Vec2 u = (1.0 / len) * dir;
        Vec2 nn = perp(u);
        return {nn, dot(nn, p)};
    }
};

// Directed angle from line a to line b, reduced to [0, pi).
inline double line_angle(const Line2& a, const Line2& b) {
    double t = std::atan2(cross(a.n, b.n), dot(a.n, b.n));
    t = std::fmod(t, std::numbers::pi);
    if (t < 0) t += std::numbers::pi;
    if (t >= std::numbers::pi) t -= std::numbers::pi;
    return t;
}

// Distance between two angles modulo pi.
inline double angle_gap_mod_pi(double a, double b) {
    double t = std::fmod(std::fabs(a - b), std::numbers::pi);
    return std::min(t, std::numbers::pi - t);
}

inline bool line_intersection(const Line2& a, const Line2& b, Vec2& out) {
    double det = cross(a.n, b.n);
    if (std::fabs(det) < 1e-14) return false;
    out = {(a.d * b.n.y - b.d * a.n.y) / det, (a.n.x * b.d - b.n.x * a.d) / det};
    return true;
}

// Proper rigid motion p -> R p + t.
struct Rigid {
    double c = 1.0;
    double s = 0.0;
    Vec2 t{};

    Vec2 apply(Vec2 p) const { return rotate(p, c, s) + t; }
    Vec2 apply_dir(Vec2 v) const { return rotate(v, c, s); }
    Line2 apply(const Line2& l) const {
        Vec2 nn = rotate(l.n, c, s);
        return {nn, l.d + dot(nn, t)};
    }
    Rigid then(const Rigid& o) const {
        // o after this
        Rigid r;
        r.c = o.c * c - o.s * s;
        r.s = o.s * c + o.c * s;
        r.t = o.apply(t);
        return r;
    }
    Rigid inverse() const {
        Rigid r;
        r.c = c;
        r.s = -s;
        r.t = -rotate(t, c, -s);
        return r;
    }
    static Rigid rotation(double theta) { return {std::cos(theta), std::sin(theta), {}}; }
    static Rigid translation(Vec2 v) { return {1.0, 0.0, v}; }
};

}  // namespace gcs
