#include "gcs/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace gcs {

int Poly::degree() const {
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
        if (c[static_cast<size_t>(i)] != 0.0) return i;
    return -1;
}

double Poly::eval(double x) const {
    double r = 0.0;
    for (size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

double Poly::max_abs() const {
    double m = 0.0;
    for (double v : c) m = std::max(m, std::fabs(v));
    return m;
}

Poly Poly::derivative() const {
    if (c.size() <= 1) return Poly{};
    std::vector<double> d(c.size() - 1);
    for (size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
    return Poly(d);
}

Poly Poly::trimmed(double rel) const {
    double cut = rel * max_abs();
    std::vector<double> out = c;
    while (!out.empty() && std::fabs(out.back()) <= cut) out.pop_back();
    return Poly(out);
}

Poly operator+(const Poly& a, const Poly& b) {
    std::vector<double> r(std::max(a.c.size(), b.c.size()), 0.0);
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
    return Poly(r);
}

Poly operator-(const Poly& a) {
    Poly r = a;
    for (double& v : r.c) v = -v;
    return r;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
    if (a.c.empty() || b.c.empty()) return Poly{};
    std::vector<double> r(a.c.size() + b.c.size() - 1, 0.0);
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return Poly(r);
}

Poly operator*(double s, const Poly& a) {
    Poly r = a;
    for (double& v : r.c) v *= s;
    return r;
}

double TrigPoly::eval(double theta) const { return p.eval(std::cos(theta)) + std::sin(theta) * q.eval(std::cos(theta)); }

int TrigPoly::degree() const {
    int dq = q.degree();
    return std::max(p.degree(), dq < 0 ? -1 : dq + 1);
}

TrigPoly TrigPoly::trimmed(double rel) const {
    double m = std::max(p.max_abs(), q.max_abs());
    double cut = rel * m;
    TrigPoly r = *this;
    while (!r.p.c.empty() && std::fabs(r.p.c.back()) <= cut) r.p.c.pop_back();
    while (!r.q.c.empty() && std::fabs(r.q.c.back()) <= cut) r.q.c.pop_back();
    return r;
}

Poly TrigPoly::to_half_tangent() const {
    int n = degree();
    if (n < 0) return Poly{};
    Poly one_minus({1.0, 0.0, -1.0});
    Poly one_plus({1.0, 0.0, 1.0});
    auto power = [](const Poly& b, int e) {
        Poly r = Poly::constant(1.0);
        for (int i = 0; i < e; ++i) r = r * b;
        return r;
    };
    Poly out;
    for (int k = 0; k <= p.degree(); ++k)
        out = out + p.c[static_cast<size_t>(k)] * (power(one_minus, k) * power(one_plus, n - k));
    Poly two_u({0.0, 2.0});
    for (int k = 0; k <= q.degree(); ++k)
        out = out + q.c[static_cast<size_t>(k)] * (two_u * power(one_minus, k) * power(one_plus, n - 1 - k));
    return out;
}

TrigPoly operator+(const TrigPoly& a, const TrigPoly& b) { return {a.p + b.p, a.q + b.q}; }
TrigPoly operator-(const TrigPoly& a) { return {-a.p, -a.q}; }
TrigPoly operator-(const TrigPoly& a, const TrigPoly& b) { return a + (-b); }
TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
    Poly sin2({1.0, 0.0, -1.0});
    return {a.p * b.p + sin2 * (a.q * b.q), a.p * b.q + a.q * b.p};
}
TrigPoly operator*(double s, const TrigPoly& a) { return {s * a.p, s * a.q}; }

double cauchy_bound(const Poly& p) {
    int n = p.degree();
    if (n <= 0) return 1.0;
    double lead = std::fabs(p.c[static_cast<size_t>(n)]);
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(p.c[static_cast<size_t>(i)]) / lead);
    return 1.0 + m;
}

namespace {

double bisect(const Poly& p, double lo, double hi) {
    double flo = p.eval(lo);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = p.eval(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-15 * std::max(1.0, std::fabs(lo))) break;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> isolate(const Poly& p, double lo, double hi, double zero_tol) {
    int n = p.degree();
    std::vector<double> out;
    if (n <= 0) return out;
    if (n == 1) {
        double x = -p.c[0] / p.c[1];
        if (x >= lo && x <= hi) out.push_back(x);
        return out;
    }
    std::vector<double> crit = isolate(p.derivative(), lo, hi, zero_tol);
    std::vector<double> pts{lo};
    pts.insert(pts.end(), crit.begin(), crit.end());
    pts.push_back(hi);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        double a = pts[i], b = pts[i + 1];
        double fa = p.eval(a), fb = p.eval(b);
        if (i > 0 && std::fabs(fa) <= zero_tol) {
            // Critical point touching zero: a multiple root.
            out.push_back(a);
            continue;
        }
        if (fa == 0.0) {
            out.push_back(a);
            continue;
        }
        if ((fa < 0) != (fb < 0) && fb != 0.0) out.push_back(bisect(p, a, b));
    }
    double fh = p.eval(hi);
    if (fh == 0.0) out.push_back(hi);
    return out;
}

}  // namespace

std::vector<double> real_roots(const Poly& p, double lo, double hi) {
    Poly t = p.trimmed(1e-10);
    if (t.degree() <= 0) return {};
    double scale = t.max_abs();
    // Multiple-root band for critical values, relative to coefficient size.
    double zero_tol = 1e-11 * scale;
    std::vector<double> r = isolate(t, lo, hi, zero_tol);
    std::sort(r.begin(), r.end());
    std::vector<double> merged;
    for (double x : r) {
        if (!merged.empty() && std::fabs(x - merged.back()) <= 1e-9 * std::max(1.0, std::fabs(x)))
            continue;
        merged.push_back(x);
    }
    return merged;
}

std::vector<double> real_roots(const Poly& p) {
    Poly t = p.trimmed(1e-10);
    double b = cauchy_bound(t);
    return real_roots(t, -b, b);
}

QuadraticRoots solve_quadratic(double a, double b, double c, double snap) {
    QuadraticRoots out;
    double scale = std::max({std::fabs(a), std::fabs(b), std::fabs(c)});
    if (scale == 0.0) return out;
    if (std::fabs(a) <= 1e-14 * scale) {
        if (b == 0.0) return out;
        out.count = 1;
        out.r[0] = -c / b;
        return out;
    }
    double disc = b * b - 4.0 * a * c;
    double dscale = std::max(b * b, std::fabs(4.0 * a * c));
    if (std::fabs(disc) <= snap * dscale) disc = 0.0;
    if (disc < 0.0) return out;
    if (disc == 0.0) {
        out.count = 2;
        out.double_root = true;
        out.r[0] = out.r[1] = -b / (2.0 * a);
        return out;
    }
    double sq = std::sqrt(disc);
    double q = -0.5 * (b + (b >= 0 ? sq : -sq));
    double x1 = q / a;
    double x2 = (q != 0.0) ? c / q : -x1;
    out.count = 2;
    out.r[0] = std::min(x1, x2);
    out.r[1] = std::max(x1, x2);
    return out;
}

}  // namespace gcs
