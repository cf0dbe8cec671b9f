#pragma once

#include <vector>

namespace gcs {

// Dense univariate polynomial, coefficients in ascending order.
struct Poly {
    std::vector<double> c;

    Poly() = default;
    explicit Poly(std::vector<double> coeffs) : c(std::move(coeffs)) {}
    static Poly constant(double v) { return Poly({v}); }
    static Poly linear(double a0, double a1) { return Poly({a0, a1}); }

    int degree() const;  // -1 for the zero polynomial
    double eval(double x) const;
    double max_abs() const;
    Poly derivative() const;
    // Drop trailing coefficients below rel * max|coeff|.
    Poly trimmed(double rel = 1e-10) const;
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator-(const Poly& a);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(double s, const Poly& a);

// P(c) + s Q(c) with c = cos(theta), s = sin(theta), reduced by s^2 = 1 - c^2.
struct TrigPoly {
    Poly p;
    Poly q;

    static TrigPoly constant(double v) { return {Poly::constant(v), Poly{}}; }
    static TrigPoly cos_term(double a) { return {Poly({0.0, a}), Poly{}}; }
    static TrigPoly sin_term(double a) { return {Poly{}, Poly::constant(a)}; }

    double eval(double theta) const;
    // Trigonometric degree max(deg P, deg Q + 1).
    int degree() const;
    TrigPoly trimmed(double rel = 1e-10) const;
    // Multiply through by (1+u^2)^N with u = tan(theta/2).
    Poly to_half_tangent() const;
};

TrigPoly operator+(const TrigPoly& a, const TrigPoly& b);
TrigPoly operator-(const TrigPoly& a, const TrigPoly& b);
TrigPoly operator-(const TrigPoly& a);
TrigPoly operator*(const TrigPoly& a, const TrigPoly& b);
TrigPoly operator*(double s, const TrigPoly& a);

// Real roots of p, sorted ascending, clustered roots within 1e-9 merged.
std::vector<double> real_roots(const Poly& p);
std::vector<double> real_roots(const Poly& p, double lo, double hi);
double cauchy_bound(const Poly& p);

// Roots of a x^2 + b x + c with the cancellation-free formula. A discriminant within
// snap * scale^2 of zero is treated as a double root. Returns 0, 1 (linear) or 2 values.
struct QuadraticRoots {
    int count = 0;
    double r[2]{0.0, 0.0};
    bool double_root = false;
};
QuadraticRoots solve_quadratic(double a, double b, double c, double snap = 1e-12);

}  // namespace gcs
