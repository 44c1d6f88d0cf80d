#pragma once

// Second-order forward-mode dual numbers over (x, y): value, gradient, and
// Hessian propagate through arithmetic and elementary functions.  Used to
// generate reference derivative values for manufactured fields, independent
// of every stencil in the library.

#include <cmath>

namespace testsupport {

struct Dual2 {
    double v = 0.0;
    double gx = 0.0, gy = 0.0;
    double hxx = 0.0, hxy = 0.0, hyy = 0.0;

    static Dual2 var_x(double x) { return {x, 1.0, 0.0, 0.0, 0.0, 0.0}; }
    static Dual2 var_y(double y) { return {y, 0.0, 1.0, 0.0, 0.0, 0.0}; }
    static Dual2 constant(double c) { return {c, 0.0, 0.0, 0.0, 0.0, 0.0}; }
};

inline Dual2 operator+(const Dual2& a, const Dual2& b) {
    return {a.v + b.v, a.gx + b.gx, a.gy + b.gy, a.hxx + b.hxx, a.hxy + b.hxy, a.hyy + b.hyy};
}
inline Dual2 operator-(const Dual2& a, const Dual2& b) {
    return {a.v - b.v, a.gx - b.gx, a.gy - b.gy, a.hxx - b.hxx, a.hxy - b.hxy, a.hyy - b.hyy};
}
inline Dual2 operator-(const Dual2& a) { return {-a.v, -a.gx, -a.gy, -a.hxx, -a.hxy, -a.hyy}; }
inline Dual2 operator*(const Dual2& a, const Dual2& b) {
    return {a.v * b.v,
            a.gx * b.v + a.v * b.gx,
            a.gy * b.v + a.v * b.gy,
            a.hxx * b.v + 2.0 * a.gx * b.gx + a.v * b.hxx,
            a.hxy * b.v + a.gx * b.gy + a.gy * b.gx + a.v * b.hxy,
            a.hyy * b.v + 2.0 * a.gy * b.gy + a.v * b.hyy};
}
inline Dual2 operator*(double c, const Dual2& a) {
    return {c * a.v, c * a.gx, c * a.gy, c * a.hxx, c * a.hxy, c * a.hyy};
}
inline Dual2 operator*(const Dual2& a, double c) { return c * a; }
inline Dual2 operator+(const Dual2& a, double c) {
    Dual2 r = a;
    r.v += c;
    return r;
}
inline Dual2 operator+(double c, const Dual2& a) { return a + c; }
inline Dual2 operator-(const Dual2& a, double c) { return a + (-c); }
inline Dual2 operator-(double c, const Dual2& a) { return (-a) + c; }

// chain rule for a scalar function with derivatives f1 = f'(a.v), f2 = f''(a.v)
inline Dual2 chain(const Dual2& a, double f0, double f1, double f2) {
    return {f0,
            f1 * a.gx,
            f1 * a.gy,
            f1 * a.hxx + f2 * a.gx * a.gx,
            f1 * a.hxy + f2 * a.gx * a.gy,
            f1 * a.hyy + f2 * a.gy * a.gy};
}

inline Dual2 exp(const Dual2& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}
inline Dual2 sin(const Dual2& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Dual2 cos(const Dual2& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Dual2 pow(const Dual2& a, double e) {
    return chain(a, std::pow(a.v, e), e * std::pow(a.v, e - 1.0),
                 e * (e - 1.0) * std::pow(a.v, e - 2.0));
}
inline Dual2 operator/(const Dual2& a, const Dual2& b) {
    return a * chain(b, 1.0 / b.v, -1.0 / (b.v * b.v), 2.0 / (b.v * b.v * b.v));
}

/// Reference value of the evolution operator
///   A u = -(p-2)|grad u|^(p-4) (grad u . Hess u . grad u) - |grad u|^(p-2) Lap u - eps Lap u
/// at one point, from exact derivatives of the manufactured field.
inline double reference_apply_A(const Dual2& u, double p, double eps) {
    const double m = u.gx * u.gx + u.gy * u.gy;
    const double lap = u.hxx + u.hyy;
    const double quad =
        u.gx * u.gx * u.hxx + 2.0 * u.gx * u.gy * u.hxy + u.gy * u.gy * u.hyy;
    double val = 0.0;
    if (m > 0.0)
        val = -(p - 2.0) * std::pow(m, 0.5 * p - 2.0) * quad - std::pow(m, 0.5 * (p - 2.0)) * lap;
    return val - eps * lap;
}

/// Reference drift component i of grad(|grad u|^(p-2)).
inline void reference_drift(const Dual2& u, double p, double& bx, double& by) {
    const double m = u.gx * u.gx + u.gy * u.gy;
    if (!(m > 0.0)) {
        bx = by = 0.0;
        return;
    }
    const double c = (p - 2.0) * std::pow(m, 0.5 * p - 2.0);
    bx = c * (u.gx * u.hxx + u.gy * u.hxy);
    by = c * (u.gx * u.hxy + u.gy * u.hyy);
}

}  // namespace testsupport
