#pragma once
// double-double arithmetic (~106-bit significand).  Used wherever plain
// doubles would lose the quantity of interest to cancellation: phase
// reduction of large oscillatory arguments, x*S0 - S1 style differences,
// and prefix-sum accumulation.  Algorithms are the standard error-free
// transformations (Knuth two_sum, FMA two_prod, Dekker/Bailey add and mul).
//
// Not valid under -ffast-math; the build never enables it.

#include <cmath>
#include <cstdint>

namespace rsmoments {

struct dd {
    double hi = 0.0;
    double lo = 0.0;

    constexpr dd() = default;
    constexpr dd(double h) : hi(h), lo(0.0) {}
    constexpr dd(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }
};

inline dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

// requires |a| >= |b| (or a == 0)
inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline dd dd_add(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    dd t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd dd_add(dd a, double b) {
    dd s = two_sum(a.hi, b);
    s.lo += a.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd dd_neg(dd a) { return {-a.hi, -a.lo}; }
inline dd dd_sub(dd a, dd b) { return dd_add(a, dd_neg(b)); }
inline dd dd_sub(dd a, double b) { return dd_add(a, -b); }

inline dd dd_mul(dd a, dd b) {
    dd p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline dd dd_mul(dd a, double b) {
    dd p = two_prod(a.hi, b);
    p.lo += a.lo * b;
    return quick_two_sum(p.hi, p.lo);
}

inline dd dd_div(dd a, dd b) {
    double q1 = a.hi / b.hi;
    dd r = dd_sub(a, dd_mul(b, q1));
    double q2 = r.hi / b.hi;
    r = dd_sub(r, dd_mul(b, q2));
    double q3 = r.hi / b.hi;
    dd q = quick_two_sum(q1, q2);
    return dd_add(q, q3);
}

inline dd dd_sqrt(dd a) {
    if (a.hi == 0.0) return {0.0, 0.0};
    double y = std::sqrt(a.hi);
    // one Newton step in dd: y + (a - y^2) / (2y)
    dd r = dd_sub(a, two_prod(y, y));
    return dd_add(dd(y), dd{r.hi / (2.0 * y), r.lo / (2.0 * y)});
}

inline dd dd_abs(dd a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? dd_neg(a) : a; }

inline int dd_cmp(dd a, dd b) {
    if (a.hi < b.hi) return -1;
    if (a.hi > b.hi) return 1;
    if (a.lo < b.lo) return -1;
    if (a.lo > b.lo) return 1;
    return 0;
}

inline bool dd_less(dd a, dd b) { return dd_cmp(a, b) < 0; }

// integer power by squaring
inline dd dd_powi(dd a, unsigned e) {
    dd r(1.0);
    while (e) {
        if (e & 1u) r = dd_mul(r, a);
        a = dd_mul(a, a);
        e >>= 1;
    }
    return r;
}

// exact dd value of a 64-bit unsigned (64 <= 106 bits, two 32-bit halves)
inline dd dd_from_u64(std::uint64_t v) {
    double hi32 = static_cast<double>(v >> 32);
    double lo32 = static_cast<double>(v & 0xffffffffu);
    return dd_add(dd_mul(dd(hi32), 4294967296.0), dd(lo32));
}

// x^{1/4} via two square roots
inline dd dd_fourth_root(dd a) { return dd_sqrt(dd_sqrt(a)); }

// pi to dd precision (hi = nearest double, lo = residual)
inline constexpr dd dd_pi{3.141592653589793116, 1.2246467991473531772e-16};
inline constexpr dd dd_two_pi{6.283185307179586232, 2.4492935982947063545e-16};

// cos/sin of a dd angle of arbitrary magnitude: reduce mod 2*pi in dd, then
// correct the double cosine by the first-order term in the low part.
inline double dd_cos_reduced(dd phi) {
    double n = std::nearbyint(double(dd_div(phi, dd_two_pi)));
    dd r = dd_sub(phi, dd_mul(dd_two_pi, n));
    return std::cos(r.hi) - r.lo * std::sin(r.hi);
}

inline double dd_sin_reduced(dd phi) {
    double n = std::nearbyint(double(dd_div(phi, dd_two_pi)));
    dd r = dd_sub(phi, dd_mul(dd_two_pi, n));
    return std::sin(r.hi) + r.lo * std::cos(r.hi);
}

} // namespace rsmoments
