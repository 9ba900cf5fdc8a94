#include "rsmoments/errterm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "rsmoments/kahan.hpp"

namespace rsmoments {

namespace {

void check_x(const CoeffTable& ct, double x) {
    if (!(x >= 0.0) || x > double(ct.size()))
        throw std::out_of_range("x = " + std::to_string(x) +
                                " outside the table range [0, " +
                                std::to_string(ct.size()) + "]");
}

constexpr double kFact[6] = {1, 1, 2, 6, 24, 120}; // n!, so Gamma(rho+2) = kFact[rho+1]

} // namespace

dd riesz_mean_dd(const CoeffTable& ct, double x, int rho) {
    if (rho < 0 || rho > 3) throw std::invalid_argument("rho must be in 0..3");
    check_x(ct, x);
    if (x < 1.0) return dd{};
    const std::uint64_t j = std::uint64_t(x);
    const dd S0 = ct.prefix(0, j), S1 = ct.prefix(1, j);
    switch (rho) {
        case 0: return S0;
        case 1: return dd_sub(dd_mul(S0, x), S1);
        case 2: {
            const dd xx = two_prod(x, x);
            dd t = dd_mul(S0, xx);
            t = dd_sub(t, dd_mul(dd_mul(S1, x), 2.0));
            t = dd_add(t, ct.prefix(2, j));
            return dd_mul(t, 0.5);
        }
        default: {
            const dd xx = two_prod(x, x);
            dd t = dd_mul(S0, dd_mul(xx, x));
            t = dd_sub(t, dd_mul(dd_mul(S1, xx), 3.0));
            t = dd_add(t, dd_mul(dd_mul(ct.prefix(2, j), x), 3.0));
            t = dd_sub(t, ct.prefix(3, j));
            return dd_mul(t, 1.0 / 6.0);
        }
    }
}

double riesz_mean(const CoeffTable& ct, double x, int rho) {
    return double(riesz_mean_dd(ct, x, rho));
}

dd delta1_dd(const CoeffTable& ct, const CalibrationConstants& cal, double x) {
    const dd D1 = riesz_mean_dd(ct, x, 1);
    const dd half_main = dd_mul(dd_mul(two_prod(x, x), cal.A), 0.5);
    return dd_sub(dd_sub(D1, half_main), two_prod(cal.Z0, x));
}

double delta1(const CoeffTable& ct, const CalibrationConstants& cal, double x) {
    return double(delta1_dd(ct, cal, x));
}

double voronoi_R1(const CoeffTable& ct, double x, double y) {
    if (!(x > 0.0)) throw std::domain_error("R1 needs x > 0");
    if (!(y >= 0.0) || y > double(ct.size()))
        throw std::out_of_range("truncation y outside the table range");
    if (y > x * x)
        std::fprintf(stderr,
                     "rsmoments: warning: truncation y=%g exceeds x^2=%g, outside the "
                     "expansion's validity range\n",
                     y, x * x);
    if (y < 1.0) return 0.0;

    static const dd eight_pi = dd_mul(dd_two_pi, 4.0);
    static const dd quarter_pi = dd_mul(dd_pi, 0.25);
    CompensatedSum s;
    const std::uint64_t ny = std::uint64_t(y);
    for (std::uint64_t n = 1; n <= ny; ++n) {
        const dd root = dd_fourth_root(two_prod(double(n), x));
        const double c = dd_cos_reduced(dd_sub(dd_mul(root, eight_pi), quarter_pi));
        s.add(ct.c(n) * std::pow(double(n), -0.875) * c);
    }
    return std::pow(x, 1.125) / (4.0 * M_PI * M_PI) * s.result();
}

double remainder_R2(const CoeffTable& ct, const CalibrationConstants& cal, double x,
                    double y) {
    return delta1(ct, cal, x) - voronoi_R1(ct, x, y);
}

CalibrationConstants user_calibration(double A, double Z0) {
    if (!(A > 0.0)) throw std::invalid_argument("the mean coefficient A must be positive");
    CalibrationConstants c;
    c.A = A;
    c.Z0 = Z0;
    c.method = CalibrationMethod::user_supplied;
    return c;
}

namespace {

struct Fit {
    double A, Z0, rms, residual, a_stderr, z0_stderr;
    // largest change of A any misfit vector of the observed norm can
    // induce (Cauchy-Schwarz against the A row of the pseudoinverse)
    double a_shift_bound;
};

// two-parameter least squares of D_rho against (x^{rho+1}/(rho+1)!,
// x^rho/rho!); plain normal equations, accumulated in long double
Fit fit_riesz(const CoeffTable& ct, int rho, const std::vector<double>& xs) {
    long double suu = 0, suv = 0, svv = 0, suy = 0, svy = 0;
    double xmax = 0.0;
    for (double x : xs) {
        const long double y = (long double)riesz_mean(ct, x, rho);
        const long double u = powl((long double)x, rho + 1) / kFact[rho + 1];
        const long double v = powl((long double)x, rho) / kFact[rho];
        suu += u * u;
        suv += u * v;
        svv += v * v;
        suy += u * y;
        svy += v * y;
        xmax = std::max(xmax, x);
    }
    const long double det = suu * svv - suv * suv;
    if (!(det > 1e-20L * suu * svv))
        throw std::runtime_error(
            "calibration is ill-conditioned: samples need two distinct scales");
    const double A = double((svv * suy - suv * svy) / det);
    const double Z0 = double((suu * svy - suv * suy) / det);

    long double rss = 0;
    for (double x : xs) {
        const long double r = (long double)riesz_mean(ct, x, rho) -
                              A * powl((long double)x, rho + 1) / kFact[rho + 1] -
                              Z0 * powl((long double)x, rho) / kFact[rho];
        rss += r * r;
    }
    Fit f;
    f.A = A;
    f.Z0 = Z0;
    f.rms = double(sqrtl(rss / xs.size()));
    f.residual = f.rms / std::pow(xmax, rho + 1);
    const long double sigma2 = rss / std::max<std::size_t>(1, xs.size() - 2);
    f.a_stderr = double(sqrtl(sigma2 * svv / det));
    f.z0_stderr = double(sqrtl(sigma2 * suu / det));
    f.a_shift_bound = double(sqrtl(rss * svv / det));
    return f;
}

} // namespace

CalibrationConstants calibrate(const CoeffTable& ct, int rho,
                               const std::vector<double>& samples) {
    if (rho != 2 && rho != 3)
        throw std::invalid_argument("calibration fits Riesz order 2 or 3");
    if (samples.size() < 8)
        throw std::invalid_argument("calibration needs at least 8 samples");
    double lo = samples[0], hi = samples[0];
    for (double x : samples) {
        check_x(ct, x);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (!(hi >= 2.0 * lo))
        throw std::runtime_error(
            "calibration samples must span at least one dyadic range");

    const Fit f = fit_riesz(ct, rho, samples);
    // the fitted coefficient must clear its own standard error by a decade,
    // else the x^{rho+1} term is indistinguishable from noise
    if (!(f.A > 10.0 * f.a_stderr))
        throw std::runtime_error("insufficient signal: the x^" +
                                 std::to_string(rho + 1) +
                                 " main term does not rise above the fit noise");

    // the same A must emerge from the other Riesz order, within the room
    // each order's misfit leaves for moving the coefficient
    const int other = rho == 2 ? 3 : 2;
    const Fit g = fit_riesz(ct, other, samples);
    const double tol = 5.0 * (f.a_shift_bound + g.a_shift_bound);
    if (std::abs(f.A - g.A) > tol)
        throw std::runtime_error("calibration cross-check failed: orders 2 and 3 give A=" +
                                 std::to_string(rho == 2 ? f.A : g.A) + " and A=" +
                                 std::to_string(rho == 2 ? g.A : f.A) +
                                 ", apart by more than " + std::to_string(tol));

    CalibrationConstants c;
    c.A = f.A;
    c.Z0 = f.Z0;
    c.method = CalibrationMethod::fitted;
    c.rho = rho;
    c.residual = f.residual;
    c.a_stderr = f.a_stderr;
    c.z0_stderr = f.z0_stderr;
    return c;
}

ErrorSample make_error_sample(const CoeffTable& ct, const CalibrationConstants& cal,
                              double x) {
    ErrorSample s;
    s.x = x;
    const dd D0 = riesz_mean_dd(ct, x, 0);
    s.D0 = double(D0);
    s.D1 = riesz_mean(ct, x, 1);
    s.delta0 = double(dd_sub(D0, two_prod(cal.A, x)));
    s.delta1 = delta1(ct, cal, x);
    return s;
}

ErrorSample make_error_sample(const CoeffTable& ct, const CalibrationConstants& cal,
                              double x, double y) {
    ErrorSample s = make_error_sample(ct, cal, x);
    s.has_R = true;
    s.y = y;
    s.R1 = voronoi_R1(ct, x, y);
    s.R2 = s.delta1 - s.R1;
    return s;
}

} // namespace rsmoments
