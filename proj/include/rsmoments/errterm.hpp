#pragma once
// Riesz means D_rho(x), the calibrated error terms delta_0 and delta_1, the
// truncated oscillatory expansion R1(x;y), and the remainder R2 = delta_1 - R1.
//
// The two main-term constants are not evaluated analytically; they are fitted
// by least squares against high-order Riesz means (rho = 2 or 3, where the
// error term is two powers of x below the main term) and cross-checked
// between the two orders.  User-supplied constants are accepted as well.

#include <cstdint>
#include <vector>

#include "rsmoments/coeffs.hpp"
#include "rsmoments/dd.hpp"

namespace rsmoments {

enum class CalibrationMethod { fitted, user_supplied };

struct CalibrationConstants {
    double A = 0.0;  // coefficient of x^{rho+1}/(rho+1)! in D_rho
    double Z0 = 0.0; // coefficient of x^rho/rho!
    CalibrationMethod method = CalibrationMethod::user_supplied;
    int rho = 0;           // fitting order when fitted
    double residual = 0.0; // RMS of fit / xmax^{rho+1}
    double a_stderr = 0.0; // least-squares standard errors
    double z0_stderr = 0.0;
};

// requires A > 0; residual is zero by definition for supplied constants
CalibrationConstants user_calibration(double A, double Z0);

// Least-squares fit of D_rho against A x^{rho+1}/(rho+1)! + Z0 x^rho/rho!.
// Needs >= 8 samples covering at least one dyadic range inside the table.
// Fails loudly when the fitted A does not clear its standard error by 10x
// ("insufficient signal") or when the rho=2 and rho=3 fits disagree on A
// by more than 5x the combined room their misfit norms leave for moving
// the coefficient.
CalibrationConstants calibrate(const CoeffTable& ct, int rho,
                               const std::vector<double>& samples);

// D_rho(x) = (1/rho!) sum_{n<=x} (x-n)^rho c_n for rho in 0..3, evaluated
// from the prefix power sums by binomial expansion: O(1) per query.
// x below 1 gives the empty sum; x above the table throws.
double riesz_mean(const CoeffTable& ct, double x, int rho);
dd riesz_mean_dd(const CoeffTable& ct, double x, int rho);

// delta_1(x) = D_1(x) - A x^2/2 - Z0 x, assembled in double-double because
// the subtraction cancels roughly x^{7/8} of the leading digits
double delta1(const CoeffTable& ct, const CalibrationConstants& cal, double x);
dd delta1_dd(const CoeffTable& ct, const CalibrationConstants& cal, double x);

// R1(x;y) = x^{9/8}/(4 pi^2) sum_{n<=y} c_n n^{-7/8} cos(8 pi (nx)^{1/4} - pi/4).
// The phase is formed and reduced in double-double: at nx ~ 1e13 it reaches
// ~1e5 and plain double would surrender five digits.  y > x^2 is outside the
// expansion's validity; it warns on stderr and computes anyway.
double voronoi_R1(const CoeffTable& ct, double x, double y);

// R2(x;y) = delta_1(x) - R1(x;y)
double remainder_R2(const CoeffTable& ct, const CalibrationConstants& cal, double x,
                    double y);

struct ErrorSample {
    double x = 0.0;
    double D0 = 0.0, D1 = 0.0;
    double delta0 = 0.0; // D0 - A x  (jumps by c_n at integers)
    double delta1 = 0.0; // D1 - A x^2/2 - Z0 x
    bool has_R = false;
    double y = 0.0; // truncation used when has_R
    double R1 = 0.0, R2 = 0.0;
};

ErrorSample make_error_sample(const CoeffTable& ct, const CalibrationConstants& cal,
                              double x);
ErrorSample make_error_sample(const CoeffTable& ct, const CalibrationConstants& cal,
                              double x, double y);

} // namespace rsmoments
