#pragma once
// Moment integrals of the error term and its truncated-expansion pieces.
//
// Between consecutive integers delta_1 is exactly a quadratic polynomial, so
// delta_1^k restricted to a unit interval is a polynomial of degree 2k and a
// fixed Gauss-Legendre rule integrates it with no discretization error at
// all.  Everything here leans on that: moments are sums of per-interval
// quadratures, accumulated with compensated addition, cut into a fixed block
// grid so the result does not depend on the worker count.
//
// R1 is different: it oscillates but is not piecewise polynomial and a point
// evaluation costs O(y) cosines.  The R1Model surrogate fits Chebyshev
// polynomials per panel in the fourth-root variable u = x^{1/4}, where every
// term of the series has a fixed frequency, and brings the cost per
// evaluation down to one Clenshaw recurrence.

#include <cstdint>
#include <functional>
#include <vector>

#include "rsmoments/coeffs.hpp"
#include "rsmoments/errterm.hpp"

namespace rsmoments {

struct MomentReport {
    int k = 0;              // power of the integrand
    double T1 = 0.0, T2 = 0.0;
    bool has_y = false;     // set by the R1/R2 variants
    double y = 0.0;
    bool regime_warning = false; // y outside the regime the scaling law covers
    double integral = 0.0;      // signed integral of f^k
    double abs_integral = 0.0;  // integral of |f|^k; equals `integral` for even k
    double abs_prev = 0.0;      // integral of |f|^{k-1}, feeds cal_sensitivity
    double prediction = 0.0;    // main-term prediction or scaling baseline, 0 if none
    double prediction_dyadic = 0.0; // closed dyadic-window form evaluated at T1
    double ratio = 0.0;         // integral / prediction when prediction != 0
    // first-order bound on how far the fitted-constant standard errors can
    // move the integral: k * (a_err*T2^2/2 + z0_err*T2) * integral |f|^{k-1}
    double cal_sensitivity = 0.0;
    std::uint64_t intervals = 0;
    int nodes = 0;              // quadrature nodes per unit interval
    double seconds = 0.0;
};

// Generic engine and test hook: integrate f(x)^k over [T1,T2] with an m-node
// Gauss rule on every unit interval (boundary intervals scaled down).
MomentReport integrate_power(const std::function<double(double)>& f, int k,
                             double T1, double T2, int nodes, unsigned threads = 0);

// Integral of delta_1^k, k in 1..6, over [T1,T2] inside the table.  Exact
// up to rounding by the piecewise-polynomial argument above.
MomentReport integrate_delta1_power(const CoeffTable& ct, const CalibrationConstants& cal,
                                    int k, double T1, double T2, unsigned threads = 0);

// Same integral for k in 3..5, compared against the main-term prediction
// B_k/((2 pi)^{2k} 2^{k-1}) * (T2^e - T1^e)/e with e = 1 + 9k/8.  The report
// also carries the closed dyadic-window normalization coefficient * T1^e in
// prediction_dyadic; the two differ by the factor (2^e - 1) on [T,2T] and
// only the integrated form is additive, so `ratio` targets that one.
// Bk_value <= 0: no asymptotic to compare against; prediction and ratio stay
// zero and the raw integrals are still reported.
MomentReport verify_theorem(int k, const CoeffTable& ct, const CalibrationConstants& cal,
                            double Bk_value, double T1, double T2, unsigned threads = 0);

// Integral of delta_1^2 over [1,T] against (2/13)(2pi)^{-4} S T^{13/4} with
// S the truncated series sum_{n<=N} c_n^2 n^{-7/4} over the whole table.
MomentReport second_moment(const CoeffTable& ct, const CalibrationConstants& cal,
                           double T, unsigned threads = 0);

// Piecewise Chebyshev surrogate for R1(x;y) on [x1,x2].  Panels in u = x^{1/4}
// are sized to about two periods of the fastest term, 8 pi y^{1/4} in u, and
// a degree-27 fit per panel reproduces the series to ~1e-13 of its amplitude.
class R1Model {
  public:
    R1Model(const CoeffTable& ct, double y, double x1, double x2, unsigned threads = 0);
    double operator()(double x) const;
    int panels() const { return npanels_; }
    std::uint64_t terms() const { return ny_; }

  private:
    double u1_ = 0.0, width_ = 0.0;
    int npanels_ = 0;
    std::uint64_t ny_ = 0;
    std::vector<double> coef_; // npanels * kCoeffs Chebyshev coefficients
};

// Integral of |R1(x;y)|^{2l} over [T,2T], twol in {2,4,6}, against the
// scaling baseline T^{1+9l/4}.  y > sqrt(T) is outside the regime of the
// baseline and sets regime_warning.  cal is unused: R1 does not depend on
// the fitted constants.
MomentReport moment_R1(const CoeffTable& ct, const CalibrationConstants& cal,
                       int twol, double T, double y, unsigned threads = 0);

// Integral of R2(x;y)^k = (delta_1 - R1)^k over [T,2T], k in 2..5, against
// the baselines T^{13/4} y^{-3/4}, T^{35/8} y^{-9/8}, T^{11/2} y^{-3/2},
// T^{53/8} y^{-3/8}.  y > T^{1/12} sets regime_warning.  y < 1 leaves the
// truncated sum empty, so the result is the plain delta_1 moment.
MomentReport moment_R2(const CoeffTable& ct, const CalibrationConstants& cal,
                       int k, double T, double y, unsigned threads = 0);

enum class OscKind { cosine, sine };

struct OscillatoryBound {
    double alpha = 0.0, beta = 0.0, T = 0.0;
    OscKind kind = OscKind::cosine;
    double integral = 0.0; // integral over [T,2T] of x^alpha g(2 pi beta x^{1/4})
    double bound = 0.0;    // first-derivative-test scale T^{alpha+3/4}/|beta|
    double ratio = 0.0;    // |integral| / bound
    bool exact = false;    // integration by parts (true) or adaptive quadrature
};

// Substitutes u = x^{1/4}, turning the integral into 4 int u^{4a+3} g(2 pi b u) du.
// When 4a+3 is a nonnegative integer that is integrated by parts exactly;
// otherwise adaptive Simpson takes over.  b = 0 has no oscillation to bound
// and is a domain error.
OscillatoryBound oscillatory_bound(double alpha, double beta, double T, OscKind kind);

} // namespace rsmoments
