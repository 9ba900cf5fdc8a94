#include "rsmoments/moments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "rsmoments/constants.hpp"
#include "rsmoments/gauss.hpp"
#include "rsmoments/kahan.hpp"
#include "rsmoments/parallel.hpp"

namespace rsmoments {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

constexpr int kChebPts = 32;    // samples per panel
constexpr int kChebCoeffs = 28; // kept coefficients, degree 27

struct Accum {
    CompensatedSum pk;    // f^k
    CompensatedSum apk;   // |f|^k
    CompensatedSum aprev; // |f|^{k-1}
};

// f^k over [T1,T2], one scaled Gauss rule per unit interval.  The block grid
// depends only on the range, workers fill disjoint slots, and the slots merge
// in index order, so the result is the same for any thread count.
template <class F>
std::uint64_t integrate_grid(const F& f, int k, double T1, double T2,
                             const GaussRule& g, unsigned threads, Accum& total) {
    const std::uint64_t j0 = (std::uint64_t)std::floor(T1);
    const std::uint64_t cells = (std::uint64_t)std::ceil(T2) - j0;
    const std::size_t nblocks = (std::size_t)std::min<std::uint64_t>(512, 1 + cells / 2048);
    const int m = (int)g.x.size();
    std::vector<Accum> slots(nblocks);
    parallel_blocks(nblocks, threads, [&](std::size_t b) {
        auto [lo, hi] = block_range(cells, nblocks, b);
        Accum acc;
        for (std::uint64_t cell = lo; cell < hi; ++cell) {
            const double a = std::max(T1, double(j0 + cell));
            const double bnd = std::min(T2, double(j0 + cell + 1));
            if (!(bnd > a)) continue;
            const double mid = 0.5 * (a + bnd), hw = 0.5 * (bnd - a);
            double sk = 0.0, sak = 0.0, sprev = 0.0;
            for (int i = 0; i < m; ++i) {
                const double v = f(mid + hw * g.x[i]);
                double p = 1.0;
                for (int e = 1; e < k; ++e) p *= v;
                sk += g.w[i] * (p * v);
                sak += g.w[i] * std::fabs(p * v);
                sprev += g.w[i] * std::fabs(p);
            }
            acc.pk.add(sk * hw);
            acc.apk.add(sak * hw);
            acc.aprev.add(sprev * hw);
        }
        slots[b] = acc;
    });
    for (const Accum& s : slots) {
        total.pk.add(s.pk);
        total.apk.add(s.apk);
        total.aprev.add(s.aprev);
    }
    return cells;
}

template <class F>
MomentReport run_moment(const F& f, int k, double T1, double T2, int nodes,
                        unsigned threads) {
    const auto t0 = std::chrono::steady_clock::now();
    MomentReport rep;
    rep.k = k;
    rep.T1 = T1;
    rep.T2 = T2;
    rep.nodes = nodes;
    Accum total;
    rep.intervals = integrate_grid(f, k, T1, T2, gauss_rule(nodes), threads, total);
    rep.integral = total.pk.result();
    rep.abs_integral = total.apk.result();
    rep.abs_prev = total.aprev.result();
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

void check_power(int k, int lo, int hi, const char* who) {
    if (k < lo || k > hi)
        throw std::invalid_argument(std::string(who) + ": power out of range");
}

void check_range(double T1, double T2, double N, const char* who) {
    if (!(T1 >= 1.0) || !(T2 > T1))
        throw std::invalid_argument(std::string(who) + ": need 1 <= T1 < T2");
    if (!(T2 <= N))
        throw std::out_of_range(std::string(who) + ": range ends beyond the coefficient table");
}

double sensitivity(int k, double T2, const CalibrationConstants& cal, double abs_prev) {
    return k * (0.5 * cal.a_stderr * T2 * T2 + cal.z0_stderr * T2) * abs_prev;
}

// extra quadrature nodes when the integrand carries a cos(8 pi (n x)^{1/4})
// factor: the phase moves at most 2 pi y^{1/4} T^{-3/4} per unit of x, and
// the k-th power multiplies that by k
int oscillation_nodes(int k, double T, double y) {
    if (y < 1.0) return k + 2;
    const double omega = 2.0 * kPi * std::pow(y, 0.25) * std::pow(T, -0.75);
    return std::min(24, k + 2 + (int)std::ceil(2.0 * k * omega));
}

} // namespace

MomentReport integrate_power(const std::function<double(double)>& f, int k,
                             double T1, double T2, int nodes, unsigned threads) {
    check_power(k, 1, 8, "integrate_power");
    if (!(T1 >= 0.0) || !(T2 > T1))
        throw std::invalid_argument("integrate_power: need 0 <= T1 < T2");
    if (nodes < k + 2)
        throw std::invalid_argument("integrate_power: too few nodes for the integrand degree");
    return run_moment(f, k, T1, T2, nodes, threads);
}

MomentReport integrate_delta1_power(const CoeffTable& ct, const CalibrationConstants& cal,
                                    int k, double T1, double T2, unsigned threads) {
    check_power(k, 1, 6, "integrate_delta1_power");
    check_range(T1, T2, double(ct.size()), "integrate_delta1_power");
    auto f = [&](double x) { return delta1(ct, cal, x); };
    MomentReport rep = run_moment(f, k, T1, T2, k + 2, threads);
    rep.cal_sensitivity = sensitivity(k, T2, cal, rep.abs_prev);
    return rep;
}

MomentReport verify_theorem(int k, const CoeffTable& ct, const CalibrationConstants& cal,
                            double Bk_value, double T1, double T2, unsigned threads) {
    check_power(k, 3, 5, "verify_theorem");
    MomentReport rep = integrate_delta1_power(ct, cal, k, T1, T2, threads);
    if (Bk_value > 0.0) {
        rep.prediction = theorem_prediction(k, Bk_value, T1, T2);
        const TheoremConstants tc = make_theorem_constants(k, Bk_value);
        rep.prediction_dyadic = tc.coefficient * std::pow(T1, tc.exponent);
        rep.ratio = rep.integral / rep.prediction;
    }
    return rep;
}

MomentReport second_moment(const CoeffTable& ct, const CalibrationConstants& cal,
                           double T, unsigned threads) {
    if (!(T > 1.0)) throw std::invalid_argument("second_moment: T must exceed 1");
    MomentReport rep = integrate_delta1_power(ct, cal, 2, 1.0, T, threads);
    const double S = second_moment_constant(ct.size(), ct).value;
    const double twopi4 = std::pow(2.0 * kPi, 4.0);
    rep.prediction = (2.0 / 13.0) / twopi4 * S * std::pow(T, 3.25);
    rep.ratio = rep.integral / rep.prediction;
    return rep;
}

R1Model::R1Model(const CoeffTable& ct, double y, double x1, double x2, unsigned threads) {
    if (!(y >= 0.0)) throw std::invalid_argument("R1Model: negative truncation");
    if (y > double(ct.size()))
        throw std::out_of_range("R1Model: truncation beyond the coefficient table");
    if (!(x1 >= 1.0) || !(x2 > x1)) throw std::invalid_argument("R1Model: bad x range");
    u1_ = std::pow(x1, 0.25);
    const double u2 = std::pow(x2, 0.25);
    ny_ = y >= 1.0 ? (std::uint64_t)std::floor(y) : 0;
    if (ny_ == 0) return;

    // two periods of the fastest term per panel; its u-period is 1/(4 n^{1/4})
    const double span = u2 - u1_;
    npanels_ = std::max(1, (int)std::ceil(span * 2.0 * std::pow(double(ny_), 0.25)));
    width_ = span / npanels_;
    coef_.assign((std::size_t)npanels_ * kChebCoeffs, 0.0);

    std::vector<double> amp(ny_ + 1);
    std::vector<dd> omega(ny_ + 1);
    const dd eight_pi = dd_mul(dd_two_pi, 4.0);
    for (std::uint64_t n = 1; n <= ny_; ++n) {
        amp[n] = ct.c(n) * std::pow(double(n), -0.875);
        omega[n] = dd_mul(dd_fourth_root(dd_from_u64(n)), eight_pi);
    }

    std::array<double, kChebPts> tnode;
    std::array<std::array<double, kChebCoeffs>, kChebPts> basis;
    for (int j = 0; j < kChebPts; ++j) {
        const double th = kPi * (j + 0.5) / kChebPts;
        tnode[j] = std::cos(th);
        for (int q = 0; q < kChebCoeffs; ++q) basis[j][q] = std::cos(q * th);
    }

    const dd quarter_pi = dd_mul(dd_pi, 0.25);
    parallel_blocks((std::size_t)npanels_, threads, [&](std::size_t p) {
        const double uc = u1_ + (p + 0.5) * width_;
        const double uhw = 0.5 * width_;
        std::array<double, kChebPts> fv;
        for (int j = 0; j < kChebPts; ++j) {
            const double u = uc + uhw * tnode[j];
            CompensatedSum s;
            for (std::uint64_t n = 1; n <= ny_; ++n) {
                if (amp[n] == 0.0) continue;
                s.add(amp[n] * dd_cos_reduced(dd_sub(dd_mul(omega[n], u), quarter_pi)));
            }
            fv[j] = s.result();
        }
        double* c = &coef_[p * kChebCoeffs];
        for (int q = 0; q < kChebCoeffs; ++q) {
            double a = 0.0;
            for (int j = 0; j < kChebPts; ++j) a += fv[j] * basis[j][q];
            c[q] = (q == 0 ? 1.0 : 2.0) * a / kChebPts;
        }
    });
}

double R1Model::operator()(double x) const {
    if (ny_ == 0) return 0.0;
    const double u = std::pow(x, 0.25);
    int p = (int)((u - u1_) / width_);
    p = std::clamp(p, 0, npanels_ - 1);
    const double uc = u1_ + (p + 0.5) * width_;
    const double t = (u - uc) / (0.5 * width_);
    const double* c = &coef_[(std::size_t)p * kChebCoeffs];
    double b1 = 0.0, b2 = 0.0;
    for (int q = kChebCoeffs - 1; q >= 1; --q) {
        const double b0 = 2.0 * t * b1 - b2 + c[q];
        b2 = b1;
        b1 = b0;
    }
    const double F = t * b1 - b2 + c[0];
    return std::pow(x, 1.125) * F / (4.0 * kPi * kPi);
}

MomentReport moment_R1(const CoeffTable& ct, const CalibrationConstants& cal,
                       int twol, double T, double y, unsigned threads) {
    (void)cal;
    if (twol != 2 && twol != 4 && twol != 6)
        throw std::invalid_argument("moment_R1: exponent must be 2, 4 or 6");
    if (!(T >= 1.0)) throw std::invalid_argument("moment_R1: T must be at least 1");
    const R1Model model(ct, y, T, 2.0 * T, threads);
    auto f = [&](double x) { return model(x); };
    MomentReport rep =
        run_moment(f, twol, T, 2.0 * T, oscillation_nodes(twol, T, y), threads);
    rep.has_y = true;
    rep.y = y;
    rep.regime_warning = y > std::sqrt(T);
    rep.prediction = std::pow(T, 1.0 + 2.25 * (twol / 2));
    rep.ratio = rep.integral / rep.prediction;
    return rep;
}

MomentReport moment_R2(const CoeffTable& ct, const CalibrationConstants& cal,
                       int k, double T, double y, unsigned threads) {
    check_power(k, 2, 5, "moment_R2");
    check_range(T, 2.0 * T, double(ct.size()), "moment_R2");
    if (!(y >= 0.0)) throw std::invalid_argument("moment_R2: negative truncation");
    if (y < 1.0) {
        // empty truncated sum: R2 is delta_1 itself
        MomentReport rep = integrate_delta1_power(ct, cal, k, T, 2.0 * T, threads);
        rep.has_y = true;
        rep.y = y;
        return rep;
    }
    const R1Model model(ct, y, T, 2.0 * T, threads);
    auto f = [&](double x) { return delta1(ct, cal, x) - model(x); };
    MomentReport rep = run_moment(f, k, T, 2.0 * T, oscillation_nodes(k, T, y), threads);
    rep.has_y = true;
    rep.y = y;
    rep.regime_warning = y > std::pow(T, 1.0 / 12.0);
    switch (k) {
        case 2: rep.prediction = std::pow(T, 3.25) * std::pow(y, -0.75); break;
        case 3: rep.prediction = std::pow(T, 4.375) * std::pow(y, -1.125); break;
        case 4: rep.prediction = std::pow(T, 5.5) * std::pow(y, -1.5); break;
        case 5: rep.prediction = std::pow(T, 6.625) * std::pow(y, -0.375); break;
    }
    // the scaling laws bound |R2|^k, so odd k tracks the absolute integral
    rep.ratio = (k % 2 == 0 ? rep.integral : rep.abs_integral) / rep.prediction;
    rep.cal_sensitivity = sensitivity(k, 2.0 * T, cal, rep.abs_prev);
    return rep;
}

namespace {

// antiderivatives of u^m cos(cu) and u^m sin(cu), by parts, exact
long double int_um_sin(int m, long double c, long double u);

long double int_um_cos(int m, long double c, long double u) {
    if (m == 0) return std::sin(c * u) / c;
    return std::pow(u, (long double)m) * std::sin(c * u) / c -
           (m / c) * int_um_sin(m - 1, c, u);
}

long double int_um_sin(int m, long double c, long double u) {
    if (m == 0) return -std::cos(c * u) / c;
    return -std::pow(u, (long double)m) * std::cos(c * u) / c +
           (m / c) * int_um_cos(m - 1, c, u);
}

template <class F>
long double adaptive_simpson(const F& f, long double a, long double b, long double fa,
                             long double fm, long double fb, long double whole,
                             long double eps, int depth) {
    const long double m = 0.5L * (a + b);
    const long double lm = 0.5L * (a + m), rm = 0.5L * (m + b);
    const long double flm = f(lm), frm = f(rm);
    const long double h = b - a;
    const long double left = h / 12.0L * (fa + 4.0L * flm + fm);
    const long double right = h / 12.0L * (fm + 4.0L * frm + fb);
    const long double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0L * eps)
        return left + right + delta / 15.0L;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5L * eps, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5L * eps, depth - 1);
}

} // namespace

OscillatoryBound oscillatory_bound(double alpha, double beta, double T, OscKind kind) {
    if (beta == 0.0) throw std::domain_error("oscillatory_bound: beta = 0 does not oscillate");
    if (!(T > 0.0)) throw std::invalid_argument("oscillatory_bound: T must be positive");
    OscillatoryBound out;
    out.alpha = alpha;
    out.beta = beta;
    out.T = T;
    out.kind = kind;
    const long double c = 2.0L * (long double)kPi * (long double)beta;
    const long double U1 = std::pow((long double)T, 0.25L);
    const long double U2 = std::pow(2.0L * (long double)T, 0.25L);
    const double m4 = 4.0 * alpha + 3.0;
    const long long mi = llround(m4);
    if (mi >= 0 && std::fabs(m4 - (double)mi) < 1e-12) {
        const int m = (int)mi;
        const long double hi = kind == OscKind::cosine ? int_um_cos(m, c, U2) : int_um_sin(m, c, U2);
        const long double lo = kind == OscKind::cosine ? int_um_cos(m, c, U1) : int_um_sin(m, c, U1);
        out.integral = double(4.0L * (hi - lo));
        out.exact = true;
    } else {
        auto f = [&](long double u) {
            const long double g = kind == OscKind::cosine ? std::cos(c * u) : std::sin(c * u);
            return 4.0L * std::pow(u, (long double)m4) * g;
        };
        const long double fa = f(U1), fb = f(U2), fm = f(0.5L * (U1 + U2));
        const long double whole = (U2 - U1) / 6.0L * (fa + 4.0L * fm + fb);
        const long double eps = 1e-11L * std::max(1.0L, std::fabs(whole));
        out.integral = double(adaptive_simpson(f, U1, U2, fa, fm, fb, whole, eps, 40));
        out.exact = false;
    }
    out.bound = std::pow(T, alpha + 0.75) / std::fabs(beta);
    out.ratio = std::fabs(out.integral) / out.bound;
    return out;
}

} // namespace rsmoments
