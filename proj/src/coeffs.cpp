#include "rsmoments/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rsmoments/kahan.hpp"
#include "rsmoments/parallel.hpp"

namespace rsmoments {

namespace {

// exact route: n^{kappa-1} c_n = sum_{m^2|n} m^{2(kappa-1)} a(n/m^2)^2 as an
// integer, rounded once at the end.  Used to cross-check the floating route;
// both sides are correct to ~4e-16 relative, far inside the 1e-12 gate.
double worst_block_deviation(const FourierTable& ft, const std::vector<double>& c,
                             const std::vector<mpz_class>& mpow,
                             std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t len = hi - lo + 1;
    std::vector<mpz_class> acc(len);
    mpz_class t;
    for (std::uint64_t i = lo; i <= hi; ++i) {
        t = ft.at(i);
        acc[i - lo] = t * t;
    }
    for (std::uint64_t m = 2; m * m <= hi; ++m) {
        const std::uint64_t mm = m * m;
        for (std::uint64_t r = (lo + mm - 1) / mm; mm * r <= hi; ++r) {
            t = ft.at(r);
            acc[mm * r - lo] += mpow[m] * t * t;
        }
    }
    const int e = ft.kappa() - 1;
    double worst = 0.0;
    mpz_class denom;
    for (std::uint64_t i = lo; i <= hi; ++i) {
        mpz_ui_pow_ui(denom.get_mpz_t(), i, e);
        double exact = mpz_get_d(acc[i - lo].get_mpz_t()) / mpz_get_d(denom.get_mpz_t());
        double dev = std::abs(exact - c[i]) / std::max(exact, 1e-300);
        if (dev > worst) worst = dev;
    }
    return worst;
}

} // namespace

CoeffTable compute_coeffs(const FourierTable& ft, unsigned threads) {
    const std::uint64_t n = ft.size();
    if (n == 0) throw std::invalid_argument("empty coefficient table");
    const unsigned nt = resolve_threads(threads);
    // block grid is fixed by N alone so worker count cannot reorder anything
    const std::uint64_t nblocks = std::max<std::uint64_t>(1, std::min<std::uint64_t>(512, n / 4096 + 1));

    CoeffTable t;
    t.n_ = n;
    t.kappa_ = ft.kappa();
    t.user_supplied_ = ft.user_supplied();
    t.lambda_.assign(n + 1, 0.0);
    t.c_.assign(n + 1, 0.0);

    // the squares are rounded only after squaring, so single-term values
    // like c_2 = (9/32 exactly) land on their representable targets
    std::vector<double> sq(n + 1, 0.0);
    parallel_blocks(nblocks, nt, [&](std::uint64_t b) {
        auto [lo, hi] = block_range(n, nblocks, b);
        for (std::uint64_t i = lo + 1; i <= hi; ++i) {
            dd l = ft.lambda_dd(i);
            t.lambda_[i] = double(l);
            sq[i] = double(dd_mul(l, l));
        }
    });

    // floating route.  For fixed n the contributions arrive in ascending m
    // whatever the block grid, so the sum order (and hence every rounding)
    // is reproducible.
    parallel_blocks(nblocks, nt, [&](std::uint64_t b) {
        auto [lo0, hi] = block_range(n, nblocks, b);
        const std::uint64_t lo = lo0 + 1;
        for (std::uint64_t i = lo; i <= hi; ++i) t.c_[i] = sq[i];
        for (std::uint64_t m = 2; m * m <= hi; ++m) {
            const std::uint64_t mm = m * m;
            for (std::uint64_t r = (lo + mm - 1) / mm; mm * r <= hi; ++r)
                t.c_[mm * r] += sq[r];
        }
    });

    // exact route, blockwise; only the worst relative deviation leaves a block
    std::vector<mpz_class> mpow(std::size_t(std::sqrt(double(n))) + 2);
    for (std::uint64_t m = 1; m < mpow.size(); ++m)
        mpz_ui_pow_ui(mpow[m].get_mpz_t(), m, 2 * (ft.kappa() - 1));
    std::vector<double> worst(nblocks, 0.0);
    parallel_blocks(nblocks, nt, [&](std::uint64_t b) {
        auto [lo, hi] = block_range(n, nblocks, b);
        worst[b] = worst_block_deviation(ft, t.c_, mpow, lo + 1, hi);
    });
    for (std::uint64_t b = 0; b < nblocks; ++b)
        if (worst[b] > 1e-12)
            throw std::logic_error("coefficient routes disagree by " + std::to_string(worst[b]) +
                                   " relative in block " + std::to_string(b));

    t.build_prefix();
    return t;
}

// Prefix sums, serial by nature.  Each term i^j c_i is formed in
// double-double (error ~2^-105 relative) and fed to a compensated
// accumulator, so S_j(n) carries ~31 correct digits: enough that the
// catastrophic cancellation in x*S0 - S1 (which eats ~x / x^{9/8-1}
// ~ 7 digits at x = 10^6) still leaves the remainder fully resolved.
void CoeffTable::build_prefix() {
    CompensatedSum s[4];
    for (int j = 0; j < 4; ++j) S_[j].assign(n_ + 1, dd{});
    for (std::uint64_t i = 1; i <= n_; ++i) {
        const double ci = c_[i], x = double(i);
        s[0].add(ci);
        dd t1 = two_prod(ci, x);
        s[1].add(t1);
        dd t2 = dd_mul(t1, x);
        s[2].add(t2);
        dd t3 = dd_mul(t2, x);
        s[3].add(t3);
        for (int j = 0; j < 4; ++j) S_[j][i] = s[j].result_dd();
    }
}

CoeffTable from_coefficients(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("empty coefficient table");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("coefficient values must be finite");
    CoeffTable t;
    t.n_ = values.size();
    t.user_supplied_ = true;
    t.lambda_.assign(t.n_ + 1, 0.0);
    t.c_.resize(t.n_ + 1);
    t.c_[0] = 0.0;
    std::copy(values.begin(), values.end(), t.c_.begin() + 1);
    t.build_prefix();
    return t;
}

} // namespace rsmoments
