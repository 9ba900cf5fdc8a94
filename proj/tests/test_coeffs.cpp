#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "rsmoments/coeffs.hpp"

using namespace rsmoments;

TEST_CASE("convolution values at small indices") {
    CoeffTable ct = compute_coeffs(compute_fourier(16));
    CHECK(ct.c(1) == 1.0);
    CHECK(ct.c(2) == doctest::Approx(0.28125).epsilon(1e-14)); // (24/2^5.5)^2 = 9/32
    // 4 has contributions from m=1 and m=2: (1472/2048)^2 + 1, dyadic so exact
    CHECK(ct.c(4) == 1.5166015625);
    CHECK(ct.lambda(1) == 1.0);
}

TEST_CASE("floating route matches the exact rational oracle") {
    const std::uint64_t n = 300;
    FourierTable ft = compute_fourier(n);
    std::vector<mpz_class> a;
    for (std::uint64_t i = 1; i <= n; ++i) a.push_back(ft.at(i));
    auto ref = oracle::naive_convolution(a, 12);
    CoeffTable ct = compute_coeffs(ft);
    for (std::uint64_t i = 1; i <= n; ++i)
        CHECK(ct.c(i) == doctest::Approx(ref[i]).epsilon(1e-13));
}

TEST_CASE("nonnegativity, prime values, divisor-squared envelope") {
    const std::uint32_t n = 5000;
    CoeffTable ct = compute_coeffs(compute_fourier(n));
    auto spf = oracle::spf_sieve(n);
    auto d = oracle::divisor_count_sieve(n);

    for (std::uint32_t i = 1; i <= n; ++i) {
        CHECK(ct.c(i) >= 0.0);
        double envelope = 0.0;
        for (std::uint32_t m = 1; m * m <= i; ++m)
            if (i % (m * m) == 0) envelope += double(d[i / (m * m)]) * d[i / (m * m)];
        CHECK(ct.c(i) <= envelope * (1 + 1e-12));
    }
    // at primes the sum has one term, lambda(p)^2, rounded once from the
    // unrounded lambda; squaring the already-rounded accessor value doubles
    // its rounding and can land two ulps away
    for (std::uint32_t p = 2; p <= n; ++p)
        if (spf[p] == p) {
            const double twice = ct.lambda(p) * ct.lambda(p);
            CHECK(std::abs(ct.c(p) - twice) <=
                  std::ldexp(std::abs(twice), -51));
        }
}

TEST_CASE("prefix sums: monotone, dominated, and independently recomputable") {
    const std::uint64_t n = 20000;
    CoeffTable ct = compute_coeffs(compute_fourier(n));

    double prev[4] = {0, 0, 0, 0};
    for (std::uint64_t i = 1; i <= n; ++i) {
        for (int j = 0; j < 4; ++j) {
            double cur = double(ct.prefix(j, i));
            CHECK(cur >= prev[j]);
            prev[j] = cur;
        }
        if (i % 97 == 0) {
            CHECK(double(ct.prefix(1, i)) <= double(i) * double(ct.prefix(0, i)) * (1 + 1e-13));
        }
    }

    // independent long-double accumulation of S2
    long double s2 = 0.0L;
    for (std::uint64_t i = 1; i <= n; ++i) {
        s2 += (long double)ct.c(i) * i * i;
        if (i % 1999 == 0)
            CHECK(double(ct.prefix(2, i)) == doctest::Approx(double(s2)).epsilon(1e-15));
    }

    // the mean of c_n settles down (the partial-sum remainder decays)
    double m1 = double(ct.prefix(0, n / 2)) / double(n / 2);
    double m2 = double(ct.prefix(0, n)) / double(n);
    CHECK(std::abs(m2 - m1) <= 0.2 * m2);
}

TEST_CASE("construction is bit-deterministic across worker counts") {
    const std::uint64_t n = 20000;
    FourierTable ft = compute_fourier(n);
    CoeffTable a = compute_coeffs(ft, 1);
    CoeffTable b = compute_coeffs(ft, 8);
    for (std::uint64_t i = 1; i <= n; ++i) {
        CHECK(a.c(i) == b.c(i));
        CHECK(a.lambda(i) == b.lambda(i));
        for (int j = 0; j < 4; ++j) {
            CHECK(a.prefix(j, i).hi == b.prefix(j, i).hi);
            CHECK(a.prefix(j, i).lo == b.prefix(j, i).lo);
        }
    }
}
