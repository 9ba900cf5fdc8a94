#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>
#include <unistd.h>

#include "oracles.hpp"
#include "rsmoments/fourier.hpp"

using namespace rsmoments;

namespace {

std::string tmp_path(const char* name) {
    return std::string("/tmp/rsm_test_") + name + "_" + std::to_string(::getpid());
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path);
    f << body;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

} // namespace

TEST_CASE("first coefficient rows match the classical values") {
    FourierTable t = compute_fourier(10);
    const long expect[10] = {1,      -24,   252,     -1472,  4830,
                             -6048, -16744, 84480, -113643, -115920};
    for (int n = 1; n <= 10; ++n) CHECK((t.at(n) == expect[n - 1]));
}

TEST_CASE("the squared-seed pipeline equals the literal product expansion") {
    const std::uint64_t n = 400;
    FourierTable t = compute_fourier(n);
    auto ref = oracle::naive_tau(n);
    for (std::uint64_t i = 1; i <= n; ++i) CHECK((t.at(i) == ref[i - 1]));
}

TEST_CASE("tiny tables") {
    FourierTable t1 = compute_fourier(1);
    CHECK(t1.size() == 1);
    CHECK((t1.at(1) == 1));
    FourierTable t2 = compute_fourier(2);
    CHECK((t2.at(2) == -24));
    CHECK_THROWS_AS(compute_fourier(0), std::invalid_argument);
}

TEST_CASE("only the built-in weight can be computed") {
    WeightConfig w;
    w.kappa = 11;
    CHECK_THROWS_WITH_AS(compute_fourier(10, w),
                         doctest::Contains("unsupported weight"), std::invalid_argument);
}

TEST_CASE("coefficients are multiplicative and satisfy the prime-power recursion") {
    const std::uint32_t n = 5000;
    FourierTable t = compute_fourier(n);
    auto spf = oracle::spf_sieve(n);

    for (std::uint32_t m = 2; m <= n; ++m) {
        std::uint32_t p = spf[m], pe = 1, rest = m;
        while (rest % p == 0) {
            rest /= p;
            pe *= p;
        }
        if (rest > 1) CHECK((t.at(m) == t.at(pe) * t.at(rest)));
    }

    mpz_class p11;
    for (std::uint32_t p = 2; p <= n; ++p) {
        if (spf[p] != p) continue;
        mpz_ui_pow_ui(p11.get_mpz_t(), p, 11);
        for (std::uint64_t pj = p; pj * p * p <= n; pj *= p)
            CHECK((t.at(pj * p * p) == t.at(p) * t.at(pj * p) - p11 * t.at(pj)));
    }
}

TEST_CASE("absolute values stay below the divisor-count envelope, exactly") {
    const std::uint32_t n = 5000;
    FourierTable t = compute_fourier(n);
    auto d = oracle::divisor_count_sieve(n);
    mpz_class n11, bound;
    for (std::uint32_t m = 1; m <= n; ++m) {
        mpz_ui_pow_ui(n11.get_mpz_t(), m, 11);
        bound = n11 * d[m] * d[m];
        CHECK((t.at(m) * t.at(m) <= bound));
    }
}

TEST_CASE("lambda normalization") {
    FourierTable t = compute_fourier(16);
    CHECK(t.lambda(1) == 1.0);
    CHECK(t.lambda(4) == doctest::Approx(-1472.0 / 2048.0).epsilon(1e-15));
    CHECK(t.lambda(2) == doctest::Approx(-24.0 / std::pow(2.0, 5.5)).epsilon(1e-15));
    CHECK_THROWS_AS(t.lambda(17), std::out_of_range);
    CHECK_THROWS_AS(t.lambda(0), std::out_of_range);
}

TEST_CASE("cache round-trip is byte-identical") {
    const std::uint64_t n = 64;
    FourierTable t = compute_fourier(n);
    std::string p1 = tmp_path("cache1"), p2 = tmp_path("cache2");
    save_fourier(t, p1);

    std::string body = read_file(p1);
    CHECK(body.substr(0, body.find('\n')) == "# rsmoments tau v1 kappa=12 N=64");
    CHECK(body.find("4,-1472\n") != std::string::npos);

    FourierTable r = load_fourier(p1);
    CHECK(r.size() == n);
    CHECK_FALSE(r.user_supplied());
    for (std::uint64_t i = 1; i <= n; ++i) CHECK((r.at(i) == t.at(i)));

    save_fourier(r, p2);
    CHECK(read_file(p2) == body);
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("cache loader rejects malformed files with line positions") {
    std::string p = tmp_path("bad");

    write_file(p, "garbage\n");
    CHECK_THROWS_WITH_AS(load_fourier(p), doctest::Contains(":1:"), std::runtime_error);

    write_file(p, "# rsmoments tau v1 kappa=12 N=3\n1,1\n2,-24\n");
    CHECK_THROWS_WITH_AS(load_fourier(p), doctest::Contains("truncated"), std::runtime_error);

    write_file(p, "# rsmoments tau v1 kappa=12 N=2\n1,1\n3,-24\n");
    CHECK_THROWS_WITH_AS(load_fourier(p), doctest::Contains("row index"), std::runtime_error);

    write_file(p, "# rsmoments tau v1 kappa=12 N=2\n1,1\n2,twentyfour\n");
    CHECK_THROWS_WITH_AS(load_fourier(p), doctest::Contains("decimal"), std::runtime_error);

    write_file(p, "# rsmoments tau v1 kappa=12 N=2\n1,1\n2,-24\nstray\n");
    CHECK_THROWS_WITH_AS(load_fourier(p), doctest::Contains("trailing"), std::runtime_error);

    write_file(p, "# rsmoments tau v1 kappa=12 N=2\n1,2\n2,-24\n");
    CHECK_THROWS_WITH_AS(load_fourier(p), doctest::Contains("a(1)"), std::runtime_error);

    // 2^200 does not fit the storage contract
    write_file(p, "# rsmoments tau v1 kappa=12 N=2\n1,1\n2,"
                  "1606938044258990275541962092341162602522202993782792835301376\n");
    CHECK_THROWS_WITH_AS(load_fourier(p), doctest::Contains("192-bit"), std::runtime_error);

    CHECK_THROWS_AS(load_fourier("/nonexistent/path"), std::runtime_error);
    std::remove(p.c_str());
}

TEST_CASE("foreign weights load but are flagged") {
    std::string p = tmp_path("foreign");
    write_file(p, "# rsmoments tau v1 kappa=16 N=2\n1,1\n2,216\n");
    FourierTable t = load_fourier(p);
    CHECK(t.kappa() == 16);
    CHECK(t.user_supplied());
    CHECK((t.at(2) == 216));
    CHECK_THROWS_WITH_AS(load_fourier(p, 12), doctest::Contains("kappa=16"), std::runtime_error);
    CHECK(load_fourier(p, 16).kappa() == 16);
    std::remove(p.c_str());
}

TEST_CASE("192-bit storage round-trips through mpz") {
    mpz_class big("-123456789012345678901234567890123456789012345");
    Int192 v = int192_from_mpz(big);
    CHECK((int192_to_mpz(v) == big));
    CHECK(v.negative());

    mpz_class edge = (mpz_class(1) << 191) - 1;
    CHECK((int192_to_mpz(int192_from_mpz(edge)) == edge));
    CHECK((int192_to_mpz(int192_from_mpz(-edge)) == -edge));
    CHECK_THROWS_AS(int192_from_mpz(edge + 1), std::overflow_error);

    // dd conversion: hi is the nearest double, lo carries the residual
    dd d = int192_to_dd(v);
    mpz_class residual = big - mpz_class(d.hi); // d.hi is integral at this magnitude
    CHECK(std::abs(residual.get_d() - d.lo) <= 1e-12 * std::abs(d.lo) + 1.0);
}
