#include "oracles.hpp"

namespace rsmoments::oracle {

std::vector<mpz_class> naive_tau(std::uint64_t n) {
    // coefficients of prod_{m<=n-1} (1-q^m)^24 up to degree n-1; a(j) is then
    // the coefficient of q^{j-1}
    std::vector<mpz_class> poly(n, 0);
    poly[0] = 1;
    for (std::uint64_t m = 1; m + 1 <= n; ++m)
        for (int rep = 0; rep < 24; ++rep)
            for (std::uint64_t j = n - 1; j >= m; --j)
                poly[j] -= poly[j - m];
    return poly;
}

std::vector<std::uint32_t> spf_sieve(std::uint32_t n) {
    std::vector<std::uint32_t> spf(n + 1, 0);
    for (std::uint32_t i = 2; i <= n; ++i) {
        if (spf[i] == 0)
            for (std::uint64_t j = i; j <= n; j += i)
                if (spf[j] == 0) spf[j] = i;
    }
    return spf;
}

std::vector<std::uint32_t> divisor_count_sieve(std::uint32_t n) {
    std::vector<std::uint32_t> d(n + 1, 0);
    for (std::uint32_t i = 1; i <= n; ++i)
        for (std::uint64_t j = i; j <= n; j += i) ++d[j];
    return d;
}

std::vector<double> naive_convolution(const std::vector<mpz_class>& a, int kappa) {
    const std::uint64_t n = a.size();
    std::vector<double> c(n + 1, 0.0);
    mpz_class num, mp, den;
    for (std::uint64_t i = 1; i <= n; ++i) {
        num = 0;
        for (std::uint64_t m = 1; m * m <= i; ++m) {
            if (i % (m * m)) continue;
            mpz_ui_pow_ui(mp.get_mpz_t(), m, 2 * (kappa - 1));
            num += mp * a[i / (m * m) - 1] * a[i / (m * m) - 1];
        }
        mpz_ui_pow_ui(den.get_mpz_t(), i, kappa - 1);
        mpq_class q(num, den);
        q.canonicalize();
        c[i] = q.get_d();
    }
    return c;
}

double simpson(const std::function<double(double)>& f, double a, double b,
               std::uint64_t panels) {
    if (panels % 2) ++panels;
    double h = (b - a) / (double)panels;
    double s = f(a) + f(b);
    double s4 = 0, s2 = 0;
    for (std::uint64_t i = 1; i < panels; ++i) {
        double x = a + h * (double)i;
        if (i % 2)
            s4 += f(x);
        else
            s2 += f(x);
    }
    return (s + 4 * s4 + 2 * s2) * h / 3.0;
}

} // namespace rsmoments::oracle
