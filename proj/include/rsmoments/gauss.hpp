#pragma once
// Gauss-Legendre rules on [-1,1], generated at first use by Newton iteration
// on the Legendre recurrence in long double and rounded once to double.
// An m-point rule integrates polynomials of degree 2m-1 exactly, which is
// what makes per-unit-interval quadrature of piecewise polynomials exact.

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace rsmoments {

struct GaussRule {
    std::vector<double> x; // nodes, ascending
    std::vector<double> w; // weights, sum to 2
};

namespace detail {

inline GaussRule make_gauss_rule(int m) {
    GaussRule rule;
    rule.x.resize(m);
    rule.w.resize(m);
    for (int i = 0; i < m; ++i) {
        // Tricomi's starting guess, then Newton on P_m
        long double t = std::cos(M_PIl * (i + 0.75L) / (m + 0.5L));
        long double dp = 0.0L;
        for (int it = 0; it < 100; ++it) {
            long double p0 = 1.0L, p1 = t;
            for (int j = 2; j <= m; ++j) {
                long double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (t * p1 - p0) / (t * t - 1.0L);
            long double step = p1 / dp;
            t -= step;
            if (std::fabs(step) < 1e-21L) break;
        }
        rule.x[i] = double(t);
        rule.w[i] = double(2.0L / ((1.0L - t * t) * dp * dp));
    }
    // the starting guesses walk from the largest root down
    std::reverse(rule.x.begin(), rule.x.end());
    std::reverse(rule.w.begin(), rule.w.end());
    return rule;
}

} // namespace detail

inline const GaussRule& gauss_rule(int m) {
    if (m < 1 || m > 64) throw std::invalid_argument("gauss_rule: order must be in 1..64");
    static std::map<int, GaussRule> cache;
    static std::mutex mx;
    std::lock_guard<std::mutex> lk(mx);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, detail::make_gauss_rule(m)).first;
    return it->second;
}

} // namespace rsmoments
