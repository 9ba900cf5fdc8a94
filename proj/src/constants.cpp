#include "rsmoments/constants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsmoments/kahan.hpp"
#include "rsmoments/radicals.hpp"

namespace rsmoments {

namespace {

constexpr double kPi = 3.14159265358979323846;

int binom(int n, int r) {
    if (r < 0 || r > n) return 0;
    int v = 1;
    for (int i = 0; i < r; ++i) v = v * (n - i) / (i + 1);
    return v;
}

// cos(pi j / 4) for |j| <= 4, exact at the representable points
double phase(int j) {
    switch (std::abs(j)) {
        case 0: return 1.0;
        case 1: return std::sqrt(2.0) / 2.0;
        case 2: return 0.0;
        case 3: return -std::sqrt(2.0) / 2.0;
        default: return -1.0;
    }
}

std::uint64_t max_multiplier(std::uint64_t m, std::uint64_t N) {
    std::uint64_t q = 1;
    while ((unsigned __int128)(q + 1) * (q + 1) * (q + 1) * (q + 1) * m <= N) ++q;
    return q;
}

bool fourth_power_free(std::uint64_t m) { return kernel_decompose(m).m == m; }

// g_{a+1} = g_a (*) w, all arrays indexed by the plain sum s
template <class T>
std::vector<T> convolve(const std::vector<T>& g, const std::vector<T>& w) {
    std::vector<T> out(g.size() + w.size() - 1, T(0));
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] == T(0)) continue;
        for (std::size_t j = 0; j < w.size(); ++j) out[i + j] += g[i] * w[j];
    }
    return out;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
    T s(0);
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) s += a[i] * b[i];
    return s;
}

void validate_kl(int k, int l) {
    if (k < 3 || k > 5) throw std::invalid_argument("k must be in 3..5");
    if (l < 1 || l >= k) throw std::invalid_argument("l must be in 1..k-1");
}

} // namespace

SeriesValue s_kl(int k, int l, std::uint64_t N, const CoeffTable& ct) {
    validate_kl(k, l);
    if (N < 1 || N > ct.size())
        throw std::invalid_argument("truncation " + std::to_string(N) +
                                    " outside the coefficient table (N=" +
                                    std::to_string(ct.size()) + ")");

    const int a = l, b = k - l;
    const int amax = std::max(a, b);
    const bool corr4 = (k == 4 && l == 2);          // two kernels, 1+1 each side
    const bool corr5 = (k == 5 && (l == 2 || l == 3)); // two kernels, 1+1 and 1+2

    // The kernel loop is linear-time (sum over kernels of Q(m)^2 is O(N)),
    // so it runs serially in ascending kernel order; worker counts cannot
    // influence the result because there are no workers.
    CompensatedSum main, sumV11, sumV11sq, sumV12, sumV11V12;
    std::uint64_t cnt_main = 0, cntU11 = 0, cntU11sq = 0, cntU12 = 0, cntU11U12 = 0;

    std::vector<double> w;
    std::vector<std::uint64_t> ones;
    for (std::uint64_t m = 1; m <= N; ++m) {
        if (!fourth_power_free(m)) continue;
        const std::uint64_t Q = max_multiplier(m, N);
        w.assign(Q + 1, 0.0);
        ones.assign(Q + 1, 0);
        for (std::uint64_t q = 1; q <= Q; ++q) {
            const std::uint64_t n = q * q * q * q * m;
            w[q] = ct.c(n) / std::pow(double(n), 0.875);
            ones[q] = 1;
        }

        std::array<std::vector<double>, 5> g;
        std::array<std::vector<std::uint64_t>, 5> u;
        g[1] = w;
        u[1] = ones;
        for (int j = 2; j <= amax; ++j) {
            g[j] = convolve(g[j - 1], w);
            u[j] = convolve(u[j - 1], ones);
        }

        main.add(dot(g[a], g[b]));
        cnt_main += dot(u[a], u[b]);
        if (corr4 || corr5) {
            const double v11 = dot(g[1], g[1]);
            const std::uint64_t u11 = dot(u[1], u[1]);
            sumV11.add(v11);
            cntU11 += u11;
            if (corr4) {
                sumV11sq.add(v11 * v11);
                cntU11sq += u11 * u11;
            }
            if (corr5) {
                const double v12 = dot(g[1], g[2]);
                const std::uint64_t u12 = dot(u[1], u[2]);
                sumV12.add(v12);
                cntU12 += u12;
                sumV11V12.add(v11 * v12);
                cntU11U12 += u11 * u12;
            }
        }
    }

    SeriesValue out;
    out.N = N;
    double value = main.result();
    std::uint64_t count = cnt_main;
    if (corr4) {
        const double s1 = sumV11.result();
        value += 2.0 * (s1 * s1 - sumV11sq.result());
        count += 2 * (cntU11 * cntU11 - cntU11sq);
    }
    if (corr5) {
        value += 6.0 * (sumV11.result() * sumV12.result() - sumV11V12.result());
        count += 6 * (cntU11 * cntU12 - cntU11U12);
    }
    out.value = value;
    out.term_count = count;

    // diagonal continuation: a pair (n,n) with n > N astride the two sides,
    // attached to a solution of the reduced (k-2, l-1) constraint
    if (l >= 2 && k - l >= 2) {
        const double tau2 = second_moment_constant(N, ct).tail_estimate;
        const SeriesValue red =
            (k == 4) ? second_moment_constant(N, ct) : s_kl(3, l - 1, N, ct);
        out.tail_estimate = double(l) * double(k - l) * tau2 * (red.value + red.tail_estimate);
    }
    return out;
}

SeriesValue B_k(int k, std::uint64_t N, const CoeffTable& ct) {
    if (k < 3 || k > 5) throw std::invalid_argument("k must be in 3..5");
    SeriesValue out;
    out.N = N;
    CompensatedSum val;
    for (int l = 1; l < k; ++l) {
        const double ph = phase(k - 2 * l);
        if (ph == 0.0) continue;
        const SeriesValue s = s_kl(k, l, N, ct);
        val.add(binom(k - 1, l) * ph * s.value);
        out.tail_estimate += binom(k - 1, l) * std::abs(ph) * s.tail_estimate;
        out.term_count += s.term_count;
    }
    out.value = val.result();
    return out;
}

SeriesValue second_moment_constant(std::uint64_t N, const CoeffTable& ct) {
    if (N < 1 || N > ct.size())
        throw std::invalid_argument("truncation outside the coefficient table");
    CompensatedSum s;
    double K = 0.0;
    for (std::uint64_t n = 1; n <= N; ++n) {
        const double c = ct.c(n);
        s.add(c * c * std::pow(double(n), -1.75));
        K = std::max(K, c * c * std::pow(double(n), -0.1));
    }
    SeriesValue out;
    out.value = s.result();
    out.N = N;
    out.term_count = N;
    out.tail_estimate = K * std::pow(double(N), -0.65) / 0.65;
    return out;
}

double theorem_prediction(int k, double Bk, double T1, double T2) {
    if (k < 2) throw std::invalid_argument("moment order must be >= 2");
    if (!(T1 > 0.0) || !(T2 > T1)) throw std::invalid_argument("need 0 < T1 < T2");
    const double e = 1.0 + 9.0 * k / 8.0;
    const double norm = std::pow(2.0 * kPi, 2 * k) * std::pow(2.0, k - 1);
    return Bk / norm * (std::pow(T2, e) - std::pow(T1, e)) / e;
}

TheoremConstants make_theorem_constants(int k, double Bk) {
    if (k < 3 || k > 5) throw std::invalid_argument("k must be in 3..5");
    static constexpr int dnum[3] = {3, 3, 1};
    static constexpr int dden[3] = {62, 256, 680};
    TheoremConstants t;
    t.k = k;
    t.B_k = Bk;
    t.coefficient = Bk / ((8 + 9 * k) * std::pow(2.0, 3 * k - 4) * std::pow(kPi, 2 * k));
    t.exponent = 1.0 + 9.0 * k / 8.0;
    t.delta_num = dnum[k - 3];
    t.delta_den = dden[k - 3];
    return t;
}

namespace {

using Emit = std::function<void(const std::vector<std::uint64_t>&)>;

// ordered q-vectors (first nl slots positive, next nr negative) with zero
// signed sum, entries in [1, Q]; branches that cannot return to zero are cut
void balanced_q_vectors(int nl, int nr, std::uint64_t Q, std::vector<std::uint64_t>& cur,
                        int pos, std::int64_t bal, const Emit& emit) {
    const int total = nl + nr;
    if (pos == total) {
        if (bal == 0) emit(cur);
        return;
    }
    const bool left = pos < nl;
    const int lrem = left ? nl - pos - 1 : 0;
    const int rrem = left ? nr : total - pos - 1;
    for (std::uint64_t q = 1; q <= Q; ++q) {
        const std::int64_t nb = bal + (left ? +1 : -1) * (std::int64_t)q;
        if (nb + lrem > (std::int64_t)(rrem * Q)) continue; // overshoot
        if (nb + (std::int64_t)(lrem * Q) < rrem) continue; // unreachable
        cur[pos] = q;
        balanced_q_vectors(nl, nr, Q, cur, pos + 1, nb, emit);
    }
}

std::uint64_t fourth(std::uint64_t q) { return q * q * q * q; }

} // namespace

std::vector<std::vector<std::uint64_t>> list_solutions(int k, int l, std::uint64_t N) {
    validate_kl(k, l);
    if (N > 5000) throw std::invalid_argument("diagnostic enumeration limited to N <= 5000");
    const int b = k - l;
    std::vector<std::uint64_t> kernels;
    for (std::uint64_t m = 1; m <= N; ++m)
        if (fourth_power_free(m)) kernels.push_back(m);

    std::vector<std::vector<std::uint64_t>> out;

    // one kernel carrying every slot
    for (std::uint64_t m : kernels) {
        const std::uint64_t Q = max_multiplier(m, N);
        std::vector<std::uint64_t> cur(k);
        balanced_q_vectors(l, b, Q, cur, 0, 0, [&](const std::vector<std::uint64_t>& qs) {
            std::vector<std::uint64_t> tuple(k);
            for (int s = 0; s < k; ++s) tuple[s] = fourth(qs[s]) * m;
            out.push_back(std::move(tuple));
        });
    }

    // two kernels m1 < m2, each balanced on its own slot subset.  Every
    // block needs a slot on each side, which caps the kernel count at
    // min(l, k-l) <= 2 for k <= 5, so this case closes the enumeration.
    // lmask/rmask pick block-1 slots; proper nonempty subsets only.
    for (std::size_t i = 0; i < kernels.size(); ++i) {
        for (std::size_t j = i + 1; j < kernels.size(); ++j) {
            const std::uint64_t m1 = kernels[i], m2 = kernels[j];
            const std::uint64_t Q1 = max_multiplier(m1, N), Q2 = max_multiplier(m2, N);
            for (int lmask = 1; lmask <= (1 << l) - 2; ++lmask) {
                const int l1 = __builtin_popcount(lmask);
                for (int rmask = 1; rmask <= (1 << b) - 2; ++rmask) {
                    const int r1 = __builtin_popcount(rmask);
                    std::vector<std::uint64_t> q1(l1 + r1), q2(k - l1 - r1);
                    balanced_q_vectors(l1, r1, Q1, q1, 0, 0,
                                       [&](const std::vector<std::uint64_t>& qa) {
                        balanced_q_vectors(l - l1, b - r1, Q2, q2, 0, 0,
                                           [&](const std::vector<std::uint64_t>& qb) {
                            // both q-vectors list their block's left slots
                            // first, in slot order; interleave them back
                            std::vector<std::uint64_t> tuple(k);
                            std::size_t a1 = 0, a2 = 0, b1 = l1, b2 = std::size_t(l - l1);
                            for (int s = 0; s < l; ++s)
                                tuple[s] = ((lmask >> s) & 1) ? fourth(qa[a1++]) * m1
                                                              : fourth(qb[a2++]) * m2;
                            for (int s = 0; s < b; ++s)
                                tuple[l + s] = ((rmask >> s) & 1) ? fourth(qa[b1++]) * m1
                                                                  : fourth(qb[b2++]) * m2;
                            out.push_back(std::move(tuple));
                        });
                    });
                }
            }
        }
    }

    std::sort(out.begin(), out.end());
    return out;
}

} // namespace rsmoments
