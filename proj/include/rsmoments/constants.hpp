#pragma once
// Series constants built from solutions of
//   n_1^{1/4} + ... + n_l^{1/4} = n_{l+1}^{1/4} + ... + n_k^{1/4},
// summed with weights prod c_{n_j} / prod n_j^{7/8}.  Writing n = q^4 m
// turns the constraint into one signed integer equation per kernel m, so
// the solution set factors over kernels and the whole sum collapses to
// per-kernel convolutions: no k-fold enumeration happens here.

#include <cstdint>
#include <vector>

#include "rsmoments/coeffs.hpp"

namespace rsmoments {

struct SeriesValue {
    double value = 0.0;
    std::uint64_t N = 0;        // truncation actually used
    double tail_estimate = 0.0; // diagonal-family bound beyond N, never added to value
    std::uint64_t term_count = 0;
};

// k in 3..5, l in 1..k-1, N <= ct.size().  tail_estimate bounds solutions
// that are an exact pair (n,n) with n > N glued across the two sides onto a
// solution of the (k-2, l-1) constraint; constraints that admit no such
// pairing (k=3, or l=1, or l=k-1) have an empty continuation family and
// report 0.  Deeper exceedances are higher order in the same small factor.
SeriesValue s_kl(int k, int l, std::uint64_t N, const CoeffTable& ct);

// B_k = sum_l C(k-1,l) s_{k;l} cos(pi(k-2l)/4), the phases taken from the
// exact eight-value table {0, +-sqrt(2)/2, +-1}
SeriesValue B_k(int k, std::uint64_t N, const CoeffTable& ct);

// partial sum of c_n^2 n^{-7/4}; the tail uses max_{n<=N} c_n^2 n^{-0.1}
// as an empirical envelope, giving K * N^{-0.65} / 0.65
SeriesValue second_moment_constant(std::uint64_t N, const CoeffTable& ct);

// main-term prediction B_k (2pi)^{-2k} 2^{-(k-1)} (T2^{1+9k/8} - T1^{1+9k/8}) / (1+9k/8)
// over [T1, T2]; k = 2 reproduces the classical second-moment formula
double theorem_prediction(int k, double Bk, double T1, double T2);

struct TheoremConstants {
    int k;
    double B_k;
    double coefficient; // B_k / ((8+9k) 2^{3k-4} pi^{2k}), the [1,T] normalization
    double exponent;    // 1 + 9k/8
    int delta_num, delta_den;
};

TheoremConstants make_theorem_constants(int k, double Bk); // k in 3..5

// every ordered solution tuple with all entries <= N, lexicographically
// sorted; diagnostic mirror of the convolution route, cost grows with the
// solution count rather than N^k
std::vector<std::vector<std::uint64_t>> list_solutions(int k, int l, std::uint64_t N);

} // namespace rsmoments
