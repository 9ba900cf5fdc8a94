#pragma once
// Exact Fourier coefficients a(n) of the weight-12 cusp form, plus cache
// file round-tripping.  Values are computed with arbitrary-precision GMP
// arithmetic and stored in 192-bit two's-complement words; the build derives
// rigorous per-stage magnitude bounds and refuses if a value could not fit,
// so the exact layer can never silently truncate.

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "rsmoments/dd.hpp"

namespace rsmoments {

struct WeightConfig {
    int kappa = 12;
};

// signed 192-bit two's complement, little-endian words
struct Int192 {
    std::uint64_t w[3] = {0, 0, 0};

    bool negative() const { return (w[2] >> 63) != 0; }
    bool operator==(const Int192& o) const {
        return w[0] == o.w[0] && w[1] == o.w[1] && w[2] == o.w[2];
    }
};

mpz_class int192_to_mpz(const Int192& v);
Int192 int192_from_mpz(const mpz_class& v); // throws std::overflow_error if |v| >= 2^191
dd int192_to_dd(const Int192& v);           // relative error ~2^-106

class FourierTable {
  public:
    FourierTable(int kappa, std::vector<Int192> a, bool user_supplied)
        : kappa_(kappa), user_supplied_(user_supplied), a_(std::move(a)) {}

    std::uint64_t size() const { return a_.size(); }
    int kappa() const { return kappa_; }
    // true when the table came from a foreign coefficient file rather than
    // the built-in weight-12 computation (no normalization is assumed then)
    bool user_supplied() const { return user_supplied_; }

    const Int192& raw(std::uint64_t n) const { return a_[n - 1]; }
    mpz_class at(std::uint64_t n) const { return int192_to_mpz(a_[n - 1]); }

    // a(n) * n^{-(kappa-1)/2} to double-double accuracy, rounded to double
    double lambda(std::uint64_t n) const;
    // unrounded form, for consumers that square or combine before rounding
    dd lambda_dd(std::uint64_t n) const;

  private:
    int kappa_;
    bool user_supplied_;
    std::vector<Int192> a_;
};

// Build a(1..n) for the built-in weight (kappa must be 12; other weights
// can only enter through load_fourier).  Deterministic; the only internal
// parallelism is over fixed block grids.
FourierTable compute_fourier(std::uint64_t n, const WeightConfig& w = {}, unsigned threads = 0);

// cache format, one header line then one row per n:
//   # rsmoments tau v1 kappa=<kappa> N=<N>
//   <n>,<a(n)>
void save_fourier(const FourierTable& t, const std::string& path);
// expect_kappa = 0 accepts any weight; a nonzero value rejects files whose
// header declares a different one
FourierTable load_fourier(const std::string& path, int expect_kappa = 0);

} // namespace rsmoments
