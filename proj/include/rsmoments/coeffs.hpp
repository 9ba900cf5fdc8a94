#pragma once
// Convolution coefficients c_n = sum_{m^2|n} lambda(n/m^2)^2 together with
// the prefix power sums S_j(n) = sum_{i<=n} i^j c_i that the Riesz-mean
// evaluation downstream is built on.

#include <cstdint>
#include <vector>

#include "rsmoments/dd.hpp"
#include "rsmoments/fourier.hpp"

namespace rsmoments {

class CoeffTable {
  public:
    std::uint64_t size() const { return n_; }
    int kappa() const { return kappa_; }
    bool user_supplied() const { return user_supplied_; }

    double lambda(std::uint64_t n) const { return lambda_[n]; }
    double c(std::uint64_t n) const { return c_[n]; }

    // S_j(n) for j in 0..3; prefix(j, 0) = 0.  Kept to double-double
    // accuracy because x*S0(x) - S1(x) downstream cancels ~16 digits.
    dd prefix(int j, std::uint64_t n) const { return n == 0 ? dd{} : S_[j][n]; }

  private:
    friend CoeffTable compute_coeffs(const FourierTable&, unsigned);
    friend CoeffTable from_coefficients(std::vector<double>);

    void build_prefix();

    std::uint64_t n_ = 0;
    int kappa_ = 12;
    bool user_supplied_ = false;
    std::vector<double> lambda_; // index 1..N, [0] unused
    std::vector<double> c_;
    std::vector<dd> S_[4];
};

// Fills the table along two independent routes (exact integer numerators
// versus squared normalized coefficients) and refuses if they disagree
// beyond 1e-12 relative.  Deterministic for any worker count.
CoeffTable compute_coeffs(const FourierTable& ft, unsigned threads = 0);

// Table over explicitly given values c_1..c_N, for synthetic calibration
// inputs and coefficient experiments.  No lambda data; flagged user-supplied.
CoeffTable from_coefficients(std::vector<double> values);

} // namespace rsmoments
