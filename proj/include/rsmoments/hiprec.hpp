#pragma once
// Minimal RAII wrapper over MPFR at a fixed 200 bits.  This is the slow
// fallback lane: fourth-root sums whose double-double magnitude is too
// close to a decision threshold get re-evaluated here before they are
// classified.  200 bits keeps every nonzero |alpha| that the enumerations
// can produce (k <= 5, entries <= 10^4) far above the noise floor.

#include <cstdint>

#include <mpfr.h>

namespace rsmoments::hiprec {

inline constexpr mpfr_prec_t kBits = 200;

class Real {
  public:
    Real() { mpfr_init2(v_, kBits); mpfr_set_zero(v_, 1); }
    explicit Real(double x) { mpfr_init2(v_, kBits); mpfr_set_d(v_, x, MPFR_RNDN); }
    Real(const Real& o) { mpfr_init2(v_, kBits); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Real(Real&& o) noexcept { mpfr_init2(v_, kBits); mpfr_swap(v_, o.v_); }
    Real& operator=(Real o) noexcept { mpfr_swap(v_, o.v_); return *this; }
    ~Real() { mpfr_clear(v_); }

    static Real fourth_root(std::uint64_t n) {
        Real r;
        mpfr_set_ui(r.v_, n, MPFR_RNDN);
        mpfr_rootn_ui(r.v_, r.v_, 4, MPFR_RNDN);
        return r;
    }
    static Real pow(std::uint64_t base, double expo) {
        Real r, e(expo);
        mpfr_set_ui(r.v_, base, MPFR_RNDN);
        mpfr_pow(r.v_, r.v_, e.v_, MPFR_RNDN);
        return r;
    }

    void add(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); }
    void sub(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); }
    void abs_inplace() { mpfr_abs(v_, v_, MPFR_RNDN); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool abs_below(double t) const {
        Real bound(t);
        return mpfr_cmpabs(v_, bound.v_) < 0;
    }

  private:
    mpfr_t v_;
};

// sum_j (-1)^{signs[j-1]} ns[j]^{1/4} (signs[-1] treated as +) at 200 bits
double alpha_value(const std::uint64_t* ns, const int* signs, std::size_t k);
bool alpha_below(const std::uint64_t* ns, const int* signs, std::size_t k, double threshold);

} // namespace rsmoments::hiprec
