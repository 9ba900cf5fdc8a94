#pragma once
// Exact arithmetic on signed sums of fourth roots of positive integers.
// Everything rests on one classical fact: fourth roots of distinct
// fourth-power-free integers are linearly independent over the rationals.
// Writing n = q^4 m with m fourth-power-free therefore turns "does
// sum_j s_j n_j^{1/4} vanish?" into integer bookkeeping per kernel m,
// which is decidable, and decides it exactly.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsmoments {

struct Radical {
    std::uint64_t n; // = q^4 * m
    std::uint64_t q;
    std::uint64_t m; // fourth-power-free kernel
};

Radical kernel_decompose(std::uint64_t n); // n >= 1

class SignedRadicalSum {
  public:
    void add(int sign, std::uint64_t n); // accumulate sign * n^{1/4}, sign in {-1,+1}
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    std::int64_t coefficient(std::uint64_t kernel) const;
    double value() const; // numeric image, double-double internally

  private:
    std::map<std::uint64_t, std::int64_t> terms_; // kernel -> sum of signed q
};

// Enumerations refuse (rather than truncate) when they would exceed their
// tuple budget; the message names the budget that would have sufficed.
class BudgetError : public std::runtime_error {
  public:
    BudgetError(std::uint64_t required, std::uint64_t budget)
        : std::runtime_error("enumeration needs " + std::to_string(required) +
                             " tuples but the budget is " + std::to_string(budget) +
                             "; rerun with --budget >= " + std::to_string(required)),
          required_(required) {}
    std::uint64_t required() const { return required_; }

  private:
    std::uint64_t required_;
};

inline constexpr std::uint64_t kDefaultBudget = 100000000; // 10^8 tuples

// alpha(n; i) = n_1^{1/4} + sum_{j>=2} (-1)^{i_{j-1}} n_j^{1/4}; signs holds
// the i vector (size k-1, entries 0 or 1).  Exact.
bool alpha_is_zero(const std::vector<std::uint64_t>& ns, const std::vector<int>& signs);

struct Range {
    std::uint64_t lo, hi; // inclusive
};

struct MinAlphaResult {
    double value = 0.0;                // min |alpha| over tuples with alpha != 0
    std::vector<std::uint64_t> argmin; // first achieving tuple in lex order
};

MinAlphaResult min_nonzero_alpha(const std::vector<Range>& ranges, const std::vector<int>& signs,
                                 std::uint64_t budget = kDefaultBudget, unsigned threads = 0);

struct CountQuery {
    std::vector<std::uint64_t> N; // coordinate j runs over the dyadic block (N_j, 2N_j]
    std::vector<int> signs;       // size k-1
    double delta = 0.0;           // count |alpha| < delta
};

std::uint64_t count_near_solutions(const CountQuery& q, std::uint64_t budget = kDefaultBudget,
                                   unsigned threads = 0);

// quadruples m_i in (M, 2M] with |m_1^c + m_2^c - m_3^c - m_4^c| <= delta * M^c;
// c must be non-integral
std::uint64_t count_rs(std::uint64_t M, double delta, double c,
                       std::uint64_t budget = kDefaultBudget, unsigned threads = 0);

} // namespace rsmoments
