#include "rsmoments/hiprec.hpp"

namespace rsmoments::hiprec {

namespace {

Real alpha_real(const std::uint64_t* ns, const int* signs, std::size_t k) {
    Real s = Real::fourth_root(ns[0]);
    for (std::size_t j = 1; j < k; ++j) {
        Real r = Real::fourth_root(ns[j]);
        if (signs[j - 1]) s.sub(r); else s.add(r);
    }
    return s;
}

} // namespace

double alpha_value(const std::uint64_t* ns, const int* signs, std::size_t k) {
    return alpha_real(ns, signs, k).to_double();
}

bool alpha_below(const std::uint64_t* ns, const int* signs, std::size_t k, double threshold) {
    return alpha_real(ns, signs, k).abs_below(threshold);
}

} // namespace rsmoments::hiprec
