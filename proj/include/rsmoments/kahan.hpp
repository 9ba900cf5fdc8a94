#pragma once
// Neumaier-compensated accumulator.  Error stays O(1) ulp of the total
// instead of growing with the number of terms; cheap enough for the hot
// summation loops (two two_sums per add when merging dd terms).

#include "rsmoments/dd.hpp"

namespace rsmoments {

struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }

    void add(dd v) {
        add(v.hi);
        add(v.lo);
    }

    void add(const CompensatedSum& o) {
        add(o.sum);
        add(o.comp);
    }

    double result() const { return sum + comp; }
    dd result_dd() const { return two_sum(sum, comp); }
};

} // namespace rsmoments
