#pragma once

#include <cmath>

namespace asx {

// Neumaier's variant of Kahan summation. Deterministic for a fixed order of
// additions, which the weighted averages rely on: summing the same terms in
// the same order through two accumulators gives bit-identical totals.
class CompensatedSum {
public:
    void add(double term) {
        const double t = sum_ + term;
        if (std::abs(sum_) >= std::abs(term)) {
            compensation_ += (sum_ - t) + term;
        } else {
            compensation_ += (term - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

}  // namespace asx
