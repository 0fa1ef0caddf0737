#pragma once

#include <cmath>

namespace gwmaxdeg {

// Neumaier compensated accumulator. The ratio tables divide quantities that
// sit within a few ulp of machine noise, so plain summation is not enough.
class CompensatedSum {
public:
    CompensatedSum() = default;
    explicit CompensatedSum(double x) : sum_(x) {}

    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace gwmaxdeg
