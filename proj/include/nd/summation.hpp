#pragma once

#include <cmath>
#include <complex>

namespace nd {

/// Neumaier-compensated accumulator. Terms must be added in a fixed order for
/// bit-reproducible results.
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

/// Componentwise compensated accumulator for complex terms.
class ComplexCompensatedSum {
public:
    void add(std::complex<double> term) {
        re_.add(term.real());
        im_.add(term.imag());
    }

    std::complex<double> value() const { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_;
    CompensatedSum im_;
};

}  // namespace nd
