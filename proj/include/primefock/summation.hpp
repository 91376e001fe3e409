#pragma once

#include <cmath>
#include <complex>

namespace primefock {

/// Neumaier-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

struct ComplexSum {
  CompensatedSum re, im;
  void add(std::complex<double> z) {
    re.add(z.real());
    im.add(z.imag());
  }
  std::complex<double> value() const { return {re.value(), im.value()}; }
};

}  // namespace primefock
