// Copyright 2026 The rwrs-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RWRS_EXACT_SUM_H_
#define RWRS_EXACT_SUM_H_

#include <cmath>
#include <vector>

namespace rwrs {

// Exact sum of doubles as a nonoverlapping floating-point expansion
// (Shewchuk 1997): components are stored by increasing magnitude and none is
// zero, so the represented value is zero iff the expansion is empty.
class ExactSum {
 public:
  void add(double b) {
    std::size_t out = 0;
    double q = b;
    for (double e : parts_) {
      double h;
      two_sum(q, e, q, h);
      if (h != 0.0) parts_[out++] = h;
    }
    parts_.resize(out);
    if (q != 0.0) parts_.push_back(q);
  }

  // Adds a * b exactly.
  void add_product(double a, double b) {
    const double p = a * b;
    const double e = std::fma(a, b, -p);
    add(e);
    add(p);
  }

  void add(const ExactSum& other) {
    for (double e : other.parts_) add(e);
  }
  void subtract(const ExactSum& other) {
    for (double e : other.parts_) add(-e);
  }

  bool is_zero() const { return parts_.empty(); }
  std::size_t size() const { return parts_.size(); }

  // Nearest double up to about one ulp.
  double value() const {
    double sum = 0.0;
    for (double e : parts_) sum += e;
    return sum;
  }

 private:
  static void two_sum(double a, double b, double& x, double& y) {
    x = a + b;
    const double bv = x - a;
    const double av = x - bv;
    y = (a - av) + (b - bv);
  }

  std::vector<double> parts_;
};

// Neumaier's compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      c_ += (sum_ - t) + x;
    } else {
      c_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace rwrs

#endif  // RWRS_EXACT_SUM_H_
