#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

namespace aquascale {

class KahanSum {
public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  void scale(double s) {
    sum_ *= s;
    comp_ *= s;
  }
  double value() const { return sum_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Streaming log(sum(exp(t_i))). Terms are accumulated relative to the running
// maximum, so sums whose linear value underflows keep full relative accuracy.
class LogSumExp {
public:
  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > max_) {
      if (max_ != -std::numeric_limits<double>::infinity()) acc_.scale(std::exp(max_ - log_term));
      max_ = log_term;
      acc_.add(1.0);
    } else {
      acc_.add(std::exp(log_term - max_));
    }
  }
  double value() const {
    if (max_ == -std::numeric_limits<double>::infinity()) return max_;
    return max_ + std::log(acc_.value());
  }

private:
  double max_ = -std::numeric_limits<double>::infinity();
  KahanSum acc_;
};

inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

// log2(1 + exp(log_x)) without overflow for large log_x.
inline double log2_1p_exp(double log_x) {
  if (log_x > 36.0) return (log_x + std::log1p(std::exp(-log_x))) / std::numbers::ln2;
  return std::log1p(std::exp(log_x)) / std::numbers::ln2;
}

// Each index writes only its own output slot, so results do not depend on the
// worker count; reductions happen afterwards in index order.
template <class F>
void parallel_for_each_index(std::size_t count, F&& f) {
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, count), [&](const tbb::blocked_range<std::size_t>& r) {
    for (std::size_t i = r.begin(); i != r.end(); ++i) f(i);
  });
}

}  // namespace aquascale
