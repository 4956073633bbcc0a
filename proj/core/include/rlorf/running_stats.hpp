#pragma once

#include <cstdint>

namespace rlorf {

// Sufficient statistics of a stream of regression targets.
struct RunningStats {
  std::uint64_t count = 0;
  double sum_y = 0.0;
  double sum_y_sq = 0.0;

  void push(double y) {
    ++count;
    sum_y += y;
    sum_y_sq += y * y;
  }

  double mean() const { return count == 0 ? 0.0 : sum_y / static_cast<double>(count); }

  // Residual sum of squares about the mean; 0 for an empty accumulator.
  double rss() const {
    if (count == 0) return 0.0;
    return sum_y_sq - sum_y * sum_y / static_cast<double>(count);
  }

  RunningStats& operator+=(const RunningStats& other) {
    count += other.count;
    sum_y += other.sum_y;
    sum_y_sq += other.sum_y_sq;
    return *this;
  }

  friend RunningStats operator+(RunningStats a, const RunningStats& b) { return a += b; }
  bool operator==(const RunningStats&) const = default;
};

}  // namespace rlorf
