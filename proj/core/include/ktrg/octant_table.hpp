#pragma once

#include <cstdlib>
#include <span>
#include <utility>
#include <vector>

namespace ktrg::cov {

// A function on Z^2 that is invariant under the lattice symmetries and
// vanishes outside the square |x|_inf <= radius, stored on the octant
// radius >= a >= b >= 0.
class OctantTable {
 public:
  OctantTable() = default;
  explicit OctantTable(int radius)
      : radius_(radius), data_(index(radius, radius) + 1, 0.0) {}

  int radius() const { return radius_; }
  bool empty() const { return radius_ < 0; }

  double operator()(int x0, int x1) const {
    int a = std::abs(x0);
    int b = std::abs(x1);
    if (b > a) std::swap(a, b);
    if (a > radius_) return 0.0;
    return data_[index(a, b)];
  }

  double& at(int a, int b) { return data_[index(a, b)]; }
  double at(int a, int b) const { return data_[index(a, b)]; }

  std::span<double> row(int a) { return {data_.data() + index(a, 0), std::size_t(a) + 1}; }
  std::span<const double> row(int a) const {
    return {data_.data() + index(a, 0), std::size_t(a) + 1};
  }

  std::span<const double> raw() const { return data_; }

  static std::size_t index(int a, int b) {
    return std::size_t(a) * std::size_t(a + 1) / 2 + std::size_t(b);
  }

 private:
  int radius_ = -1;
  std::vector<double> data_;
};

}  // namespace ktrg::cov
