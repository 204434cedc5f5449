#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ktrg {

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Site {
  int x0 = 0;
  int x1 = 0;
  friend bool operator==(Site, Site) = default;
};

constexpr std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Periodic square of side L^R with a fine base gamma, gamma^M = L.
class Lattice {
 public:
  static Lattice make(int L, int R, int gamma = 3, double mass = 0.0);

  int L() const { return L_; }
  int R() const { return R_; }
  int gamma() const { return gamma_; }
  int M() const { return M_; }
  double mass() const { return mass_; }
  int side() const { return side_; }
  int half() const { return (side_ - 1) / 2; }

  // Representative in [-half, half].
  int reduce(int x) const {
    int r = x % side_;
    if (r < 0) r += side_;
    return r > half() ? r - side_ : r;
  }
  Site reduce(Site s) const { return {reduce(s.x0), reduce(s.x1)}; }

  Lattice with_mass(double m) const;

 private:
  Lattice(int L, int R, int gamma, int M, double mass);
  int L_, R_, gamma_, M_;
  double mass_;
  int side_;
};

}  // namespace ktrg
