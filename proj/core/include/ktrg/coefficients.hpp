#pragma once

#include <array>
#include <vector>

#include "ktrg/covariance.hpp"

namespace ktrg::coeffs {

// The four lattice directions +e1, +e2, -e1, -e2. A sum over them carries a
// factor 1/2, so that it matches the sum over the two positive directions on
// symmetric summands.
enum class Dir { PlusE1, PlusE2, MinusE1, MinusE2 };
inline constexpr std::array<Dir, 4> kDirs{Dir::PlusE1, Dir::PlusE2, Dir::MinusE1, Dir::MinusE2};
Site offset(Dir d);
inline int component(Site y, Dir d) {
  Site o = offset(d);
  return y.x0 * o.x0 + y.x1 * o.x1;
}

inline constexpr double kKtAlphaSq = 8.0 * 3.14159265358979323846;

// Forward differences of a scale table on Z^2.
double d1(const cov::OctantTable& t, Dir mu, int y0, int y1);
double d2(const cov::OctantTable& t, Dir mu, Dir nu, int y0, int y1);

// Irrelevant kernels at scale j. Symmetric kernels are tabulated on the
// octant; directional ones are evaluated from the scale tables on demand.
class WKernels {
 public:
  WKernels(const cov::CovarianceStack& stack, int j, double alpha_sq);

  int scale() const { return j_; }
  double alpha_sq() const { return alpha_sq_; }
  // All kernels vanish for |y|_inf > radius().
  int radius() const { return radius_; }

  double a(Dir mu, Dir nu, int y0, int y1) const;
  double b(int y0, int y1) const { return b_(y0, y1); }
  double c(int y0, int y1) const { return c_(y0, y1); }
  double d(Dir mu, int y0, int y1) const;
  double e(int y0, int y1) const { return e_(y0, y1); }

  const cov::OctantTable& b_table() const { return b_; }

  struct Summability {
    double a = 0.0;  // L^{-j} sum |w_a| |y|, max over direction pairs
    double b = 0.0;  // L^{-j} sum |w_b| |y|^3
    double c = 0.0;  // L^{2j} sum |w_c|
    double d = 0.0;  // L^{j} sum |w_d|, max over directions
    double e = 0.0;  // L^{j} sum |w_e| |y|
  };
  Summability summability() const;

 private:
  const cov::CovarianceStack* stack_;
  int j_;
  double alpha_sq_;
  int radius_;
  cov::OctantTable b_, c_, e_;
  std::vector<double> d_weight_;  // per n: (alpha/2) e^{-(alpha^2/2) Gamma_{j-1,n}(0)} L^{-2n}
};

struct ScaleCoefficients {
  int j = 0;
  double a = 0.0;
  double b = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  double e4 = 0.0;
  double volume_factor = 0.0;
};

struct RgCoefficients {
  int L = 0;
  double alpha_sq = kKtAlphaSq;
  std::vector<ScaleCoefficients> scales;  // j = 1..R-1
};

double coeff_a(const cov::CovarianceStack& stack, int j, double alpha_sq);
double coeff_b(const cov::CovarianceStack& stack, int j, double alpha_sq);
struct EnergyCoefficients {
  double e2 = 0.0;
  double e3 = 0.0;
  double e4 = 0.0;
};
EnergyCoefficients energy_coeffs(const cov::CovarianceStack& stack, int j, double alpha_sq);
double volume_factor(const cov::CovarianceStack& stack, int j, double alpha_sq);
double volume_factor(int L, double gamma_origin, double alpha_sq);

RgCoefficients compute(const cov::CovarianceStack& stack, double alpha_sq, unsigned workers = 1);

struct LimitConstants {
  double a = 0.0;
  double b = 0.0;
};
// Limits of a_j and b_j at alpha^2 = 8 pi, for a continuum constant c.
LimitConstants limit_constants(int L, double alpha_sq, double c);

// The summand of the first sum of e4 at y (its Taylor remainder).
double e4_remainder(const cov::CovarianceStack& stack, int j, double alpha_sq, Site y);

// Sum_y d^mu d^nu Gamma_j(y), max over direction pairs.
double second_difference_sum(const cov::CovarianceStack& stack, int j);
// Off-diagonal part of sum_y e^{-a Gamma_j(0)} (e^{a Gamma_j(y)} - 1) y^mu y^nu.
double moment_off_diagonal(const cov::CovarianceStack& stack, int j, double alpha_sq);

}  // namespace ktrg::coeffs
