#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ktrg/cutoff.hpp"
#include "ktrg/lattice.hpp"
#include "ktrg/octant_table.hpp"

namespace ktrg::cov {

struct Tolerances {
  double leakage = 1e-6;
  double telescoping = 1e-8;
  double psd = 1e-10;
};

struct StackOptions {
  bool tail = true;             // needs a dense transform, side <= kMaxDenseSide
  bool fine_components = false;
  unsigned workers = 1;
  Tolerances tol{};
};

inline constexpr int kMaxDenseSide = 729;

// Multiscale split of the torus Yukawa potential. Scale j carries the band of
// the heat-like parameter t in [L^j/2, L^{j+1}/2] (j = 0 starts at t = 0), and
// is a polynomial of degree (L^{j+1}-1)/2 in the random walk operator, so its
// support is exactly |x|_1 <= (L^{j+1}-1)/2.
class CovarianceStack {
 public:
  CovarianceStack(Lattice lattice, Tolerances tol, std::vector<OctantTable> scales,
                  std::optional<OctantTable> tail,
                  std::vector<std::vector<OctantTable>> fine);

  const Lattice& lattice() const { return lattice_; }
  const Tolerances& tolerances() const { return tol_; }
  int scales() const { return static_cast<int>(scales_.size()); }

  const OctantTable& table(int j) const { return scales_.at(static_cast<std::size_t>(j)); }
  // Value on Z^2; equal to the torus value for points in the fundamental domain.
  double operator()(int j, int x0, int x1) const { return table(j)(x0, x1); }
  double torus(int j, Site x) const;
  double origin(int j) const { return table(j).at(0, 0); }
  // Gamma_n + ... + Gamma_j at the origin; zero when j < n.
  double origin_sum(int j, int n) const;

  bool has_tail() const { return tail_.has_value(); }
  const OctantTable& tail_table() const;
  double tail(Site x) const;

  const std::vector<std::vector<OctantTable>>& fine() const { return fine_; }

  // Support radius in the 1-norm of scale j.
  int radius(int j) const { return table(j).radius(); }

 private:
  Lattice lattice_;
  Tolerances tol_;
  std::vector<OctantTable> scales_;
  std::optional<OctantTable> tail_;
  std::vector<std::vector<OctantTable>> fine_;
  std::vector<double> prefix_;  // prefix_[j+1] = sum_{i<=j} Gamma_i(0)
};

// Band limits in t for scale j.
std::pair<double, double> scale_band(int L, int j);

// Polynomial-in-P kernel for a band; exact finite support.
OctantTable band_kernel(double ta, double tb);

CovarianceStack decompose(const Lattice& lattice, const CutoffFamily& cutoffs,
                          const StackOptions& options = {});

// Symbol of scale j at lattice momentum k, via the profile tail U.
double scale_symbol(int L, int j, double k0, double k1);

// Dense periodic transform: (1/S^2) sum_k f(k) e^{ikx} for an even symbol,
// returned row-major with x in [0, S).
std::vector<double> periodic_transform(int side, const std::function<double(int, int)>& symbol);

// W(x; m) on the torus.
double torus_yukawa(const Lattice& lattice, Site x);
std::vector<double> torus_yukawa_table(const Lattice& lattice);
// W(x|0), the zero-mode excluded massless limit of W(x; m) - W(0; m).
double normalized_potential(const Lattice& lattice, Site x);
std::vector<double> normalized_potential_table(const Lattice& lattice);

// Continuum objects of the same profile.
struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};
QuadratureResult tilde_c(const CutoffFamily& cutoffs, double x0, double x1);
// Gamma-tilde_{inf,0}(x|0) at distance r in the continuum.
QuadratureResult continuum_normalized(double r);

struct CoulombConstant {
  double c = 0.0;          // fitted over the window
  double c_closed = 0.0;   // closed form through the profile integral
  double slope = 0.0;      // fitted slope of Gamma-tilde(x|0) against ln|x|
  double residual = 0.0;   // max deviation of the flat tail from its mean
  double limit_w = 0.0;    // y^4 exp(8 pi Gamma-tilde(y|0)) at the largest radius
  std::vector<double> radii;
  std::vector<double> flat;  // Gamma-tilde(r|0) + ln r / 2 pi
};
CoulombConstant coulomb_constant_c(const CutoffFamily& cutoffs, double r_min = 50.0,
                                   double r_max = 200.0, int points = 16,
                                   double residual_tol = 1e-5);

// Serialization: header then rows "j x0 x1 value"; the tail uses j = R.
void write_stack(std::ostream& out, const CovarianceStack& stack);
CovarianceStack read_stack(std::istream& in);

}  // namespace ktrg::cov
