#pragma once

#include <memory>
#include <span>
#include <vector>

namespace ktrg::cov {

// Smooth compactly supported profile phi(s) = (1 - 4s^2)^4 on |s| <= 1/2 and
// its autocorrelation H = phi * phi, supported on [-1, 1] with nonnegative
// Fourier transform. Scale bands of the covariance are weighted averages of
// H(n / t) over t; everything below is derived from H.
class Profile {
 public:
  static const Profile& instance();

  double phi(double s) const;
  double H(double s) const;

  // N = integral_0^inf s Hhat(s) ds, the normalization of the t-integral.
  double norm() const { return norm_; }

  // U(s): the part of 1/theta^2 (times N) carried by t >= T, as a function of
  // s = T theta. U(0) = N, rapid decay for large s.
  double U(double s) const;
  double U_direct(double s) const;
  double s_max() const { return s_max_; }

  // Continuum radial cutoff u(rho) = U(rho / 2 sqrt 2) / N; u(0) = 1.
  double u(double rho) const;

  // c_n = integral_{ta}^{tb} H(n / t) dt for n = 0..floor(tb).
  std::vector<double> band_weights(double ta, double tb) const;
  double band_weight(int n, double ta, double tb) const;

 private:
  Profile();
  struct Table;
  double norm_ = 0.0;
  double s_max_ = 0.0;
  std::vector<double> nodes_, weights_, h_at_nodes_;
  std::shared_ptr<const Table> table_;
};

// Lattice momentum helpers. theta is defined by cos(theta) = (cos k0 + cos k1)/2
// so that the lattice Laplacian symbol is 4 (1 - cos theta).
double lattice_theta(double k0, double k1);
double laplacian_symbol(double k0, double k1);

// (1/2N) [c_0 + 2 sum_n c_n cos(n theta)]
double band_symbol(std::span<const double> c, double theta);

// (1/2N) sum_m U(T |theta + 2 pi m|) / (theta + 2 pi m)^2, theta in (0, pi].
double tail_symbol(double T, double theta);

// Family of momentum cutoffs on the fine scales h = 0..horizon.
class CutoffFamily {
 public:
  CutoffFamily(int gamma, int M, int horizon);

  int gamma() const { return gamma_; }
  int M() const { return M_; }
  int horizon() const { return horizon_; }

  double u(double p0, double p1) const;
  // Fraction of the lattice covariance at momentum k left after removing
  // fine scales below h. F_0 = 1.
  double F(int h, double k0, double k1) const;
  double band_start(int h) const;

  const Profile& profile() const { return Profile::instance(); }

 private:
  int gamma_, M_, horizon_;
  std::vector<std::vector<double>> weights_;
};

CutoffFamily build_cutoffs(int gamma, int M, int horizon);

}  // namespace ktrg::cov
