#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

#include "ktrg/covariance.hpp"

namespace ktrg::cov {

namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr double kTwoPi = boost::math::constants::two_pi<double>();
constexpr double kEulerGamma = boost::math::constants::euler<double>();

// Composite Gauss-Kronrod over [a, b] with panels no wider than `width`.
template <class F>
QuadratureResult composite(F&& f, double a, double b, double width) {
  QuadratureResult out;
  int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
  double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    double err = 0.0;
    out.value += gauss_kronrod<double, 31>::integrate(f, a + i * h, a + (i + 1) * h, 0, 0.0, &err);
    out.error += err;
  }
  return out;
}

// Beyond this radius the radial cutoff is below double precision noise.
double rho_max() { return 2.0 * std::sqrt(2.0) * Profile::instance().s_max(); }

// Radius where u has dropped below ~1e-11, enough for oscillatory pieces.
constexpr double kOscillatoryCut = 300.0;

}  // namespace

QuadratureResult tilde_c(const CutoffFamily& cutoffs, double x0, double x1) {
  const Profile& p = cutoffs.profile();
  const double g = cutoffs.gamma();
  const double r = std::hypot(x0, x1);
  auto f = [&](double rho) {
    if (rho == 0.0) return 0.0;
    return std::cyl_bessel_j(0.0, rho * r) * (p.u(rho) - p.u(g * rho)) / rho;
  };
  double width = r > 0.0 ? std::min(0.5, 1.0 / r) : 0.5;
  auto q = composite(f, 0.0, rho_max(), width);
  q.value /= kTwoPi;
  q.error /= kTwoPi;
  return q;
}

QuadratureResult continuum_normalized(double r) {
  const Profile& p = Profile::instance();
  auto osc = [&](double rho) {
    if (rho == 0.0) return 0.0;
    return (std::cyl_bessel_j(0.0, rho * r) - 1.0) * p.u(rho) / rho;
  };
  auto smooth = [&](double rho) { return -p.u(rho) / rho; };
  double cut = std::min(kOscillatoryCut, rho_max());
  auto q = composite(osc, 0.0, cut, std::min(0.5, 4.0 / std::max(r, 1.0)));
  if (cut < rho_max()) {
    auto t = composite(smooth, cut, rho_max(), 1.0);
    q.value += t.value;
    q.error += t.error;
  }
  q.value /= kTwoPi;
  q.error /= kTwoPi;
  return q;
}

CoulombConstant coulomb_constant_c(const CutoffFamily& cutoffs, double r_min, double r_max,
                                   int points, double residual_tol) {
  const Profile& p = cutoffs.profile();
  if (!(r_min > 0.0) || !(r_max > r_min) || points < 2) throw DomainError("bad fit window");
  CoulombConstant out;

  auto below = composite([&](double rho) { return rho == 0.0 ? 0.0 : (p.u(rho) - 1.0) / rho; }, 0.0,
                         1.0, 0.25);
  auto above = composite([&](double rho) { return p.u(rho) / rho; }, 1.0, rho_max(), 1.0);
  out.c_closed = (std::log(2.0) - kEulerGamma - below.value - above.value) / kTwoPi;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<double> values;
  for (int i = 0; i < points; ++i) {
    double r = r_min * std::pow(r_max / r_min, double(i) / (points - 1));
    double v = continuum_normalized(r).value;
    double lr = std::log(r);
    out.radii.push_back(r);
    values.push_back(v);
    out.flat.push_back(v + lr / kTwoPi);
    sx += lr;
    sy += v;
    sxx += lr * lr;
    sxy += lr * v;
  }
  const double n = points;
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double mean = 0.0;
  for (double f : out.flat) mean += f;
  mean /= n;
  out.c = mean;
  for (double f : out.flat) out.residual = std::max(out.residual, std::abs(f - mean));
  out.limit_w = std::pow(out.radii.back(), 4) * std::exp(4.0 * kTwoPi * values.back());
  if (out.residual > residual_tol)
    throw CheckFailure("continuum tail is not flat: residual " + std::to_string(out.residual));
  return out;
}

}  // namespace ktrg::cov
