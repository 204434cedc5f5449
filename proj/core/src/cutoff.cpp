#include "ktrg/cutoff.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ktrg/lattice.hpp"

namespace ktrg::cov {

namespace {

using boost::math::quadrature::gauss;
constexpr double kPi = boost::math::constants::pi<double>();
constexpr double kSMax = 160.0;
constexpr double kPanelWidth = 5.0;
constexpr int kDegree = 40;
constexpr int kNodePanels = 96;

}  // namespace

// Piecewise Chebyshev interpolant of fixed degree on equal panels.
struct Profile::Table {
  std::vector<std::vector<double>> coeffs;

  template <class F>
  void add_panel(F&& f, double a, double b) {
    const int n = kDegree + 1;
    std::vector<double> vals(n);
    for (int k = 0; k < n; ++k) {
      double x = std::cos(kPi * (k + 0.5) / n);
      vals[k] = f(0.5 * (a + b) + 0.5 * (b - a) * x);
    }
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += vals[k] * std::cos(kPi * i * (k + 0.5) / n);
      c[i] = 2.0 * s / n;
    }
    c[0] *= 0.5;
    coeffs.push_back(std::move(c));
  }

  double eval(std::size_t panel, double z) const {
    const auto& c = coeffs[panel];
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size() - 1; k >= 1; --k) {
      double b0 = c[k] + 2.0 * z * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    return c[0] + z * b1 - b2;
  }
};

const Profile& Profile::instance() {
  static const Profile p;
  return p;
}

double Profile::phi(double s) const {
  if (std::abs(s) >= 0.5) return 0.0;
  double q = 1.0 - 4.0 * s * s;
  q *= q;
  return q * q;
}

double Profile::H(double s) const {
  s = std::abs(s);
  if (s >= 1.0) return 0.0;
  // The integrand is a polynomial of degree 16, integrated exactly.
  return gauss<double, 10>::integrate([&](double v) { return phi(v) * phi(v + s); }, -0.5,
                                      0.5 - s);
}

Profile::Profile() {
  double h0 = H(0.0);
  double inner = gauss<double, 20>::integrate(
      [&](double t) { return (h0 - H(t)) / (t * t); }, 0.0, 1.0);
  norm_ = 2.0 * inner + 2.0 * h0;
  s_max_ = kSMax;

  const auto& x = gauss<double, 16>::abscissa();
  const auto& w = gauss<double, 16>::weights();
  double width = 1.0 / kNodePanels;
  for (int p = 0; p < kNodePanels; ++p) {
    double mid = (p + 0.5) * width;
    double half = 0.5 * width;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (int sgn : {-1, 1}) {
        if (x[i] == 0.0 && sgn < 0) continue;
        nodes_.push_back(mid + sgn * half * x[i]);
        weights_.push_back(half * w[i]);
      }
    }
  }
  h_at_nodes_.reserve(nodes_.size());
  for (double t : nodes_) h_at_nodes_.push_back(H(t));

  auto table = std::make_shared<Table>();
  for (double a = 0.0; a < kSMax; a += kPanelWidth) {
    table->add_panel([this](double s) { return U_direct(s); }, a, a + kPanelWidth);
  }
  table_ = std::move(table);
}

double Profile::U_direct(double s) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    double t = nodes_[i];
    double sn = std::sin(0.5 * s * t);
    double k = -2.0 * sn * sn / (t * t) + s * std::sin(s * t) / t;
    acc += weights_[i] * h_at_nodes_[i] * k;
  }
  return norm_ - 2.0 * acc;
}

double Profile::U(double s) const {
  s = std::abs(s);
  if (s >= kSMax) return 0.0;
  auto idx = std::min(static_cast<std::size_t>(s / kPanelWidth), table_->coeffs.size() - 1);
  double a = idx * kPanelWidth;
  return table_->eval(idx, (2.0 * (s - a) - kPanelWidth) / kPanelWidth);
}

double Profile::u(double rho) const {
  return U(rho / (2.0 * std::sqrt(2.0))) / norm_;
}

double Profile::band_weight(int n, double ta, double tb) const {
  if (n < 0 || tb <= ta) return 0.0;
  if (n == 0) return H(0.0) * (tb - ta);
  double lo = n / tb;
  double hi = ta > 0.0 ? std::min(1.0, n / ta) : 1.0;
  if (lo >= hi) return 0.0;
  double acc = 0.0;
  for (double a = lo; a < hi;) {
    double b = std::min(hi, 2.0 * a);
    acc += gauss<double, 20>::integrate([&](double s) { return H(s) / (s * s); }, a, b);
    a = b;
  }
  return n * acc;
}

std::vector<double> Profile::band_weights(double ta, double tb) const {
  int nmax = static_cast<int>(std::floor(tb));
  std::vector<double> c(static_cast<std::size_t>(nmax) + 1);
  for (int n = 0; n <= nmax; ++n) c[static_cast<std::size_t>(n)] = band_weight(n, ta, tb);
  return c;
}

double lattice_theta(double k0, double k1) {
  double c = 0.5 * (std::cos(k0) + std::cos(k1));
  // acos loses accuracy near theta = 0; use the half-angle form there.
  double s2 = 0.5 * (std::sin(0.5 * k0) * std::sin(0.5 * k0) +
                     std::sin(0.5 * k1) * std::sin(0.5 * k1));
  if (c > 0.5) return 2.0 * std::asin(std::sqrt(s2));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

double laplacian_symbol(double k0, double k1) {
  double a = std::sin(0.5 * k0);
  double b = std::sin(0.5 * k1);
  return 4.0 * (a * a + b * b);
}

double band_symbol(std::span<const double> c, double theta) {
  if (c.empty()) return 0.0;
  double x = std::cos(theta);
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t k = c.size() - 1; k >= 1; --k) {
    double b0 = 2.0 * c[k] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return (c[0] + x * b1 - b2) / (2.0 * Profile::instance().norm());
}

double tail_symbol(double T, double theta) {
  const Profile& p = Profile::instance();
  if (T <= 0.0) {
    double s = std::sin(0.5 * theta);
    return 1.0 / (8.0 * s * s);
  }
  double acc = 0.0;
  double limit = p.s_max() / T;
  for (int m = 0;; ++m) {
    double a = theta + 2.0 * kPi * m;
    double b = 2.0 * kPi * (m + 1) - theta;
    bool any = false;
    if (a < limit && a > 0.0) {
      acc += p.U(T * a) / (a * a);
      any = true;
    }
    if (b < limit) {
      acc += p.U(T * b) / (b * b);
      any = true;
    }
    if (!any) break;
  }
  return acc / (2.0 * p.norm());
}

CutoffFamily::CutoffFamily(int gamma, int M, int horizon) : gamma_(gamma), M_(M), horizon_(horizon) {
  if (gamma < 3 || gamma % 2 == 0) throw DomainError("gamma must be odd and >= 3");
  if (M < 1 || horizon < 0) throw DomainError("M >= 1 and horizon >= 0 required");
  const Profile& p = Profile::instance();
  weights_.resize(static_cast<std::size_t>(horizon) + 1);
  for (int h = 1; h <= horizon; ++h)
    weights_[static_cast<std::size_t>(h)] = p.band_weights(0.0, band_start(h));
}

double CutoffFamily::band_start(int h) const {
  return h == 0 ? 0.0 : 0.5 * static_cast<double>(ipow(gamma_, h));
}

double CutoffFamily::u(double p0, double p1) const {
  return Profile::instance().u(std::hypot(p0, p1));
}

double CutoffFamily::F(int h, double k0, double k1) const {
  if (h < 0 || h > horizon_) throw DomainError("fine scale outside the family horizon");
  if (h == 0) return 1.0;
  double lam = laplacian_symbol(k0, k1);
  if (lam == 0.0) return 1.0;
  return 1.0 - lam * band_symbol(weights_[static_cast<std::size_t>(h)], lattice_theta(k0, k1));
}

CutoffFamily build_cutoffs(int gamma, int M, int horizon) {
  CutoffFamily family(gamma, M, horizon);
  constexpr int grid = 64;
  for (int h = 0; h <= horizon; ++h) {
    for (int a = 0; a <= grid; ++a) {
      for (int b = 0; b <= a; ++b) {
        double f = family.F(h, kPi * a / grid, kPi * b / grid);
        if (f < -1e-12 || f > 1.0 + 1e-12)
          throw CheckFailure("cutoff F_" + std::to_string(h) + " leaves [0, 1]");
      }
    }
  }
  return family;
}

}  // namespace ktrg::cov
