#include "ktrg/covariance.hpp"

#include <Eigen/Dense>

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "ktrg/parallel.hpp"

namespace ktrg::cov {

namespace {

constexpr double kTwoPi = boost::math::constants::two_pi<double>();

double folded(const OctantTable& t, int a, int b) {
  a = std::abs(a);
  b = std::abs(b);
  if (b > a) std::swap(a, b);
  return t.at(a, b);
}

double mode(int side, int k) { return kTwoPi * k / side; }

}  // namespace

CovarianceStack::CovarianceStack(Lattice lattice, Tolerances tol, std::vector<OctantTable> scales,
                                 std::optional<OctantTable> tail,
                                 std::vector<std::vector<OctantTable>> fine)
    : lattice_(lattice),
      tol_(tol),
      scales_(std::move(scales)),
      tail_(std::move(tail)),
      fine_(std::move(fine)) {
  prefix_.assign(scales_.size() + 1, 0.0);
  for (std::size_t j = 0; j < scales_.size(); ++j) prefix_[j + 1] = prefix_[j] + scales_[j].at(0, 0);
}

double CovarianceStack::torus(int j, Site x) const {
  Site r = lattice_.reduce(x);
  return table(j)(r.x0, r.x1);
}

double CovarianceStack::origin_sum(int j, int n) const {
  if (j < n) return 0.0;
  if (n < 0 || j >= scales()) throw DomainError("scale out of range");
  // Summed in increasing scale order to stay reproducible.
  double s = 0.0;
  for (int i = n; i <= j; ++i) s += origin(i);
  return s;
}

const OctantTable& CovarianceStack::tail_table() const {
  if (!tail_) throw DomainError("stack was built without a tail");
  return *tail_;
}

double CovarianceStack::tail(Site x) const {
  Site r = lattice_.reduce(x);
  return tail_table()(r.x0, r.x1);
}

std::pair<double, double> scale_band(int L, int j) {
  double lo = j == 0 ? 0.0 : 0.5 * static_cast<double>(ipow(L, j));
  double hi = 0.5 * static_cast<double>(ipow(L, j + 1));
  return {lo, hi};
}

OctantTable band_kernel(double ta, double tb) {
  const Profile& profile = Profile::instance();
  std::vector<double> c = profile.band_weights(ta, tb);
  const int K = static_cast<int>(c.size()) - 1;
  const double scale = 1.0 / (2.0 * profile.norm());

  OctantTable acc(K);
  acc.at(0, 0) = c[0];
  if (K == 0) {
    acc.at(0, 0) *= scale;
    return acc;
  }

  // Chebyshev recurrence T_{n+1}(P) = 2 P T_n(P) - T_{n-1}(P) applied to the
  // delta at the origin, folded into the octant.
  OctantTable prev(K + 1);
  OctantTable cur(K + 1);
  prev.at(0, 0) = 1.0;
  cur.at(1, 0) = 0.25;
  acc.at(1, 0) += 2.0 * c[1] * 0.25;

  for (int n = 1; n < K; ++n) {
    const int next = n + 1;
    const double w = 2.0 * c[static_cast<std::size_t>(next)];
    for (int a = 0; a <= next; ++a) {
      const int bmax = std::min(a, next - a);
      const int b0 = (a + next) % 2;
      auto rp = cur.row(a + 1);
      auto r0 = cur.row(a);
      auto out = prev.row(a);
      auto dst = acc.row(a);
      for (int b = b0; b <= bmax; b += 2) {
        double s;
        if (b >= 1 && b <= a - 1) {
          auto rm = cur.row(a - 1);
          s = rp[b] + rm[b] + r0[b + 1] + r0[b - 1];
        } else {
          s = folded(cur, a + 1, b) + folded(cur, a - 1, b) + folded(cur, a, b + 1) +
              folded(cur, a, b - 1);
        }
        const double v = 0.5 * s - out[b];
        out[b] = v;
        dst[b] += w * v;
      }
    }
    std::swap(prev, cur);
  }

  for (int a = 0; a <= K; ++a)
    for (double& v : acc.row(a)) v *= scale;
  return acc;
}

double scale_symbol(int L, int j, double k0, double k1) {
  auto [ta, tb] = scale_band(L, j);
  double theta = lattice_theta(k0, k1);
  if (theta == 0.0) {
    auto c = Profile::instance().band_weights(ta, tb);
    double s = c[0];
    for (std::size_t n = 1; n < c.size(); ++n) s += 2.0 * c[n];
    return s / (2.0 * Profile::instance().norm());
  }
  return tail_symbol(ta, theta) - tail_symbol(tb, theta);
}

std::vector<double> periodic_transform(int side, const std::function<double(int, int)>& symbol) {
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto S = static_cast<Eigen::Index>(side);
  Mat C(S, S);
  for (Eigen::Index x = 0; x < S; ++x)
    for (Eigen::Index k = 0; k < S; ++k) C(x, k) = std::cos(mode(side, static_cast<int>((x * k) % S)));
  Mat A(S, S);
  for (Eigen::Index a = 0; a < S; ++a)
    for (Eigen::Index b = 0; b < S; ++b) A(a, b) = symbol(static_cast<int>(a), static_cast<int>(b));
  Mat W = C * A * C.transpose();
  W /= static_cast<double>(S) * static_cast<double>(S);
  return {W.data(), W.data() + W.size()};
}

namespace {

OctantTable pack_periodic(int side, const std::vector<double>& dense) {
  const int half = (side - 1) / 2;
  OctantTable t(half);
  for (int a = 0; a <= half; ++a)
    for (int b = 0; b <= a; ++b) t.at(a, b) = dense[static_cast<std::size_t>(a) * side + b];
  return t;
}

double yukawa_symbol(int side, double m, int a, int b) {
  return 1.0 / (m * m + laplacian_symbol(mode(side, a), mode(side, b)));
}

}  // namespace

CovarianceStack decompose(const Lattice& lattice, const CutoffFamily& cutoffs,
                          const StackOptions& options) {
  if (cutoffs.gamma() != lattice.gamma() || cutoffs.M() != lattice.M())
    throw DomainError("cutoff family does not match the lattice fine base");
  const int L = lattice.L();
  const int R = lattice.R();

  auto scales = parallel_map(static_cast<std::size_t>(R), options.workers, [&](std::size_t j) {
    auto [ta, tb] = scale_band(L, static_cast<int>(j));
    return band_kernel(ta, tb);
  });

  std::vector<std::vector<OctantTable>> fine;
  if (options.fine_components) {
    const int g = lattice.gamma();
    const int M = lattice.M();
    fine = parallel_map(static_cast<std::size_t>(R), options.workers, [&](std::size_t j) {
      std::vector<OctantTable> parts;
      for (int h = static_cast<int>(j) * M; h < (static_cast<int>(j) + 1) * M; ++h) {
        double lo = h == 0 ? 0.0 : 0.5 * static_cast<double>(ipow(g, h));
        double hi = 0.5 * static_cast<double>(ipow(g, h + 1));
        parts.push_back(band_kernel(lo, hi));
      }
      return parts;
    });
  }

  // Positive semidefiniteness on the torus modes, or on a dense theta grid
  // when the torus is too large to list.
  const int side = lattice.side();
  for (int j = 0; j < R; ++j) {
    double lowest = std::numeric_limits<double>::infinity();
    if (side <= kMaxDenseSide) {
      for (int a = 0; a <= side / 2; ++a)
        for (int b = 0; b <= a; ++b)
          lowest = std::min(lowest, scale_symbol(L, j, mode(side, a), mode(side, b)));
    } else {
      constexpr int grid = 1 << 14;
      for (int i = 1; i <= grid; ++i) {
        double th = boost::math::constants::pi<double>() * i / grid;
        auto [ta, tb] = scale_band(L, j);
        lowest = std::min(lowest, tail_symbol(ta, th) - tail_symbol(tb, th));
      }
    }
    if (lowest < -options.tol.psd)
      throw CheckFailure("negative Fourier mode " + std::to_string(lowest) + " at scale " +
                         std::to_string(j));
  }

  std::optional<OctantTable> tail;
  if (options.tail) {
    if (side > kMaxDenseSide) throw DomainError("tail requested on a torus above the dense limit");
    const double m = lattice.mass();
    if (!(m > 0.0)) throw DomainError("tail needs a positive mass");
    const double T = scale_band(L, R - 1).second;
    double zero_mode = 1.0 / (m * m);
    for (int j = 0; j < R; ++j) zero_mode -= scale_symbol(L, j, 0.0, 0.0);
    auto dense = periodic_transform(side, [&](int a, int b) {
      if (a == 0 && b == 0) return zero_mode;
      double k0 = mode(side, a);
      double k1 = mode(side, b);
      double lam = laplacian_symbol(k0, k1);
      return 1.0 / (m * m + lam) - 1.0 / lam + tail_symbol(T, lattice_theta(k0, k1));
    });
    tail = pack_periodic(side, dense);
  }

  return CovarianceStack(lattice, options.tol, std::move(scales), std::move(tail), std::move(fine));
}

double torus_yukawa(const Lattice& lattice, Site x) {
  const double m = lattice.mass();
  if (!(m > 0.0)) throw DomainError("torus_yukawa needs m > 0; use normalized_potential");
  const int S = lattice.side();
  Site r = lattice.reduce(x);
  double acc = 0.0;
  for (int a = 0; a < S; ++a) {
    for (int b = 0; b < S; ++b) {
      long phase = (static_cast<long>(a) * r.x0 + static_cast<long>(b) * r.x1) % S;
      if (phase < 0) phase += S;
      acc += std::cos(mode(S, static_cast<int>(phase))) * yukawa_symbol(S, m, a, b);
    }
  }
  return acc / (static_cast<double>(S) * S);
}

std::vector<double> torus_yukawa_table(const Lattice& lattice) {
  const double m = lattice.mass();
  if (!(m > 0.0)) throw DomainError("torus_yukawa needs m > 0; use normalized_potential");
  const int S = lattice.side();
  if (S > kMaxDenseSide) throw DomainError("torus above the dense limit");
  return periodic_transform(S, [&](int a, int b) { return yukawa_symbol(S, m, a, b); });
}

double normalized_potential(const Lattice& lattice, Site x) {
  const int S = lattice.side();
  Site r = lattice.reduce(x);
  double acc = 0.0;
  for (int a = 0; a < S; ++a) {
    for (int b = 0; b < S; ++b) {
      if (a == 0 && b == 0) continue;
      long phase = (static_cast<long>(a) * r.x0 + static_cast<long>(b) * r.x1) % S;
      if (phase < 0) phase += S;
      double lam = laplacian_symbol(mode(S, a), mode(S, b));
      acc += (std::cos(mode(S, static_cast<int>(phase))) - 1.0) / lam;
    }
  }
  return acc / (static_cast<double>(S) * S);
}

std::vector<double> normalized_potential_table(const Lattice& lattice) {
  const int S = lattice.side();
  if (S > kMaxDenseSide) throw DomainError("torus above the dense limit");
  auto t = periodic_transform(S, [&](int a, int b) {
    if (a == 0 && b == 0) return 0.0;
    return 1.0 / laplacian_symbol(mode(S, a), mode(S, b));
  });
  const double w0 = t[0];
  for (double& v : t) v -= w0;
  t[0] = 0.0;
  return t;
}

}  // namespace ktrg::cov
