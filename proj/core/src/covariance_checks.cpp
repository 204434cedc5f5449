#include "ktrg/covariance_checks.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ktrg::cov {

namespace {

constexpr double kTwoPi = boost::math::constants::two_pi<double>();

void require_dense(const CovarianceStack& stack) {
  if (stack.lattice().side() > kMaxDenseSide) throw DomainError("torus above the dense limit");
}

}  // namespace

double telescoping_error(const CovarianceStack& stack) {
  require_dense(stack);
  const Lattice& lat = stack.lattice();
  const int S = lat.side();
  auto W = torus_yukawa_table(lat);
  double worst = 0.0;
  for (int x0 = 0; x0 < S; ++x0) {
    for (int x1 = 0; x1 < S; ++x1) {
      Site x{x0, x1};
      double sum = 0.0;
      for (int j = 0; j < stack.scales(); ++j) sum += stack.torus(j, x);
      sum += stack.tail(x);
      worst = std::max(worst, std::abs(sum - W[static_cast<std::size_t>(x0) * S + x1]));
    }
  }
  return worst / std::abs(W[0]);
}

double LeakageReport::max_ratio() const {
  double m = 0.0;
  for (double r : ratio) m = std::max(m, r);
  return m;
}

LeakageReport leakage(const CovarianceStack& stack) {
  require_dense(stack);
  const Lattice& lat = stack.lattice();
  const int S = lat.side();
  const int L = lat.L();
  LeakageReport rep;
  for (int j = 0; j < stack.scales(); ++j) {
    double zero = scale_symbol(L, j, 0.0, 0.0);
    auto dense = periodic_transform(S, [&](int a, int b) {
      if (a == 0 && b == 0) return zero;
      return scale_symbol(L, j, kTwoPi * a / S, kTwoPi * b / S);
    });
    const long range = (ipow(L, j + 1) + 1) / 2;
    double outside = 0.0;
    double diff = 0.0;
    for (int x0 = 0; x0 < S; ++x0) {
      for (int x1 = 0; x1 < S; ++x1) {
        Site r = lat.reduce(Site{x0, x1});
        double v = dense[static_cast<std::size_t>(x0) * S + x1];
        if (std::max(std::abs(r.x0), std::abs(r.x1)) >= range) outside = std::max(outside, std::abs(v));
        diff = std::max(diff, std::abs(v - stack.torus(j, r)));
      }
    }
    rep.ratio.push_back(outside / stack.origin(j));
    rep.agreement.push_back(diff);
  }
  return rep;
}

std::vector<double> lowest_modes(const CovarianceStack& stack) {
  const Lattice& lat = stack.lattice();
  const int S = lat.side();
  std::vector<double> out;
  for (int j = 0; j < stack.scales(); ++j) {
    double lowest = std::numeric_limits<double>::infinity();
    if (S <= kMaxDenseSide) {
      for (int a = 0; a <= S / 2; ++a)
        for (int b = 0; b <= a; ++b)
          lowest = std::min(lowest, scale_symbol(lat.L(), j, kTwoPi * a / S, kTwoPi * b / S));
    } else {
      auto [ta, tb] = scale_band(lat.L(), j);
      constexpr int grid = 1 << 14;
      for (int i = 1; i <= grid; ++i) {
        double th = 0.5 * kTwoPi * i / grid;
        lowest = std::min(lowest, tail_symbol(ta, th) - tail_symbol(tb, th));
      }
    }
    out.push_back(lowest);
  }
  return out;
}

DiagonalLaw diagonal_law(const CovarianceStack& stack, int jmin) {
  const int L = stack.lattice().L();
  DiagonalLaw law;
  for (int j = 0; j < stack.scales(); ++j) {
    double d = stack.origin(j) - std::log(double(L)) / kTwoPi;
    law.deviation.push_back(d);
    law.scaled.push_back(std::abs(d) * std::pow(double(L), 0.25 * j));
  }
  if (jmin < stack.scales()) {
    double ref = law.scaled[static_cast<std::size_t>(jmin)];
    for (int j = jmin; j < stack.scales(); ++j)
      law.growth = std::max(law.growth, law.scaled[static_cast<std::size_t>(j)] / ref);
  }
  return law;
}

DerivativeScaling derivative_scaling(const CovarianceStack& stack) {
  static constexpr int dirs[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const int L = stack.lattice().L();
  DerivativeScaling out;
  for (int j = 0; j < stack.scales(); ++j) {
    const OctantTable& t = stack.table(j);
    const int r = t.radius() + 2;
    double d1 = 0.0;
    double d2 = 0.0;
    for (int a = 0; a <= r; ++a) {
      for (int b = 0; b <= a; ++b) {
        const double f = t(a, b);
        for (const auto& mu : dirs) {
          const double fm = t(a + mu[0], b + mu[1]);
          d1 = std::max(d1, std::abs(fm - f));
          for (const auto& nu : dirs) {
            double v = t(a + mu[0] + nu[0], b + mu[1] + nu[1]) - fm - t(a + nu[0], b + nu[1]) + f;
            d2 = std::max(d2, std::abs(v));
          }
        }
      }
    }
    double Lj = std::pow(double(L), j);
    out.first.push_back(d1 * Lj);
    out.second.push_back(d2 * Lj * Lj);
  }
  auto drift = [](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    return std::abs(v.back() / v[v.size() - 2] - 1.0);
  };
  out.bound_first = *std::max_element(out.first.begin(), out.first.end());
  out.bound_second = *std::max_element(out.second.begin(), out.second.end());
  out.drift_first = drift(out.first);
  out.drift_second = drift(out.second);
  return out;
}

double first_order_term(const CovarianceStack& stack) {
  double worst = 0.0;
  for (int j = 0; j < stack.scales(); ++j) {
    worst = std::max(worst, std::abs(stack(j, 1, 0) - stack(j, -1, 0)));
    worst = std::max(worst, std::abs(stack(j, 0, 1) - stack(j, 0, -1)));
  }
  return worst;
}

double fine_aggregation_error(const CovarianceStack& stack) {
  if (stack.fine().empty()) throw DomainError("stack was built without fine components");
  double worst = 0.0;
  for (int j = 0; j < stack.scales(); ++j) {
    const OctantTable& t = stack.table(j);
    const auto& parts = stack.fine()[static_cast<std::size_t>(j)];
    for (int a = 0; a <= t.radius(); ++a) {
      for (int b = 0; b <= a; ++b) {
        double s = 0.0;
        for (const auto& p : parts) s += p(a, b);
        worst = std::max(worst, std::abs(s - t.at(a, b)));
      }
    }
  }
  return worst;
}

}  // namespace ktrg::cov
