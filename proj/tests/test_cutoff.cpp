#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

#include "ktrg/cutoff.hpp"
#include "ktrg/lattice.hpp"

using namespace ktrg::cov;
using boost::math::quadrature::gauss;

namespace {

// Fourier transform of phi by brute quadrature.
double phi_hat(double s) {
  const Profile& p = Profile::instance();
  double acc = 0.0;
  const int panels = 40;
  for (int i = 0; i < panels; ++i) {
    double a = -0.5 + double(i) / panels;
    acc += gauss<double, 20>::integrate([&](double v) { return p.phi(v) * std::cos(s * v); }, a,
                                        a + 1.0 / panels);
  }
  return acc;
}

}  // namespace

TEST_CASE("normalization agrees with the momentum-space integral") {
  const Profile& p = Profile::instance();
  double direct = 0.0;
  const double top = 200.0;
  const int panels = 800;
  for (int i = 0; i < panels; ++i) {
    double a = top * i / panels;
    direct += gauss<double, 20>::integrate(
        [&](double s) {
          double f = phi_hat(s);
          return s * f * f;
        },
        a, a + top / panels);
  }
  CHECK(p.norm() == doctest::Approx(direct).epsilon(1e-9));
  CHECK(p.norm() == doctest::Approx(3.3436734693888894).epsilon(1e-12));
}

TEST_CASE("autocorrelation is even, nonnegative and supported on [-1, 1]") {
  const Profile& p = Profile::instance();
  CHECK(p.H(1.0) == 0.0);
  CHECK(p.H(1.3) == 0.0);
  for (double s = 0.0; s <= 1.0; s += 0.01) {
    CHECK(p.H(s) >= 0.0);
    CHECK(p.H(s) == p.H(-s));
  }
  double h0 = gauss<double, 20>::integrate([&](double v) { return p.phi(v) * p.phi(v); }, -0.5, 0.5);
  CHECK(p.H(0.0) == doctest::Approx(h0).epsilon(1e-14));
}

TEST_CASE("tail profile table matches direct quadrature and decreases") {
  const Profile& p = Profile::instance();
  CHECK(p.U(0.0) == doctest::Approx(p.norm()).epsilon(1e-13));
  double prev = p.U(0.0);
  for (double s = 0.05; s < 60.0; s += 0.37) {
    CHECK(std::abs(p.U(s) - p.U_direct(s)) < 1e-12);
    CHECK(p.U(s) <= prev + 1e-13);
    prev = p.U(s);
  }
  CHECK(p.u(0.0) == doctest::Approx(1.0));
  CHECK(std::abs(p.u(400.0)) < 1e-10);
}

TEST_CASE("band plus tail reproduces the inverse Laplacian symbol") {
  const Profile& p = Profile::instance();
  const double T = 40.5;
  auto c = p.band_weights(0.0, T);
  for (double theta : {0.3, 1.0, 2.5}) {
    double inv = 1.0 / (4.0 * (1.0 - std::cos(theta)));
    double sum = band_symbol(c, theta) + tail_symbol(T, theta);
    CHECK(sum == doctest::Approx(inv).epsilon(1e-11));
    CHECK(tail_symbol(0.0, theta) == doctest::Approx(inv).epsilon(1e-14));
  }
}

TEST_CASE("band weights are additive over adjacent bands") {
  const Profile& p = Profile::instance();
  auto lo = p.band_weights(0.0, 4.5);
  auto hi = p.band_weights(4.5, 13.5);
  auto all = p.band_weights(0.0, 13.5);
  for (std::size_t n = 0; n < all.size(); ++n) {
    double s = hi[n] + (n < lo.size() ? lo[n] : 0.0);
    CHECK(s == doctest::Approx(all[n]).epsilon(1e-13));
  }
}

TEST_CASE("cutoff family invariants") {
  auto fam = build_cutoffs(3, 1, 4);
  CHECK(fam.F(0, 0.7, -1.2) == 1.0);
  CHECK(fam.u(0.0, 0.0) == doctest::Approx(1.0));
  for (int h = 1; h <= 4; ++h) {
    double worst = 0.0;
    for (double p = 1e-3; p <= 0.1; p += 1e-3) {
      double f = fam.F(h, p, 0.0);
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
      worst = std::max(worst, (1.0 - f) / p);
    }
    CHECK(std::isfinite(worst));
    CHECK(worst < 10.0);
  }
  CHECK_THROWS_AS(build_cutoffs(4, 1, 2), ktrg::DomainError);
}

TEST_CASE("lattice theta matches its definition") {
  for (double k0 : {0.0, 0.01, 1.0, 3.0})
    for (double k1 : {0.0, 0.2, 2.0}) {
      double th = lattice_theta(k0, k1);
      CHECK(std::cos(th) == doctest::Approx(0.5 * (std::cos(k0) + std::cos(k1))).epsilon(1e-14));
      CHECK(4.0 * (1.0 - std::cos(th)) == doctest::Approx(laplacian_symbol(k0, k1)).epsilon(1e-12));
    }
}
