#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ktrg/coefficients.hpp"

using namespace ktrg;
using namespace ktrg::cov;
using namespace ktrg::coeffs;

namespace {

const CovarianceStack& deep() {
  static const CovarianceStack s = [] {
    StackOptions o;
    o.tail = false;
    o.workers = 2;
    return decompose(Lattice::make(3, 6, 3, 0.0), build_cutoffs(3, 1, 6), o);
  }();
  return s;
}

const CovarianceStack& wide() {
  static const CovarianceStack s = [] {
    StackOptions o;
    o.tail = false;
    o.workers = 2;
    return decompose(Lattice::make(9, 3, 3, 0.0), build_cutoffs(3, 2, 3), o);
  }();
  return s;
}

double pow_int(double x, int n) { return std::pow(x, n); }

}  // namespace

TEST_CASE("directions and differences") {
  CHECK(offset(Dir::MinusE2) == Site{0, -1});
  CHECK(component(Site{3, -2}, Dir::MinusE2) == 2);
  const auto& g = deep().table(2);
  CHECK(d1(g, Dir::PlusE1, 0, 0) == doctest::Approx(g(1, 0) - g(0, 0)));
  CHECK(d1(g, Dir::PlusE1, 0, 0) == d1(g, Dir::MinusE2, 0, 0));
  CHECK(d2(g, Dir::PlusE1, Dir::MinusE1, 0, 0) == doctest::Approx(2 * g(0, 0) - 2 * g(1, 0)));
}

TEST_CASE("kernels vanish at the first scale and match their definitions") {
  const double a2 = kKtAlphaSq;
  WKernels w0(deep(), 0, a2);
  CHECK(w0.b(0, 0) == 0.0);
  CHECK(w0.e(1, 0) == 0.0);
  CHECK(w0.a(Dir::PlusE1, Dir::PlusE2, 0, 0) == 0.0);
  auto s0 = w0.summability();
  CHECK(s0.a == 0.0);
  CHECK(s0.c == 0.0);

  WKernels w1(deep(), 1, a2);
  const auto& g0 = deep().table(0);
  for (int y0 = -2; y0 <= 2; ++y0)
    for (int y1 = -2; y1 <= 2; ++y1)
      CHECK(w1.a(Dir::PlusE1, Dir::MinusE2, y0, y1) == 0.5 * d2(g0, Dir::PlusE1, Dir::MinusE2, y0, y1));

  const int j = 3;
  const auto& s = deep();
  WKernels w(s, j, a2);
  CHECK(w.radius() == s.radius(j - 1) + 2);
  for (Site y : {Site{0, 0}, Site{1, 0}, Site{2, 1}, Site{-3, 4}, Site{5, -5}}) {
    double wb = 0.0, wc = 0.0, wd = 0.0, we = 0.0;
    for (int n = 0; n < j; ++n) {
      double inner = 0.0, outer = 0.0;
      for (int i = n + 1; i < j; ++i) {
        inner += s.origin(i) - s(i, y.x0, y.x1);
        outer += s.origin(i) + s(i, y.x0, y.x1);
      }
      double gn = s(n, y.x0, y.x1);
      double pre = std::exp(-a2 * s.origin(n)) * pow_int(3.0, -4 * n);
      wb += std::exp(-a2 * inner) * pre * (std::exp(a2 * gn) - 1.0);
      wc += 0.5 * std::exp(-a2 * outer) * pre * (std::exp(-a2 * gn) - 1.0);
      double weight = std::exp(-0.5 * a2 * s.origin_sum(j - 1, n)) * pow_int(3.0, -2 * n);
      wd += 0.5 * std::sqrt(a2) * weight * d1(s.table(n), Dir::MinusE1, y.x0, y.x1);
      double sq = 0.0;
      for (Dir mu : kDirs) {
        double full = 0.0, upper = 0.0;
        for (int i = n; i < j; ++i) full += d1(s.table(i), mu, y.x0, y.x1);
        for (int i = n + 1; i < j; ++i) upper += d1(s.table(i), mu, y.x0, y.x1);
        sq += 0.5 * (full * full - upper * upper);
      }
      we += 0.25 * a2 * weight * sq;
    }
    CHECK(w.b(y.x0, y.x1) == doctest::Approx(wb).epsilon(1e-12));
    CHECK(w.c(y.x0, y.x1) == doctest::Approx(wc).epsilon(1e-12));
    CHECK(w.d(Dir::MinusE1, y.x0, y.x1) == doctest::Approx(wd).epsilon(1e-12));
    CHECK(w.e(y.x0, y.x1) == doctest::Approx(we).epsilon(1e-12));
  }
  const int far = s.radius(j - 1) + 3;
  CHECK(w.b(far, 0) == 0.0);
  CHECK(w.e(far, far) == 0.0);
}

TEST_CASE("summability norms stay bounded across scales") {
  for (int j = 1; j <= 4; ++j) {
    auto m = WKernels(deep(), j, kKtAlphaSq).summability();
    CHECK(m.a < 1.0);
    CHECK(m.b < 1.0);
    CHECK(m.c < 1.0);
    CHECK(m.d < 1.0);
    CHECK(m.e < 1.0);
  }
}

TEST_CASE("coefficients at L = 3 approach their limits") {
  auto c = compute(deep(), kKtAlphaSq, 3);
  REQUIRE(c.scales.size() == 5);
  CHECK(c.scales[2].a == doctest::Approx(0.005584).epsilon(1e-3));
  CHECK(c.scales[2].b == doctest::Approx(2.3524).epsilon(1e-4));
  CHECK(c.scales[3].a == doctest::Approx(0.004749).epsilon(1e-3));
  CHECK(c.scales[3].b == doctest::Approx(2.1881).epsilon(1e-4));
  auto lim = limit_constants(3, kKtAlphaSq, -0.39232106808);
  CHECK(c.scales[4].b == doctest::Approx(lim.b).epsilon(0.01));
  CHECK(c.scales[4].a == doctest::Approx(lim.a).epsilon(0.01));
  for (const auto& s : c.scales) CHECK(s.volume_factor == doctest::Approx(volume_factor(deep(), s.j, kKtAlphaSq)));

  auto serial = compute(deep(), kKtAlphaSq, 1);
  for (std::size_t k = 0; k < c.scales.size(); ++k) {
    CHECK(serial.scales[k].a == c.scales[k].a);
    CHECK(serial.scales[k].e3 == c.scales[k].e3);
  }
}

TEST_CASE("coefficients at L = 9") {
  auto c = compute(wide(), kKtAlphaSq, 2);
  REQUIRE(c.scales.size() == 2);
  CHECK(c.scales[1].a == doctest::Approx(0.01006).epsilon(2e-3));
  CHECK(c.scales[1].b == doctest::Approx(4.2735).epsilon(1e-4));
  CHECK(c.scales[1].volume_factor == doctest::Approx(0.998117).epsilon(1e-5));
  CHECK(c.scales[1].e3 > 0.0);
}

TEST_CASE("limit constants") {
  auto lim = limit_constants(5, kKtAlphaSq, 0.0);
  CHECK(lim.b == doctest::Approx(3.21888).epsilon(1e-5));
  CHECK(lim.a == doctest::Approx(8 * std::numbers::pi * std::numbers::pi * std::log(5.0)));
  auto l3 = limit_constants(3, kKtAlphaSq, -0.3);
  auto l9 = limit_constants(9, kKtAlphaSq, -0.3);
  CHECK(l3.a / l3.b == doctest::Approx(l9.a / l9.b));
  CHECK_THROWS_AS(limit_constants(3, 9 * std::numbers::pi, 0.0), DomainError);
}

TEST_CASE("volume factor") {
  CHECK(volume_factor(9, 0.0, kKtAlphaSq) == 81.0);
  const double g = std::log(9.0) / (2 * std::numbers::pi);
  CHECK(volume_factor(9, g, kKtAlphaSq) == doctest::Approx(1.0));
  CHECK(volume_factor(9, g, 9 * std::numbers::pi) < 1.0);
}

TEST_CASE("cancellation identities") {
  for (int j = 0; j < deep().scales(); ++j) {
    CHECK(second_difference_sum(deep(), j) < 1e-12);
    CHECK(moment_off_diagonal(deep(), j, kKtAlphaSq) < 1e-12);
  }
}

TEST_CASE("quadratic remainder is at least cubic") {
  for (Site dir : {Site{1, 0}, Site{1, 1}, Site{2, 1}}) {
    for (int n : {1, 2}) {
      Site y{dir.x0 * n, dir.x1 * n};
      Site y2{2 * y.x0, 2 * y.x1};
      double r = std::abs(e4_remainder(deep(), 5, kKtAlphaSq, y));
      double r2 = std::abs(e4_remainder(deep(), 5, kKtAlphaSq, y2));
      CHECK(r2 / r > 7.0);
    }
  }
  CHECK(e4_remainder(deep(), 3, kKtAlphaSq, Site{0, 0}) == 0.0);
}

TEST_CASE("scale range is validated") {
  CHECK_THROWS_AS(coeff_a(deep(), 0, kKtAlphaSq), DomainError);
  CHECK_THROWS_AS(coeff_b(deep(), 6, kKtAlphaSq), DomainError);
  CHECK_THROWS_AS(WKernels(deep(), 7, kKtAlphaSq), DomainError);
}
