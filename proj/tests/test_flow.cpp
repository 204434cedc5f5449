#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ktrg/flow.hpp"

using namespace ktrg;
using namespace ktrg::flow;

namespace {

constexpr double kC = -0.39232106808;

FlowCoefficients per_scale() {
  static const FlowCoefficients fc = [] {
    cov::StackOptions o;
    o.tail = false;
    auto s = cov::decompose(Lattice::make(3, 5, 3, 0.0), cov::build_cutoffs(3, 1, 5), o);
    auto rg = coeffs::compute(s, coeffs::kKtAlphaSq, 2);
    return FlowCoefficients::from_rg(rg, kC, coeffs::volume_factor(s, 0, coeffs::kKtAlphaSq));
  }();
  return fc;
}

FlowConfig config(Mode mode, bool surrogate, long horizon) {
  FlowConfig c;
  c.mode = mode;
  c.surrogate.enabled = surrogate;
  c.horizon = horizon;
  return c;
}

}  // namespace

TEST_CASE("Kosterlitz solution") {
  CHECK(kosterlitz_q(0.1, 11) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(kosterlitz_q(0.0, 17) == 0.0);
  CHECK(kosterlitz_q(-0.1, 11) == doctest::Approx(-0.05));
  CHECK_THROWS_AS(kosterlitz_q(0.1, 0), DomainError);
  for (double q1 : {0.001, 0.01, 0.3, 0.9}) {
    for (long j : {1L, 2L, 10L, 1000L, 99999L}) {
      double a = kosterlitz_q(q1, j);
      double b = kosterlitz_q(q1, j + 1);
      CHECK(std::abs((b - a) + a * b) < 1e-14);
    }
  }
  CHECK(envelope_h(0.01, 1) == doctest::Approx(0.01));
  CHECK(envelope_h(0.01, 101) == doctest::Approx(0.01 / std::pow(2.0, 1.5)));
}

TEST_CASE("configuration validation") {
  FlowConfig c;
  c.surrogate.rho = 1.0;
  CHECK_THROWS_AS(validate(c), DomainError);
  c = FlowConfig{};
  c.surrogate.c_F = -1.0;
  CHECK_THROWS_AS(validate(c), DomainError);
  c = FlowConfig{};
  c.horizon = 0;
  CHECK_THROWS_AS(trajectory(0.0, 0.0, c, FlowCoefficients::limits(9, kC)), DomainError);
}

TEST_CASE("coefficient tables") {
  auto lim = FlowCoefficients::limits(9, kC);
  CHECK(lim.b() == doctest::Approx(2.0 * std::log(9.0)));
  CHECK(lim.a_ratio(1) == 1.0);
  auto fc = per_scale();
  CHECK(fc.tabulated() == 4);
  CHECK(fc.a_ratio(5) == 1.0);
  CHECK(fc.volume(3) == doctest::Approx(0.98389).epsilon(1e-4));
  CHECK(fc.a_ratio(3) * fc.a() == doctest::Approx(0.005584).epsilon(1e-3));
}

TEST_CASE("single steps") {
  auto fc = FlowCoefficients::limits(9, kC);
  FlowState s{1, 0.3, 0.0, 0.0};
  FlowState n = step(s, fc, config(Mode::LimitConstants, false, 10));
  CHECK(n.j == 2);
  CHECK(n.x == 0.3);
  CHECK(n.y == 0.0);
  CHECK(n.kappa == 0.0);

  s = {1, 0.1, 0.2, 0.0};
  n = step(s, fc, config(Mode::LimitConstants, false, 10));
  CHECK(n.x == doctest::Approx(0.1 - 0.04));
  CHECK(n.y == doctest::Approx(0.2 - 0.02));

  FlowConfig sc = config(Mode::LimitConstants, true, 10);
  s = {1, 0.1, 0.2, 0.01};
  n = step(s, fc, sc);
  CHECK(n.x == doctest::Approx(0.1 - 0.04 + 0.01));
  CHECK(n.y == doctest::Approx(0.2 - 0.02 + 0.01 * 0.2));
  CHECK(n.kappa == doctest::Approx(0.2 * 0.01 + (1e-4 + 0.01 * 0.2 + 0.008)));

  CHECK_THROWS_AS(step(FlowState{1, NAN, 0.0, 0.0}, fc, sc), DomainError);
}

TEST_CASE("per-scale corrections reproduce the original recursion") {
  auto fc = per_scale();
  const double s = 0.002, z = 0.003;
  FlowState st = to_rescaled({s, z}, fc);
  st.j = 2;
  FlowState n = step(st, fc, config(Mode::PerScale, false, 10));
  Couplings back = to_original(n, fc);
  const double a2 = fc.a_ratio(2) * fc.a();
  const double b2 = fc.b_ratio(2) * fc.b();
  CHECK(back.s == doctest::Approx(s - a2 * z * z).epsilon(1e-13));
  CHECK(back.z == doctest::Approx(fc.volume(2) * z * (1.0 - b2 * s)).epsilon(1e-13));

  Couplings sz{0.004, -0.002};
  Couplings rt = to_original(to_rescaled(sz, fc), fc);
  CHECK(rt.s == doctest::Approx(sz.s).epsilon(1e-15));
  CHECK(rt.z == doctest::Approx(sz.z).epsilon(1e-15));

  FlowState f = first_step(sz, fc, config(Mode::PerScale, true, 10));
  CHECK(to_original(f, fc).z == doctest::Approx(fc.initial_volume() * sz.z));
  CHECK(to_original(f, fc).s == doctest::Approx(sz.s));
  CHECK(f.kappa == doctest::Approx(0.004 * 0.004));
}

TEST_CASE("invariant line and sign symmetry") {
  auto fc = per_scale();
  auto t = trajectory(0.2, 0.0, config(Mode::PerScale, false, 5000), fc);
  CHECK_FALSE(t.divergence_scale);
  for (const auto& s : t.states) {
    CHECK(s.y == 0.0);
    CHECK(s.x == 0.2);
  }
  for (bool sur : {false, true}) {
    FlowConfig c = config(Mode::PerScale, sur, 3000);
    auto p = trajectory(0.012, 0.01, c, fc);
    auto m = trajectory(0.012, -0.01, c, fc);
    REQUIRE(p.states.size() == m.states.size());
    for (std::size_t i = 0; i < p.states.size(); ++i) {
      CHECK(p.states[i].x == m.states[i].x);
      CHECK(p.states[i].y == -m.states[i].y);
      CHECK(p.states[i].kappa == m.states[i].kappa);
    }
  }
}

TEST_CASE("Kosterlitz tracking and escape") {
  auto fc = FlowCoefficients::limits(9, kC);
  const double q1 = 0.01;
  auto t = trajectory(q1, q1, config(Mode::LimitConstants, false, 10000), fc);
  CHECK_FALSE(t.divergence_scale);
  CHECK_FALSE(envelope_exit(t, q1));
  double worst = 0.0;
  for (const auto& s : t.states) worst = std::max(worst, std::abs(s.x - kosterlitz_q(q1, s.j)) / envelope_h(q1, s.j));
  CHECK(worst < 0.5);

  auto below = trajectory(-0.05, 0.05, config(Mode::LimitConstants, false, 100000), fc);
  REQUIRE(below.divergence_scale);
  CHECK(std::abs(below.states.back().y) > 1.0);

  FlowConfig keep = config(Mode::LimitConstants, false, 200);
  keep.stop_on_divergence = false;
  keep.ceiling = 0.06;
  auto cont = trajectory(-0.05, 0.05, keep, fc);
  CHECK(cont.divergence_scale);
  CHECK(cont.states.back().diverged);
}

TEST_CASE("deviation profile") {
  auto fc = FlowCoefficients::limits(9, kC);
  FlowConfig c = config(Mode::LimitConstants, false, 100000);
  auto zero = deviation_profile(trajectory(0.0, 0.0, c, fc), 0.0);
  CHECK_FALSE(zero.exponent_x);
  CHECK_FALSE(zero.exponent_y);

  auto f1 = deviation_profile(trajectory(0.01, 0.01, c, fc), 0.01);
  auto f2 = deviation_profile(trajectory(0.02, 0.02, c, fc), 0.02);
  REQUIRE(f1.exponent_x);
  REQUIRE(f2.exponent_x);
  CHECK(*f1.exponent_x <= -1.3);
  CHECK(std::abs(*f1.exponent_x - *f2.exponent_x) < 0.2);
  CHECK(f1.amplitude_x != doctest::Approx(f2.amplitude_x));

  CHECK_THROWS_AS(deviation_profile(trajectory(-0.05, 0.05, c, fc), 0.05), DomainError);
}

TEST_CASE("divergence time is monotone below the separatrix") {
  auto fc = FlowCoefficients::limits(9, kC);
  FlowConfig c = config(Mode::LimitConstants, false, 100000);
  std::vector<std::pair<double, double>> starts;
  for (int k = 0; k < 8; ++k) starts.emplace_back(0.01 - 0.002 * std::pow(0.5, k), 0.01);
  auto rows = sweep(starts, c, fc, 3);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    REQUIRE(rows[k].diverged);
    if (k > 0) CHECK(*rows[k].scale > *rows[k - 1].scale);
  }
  auto above = trajectory(0.0101, 0.01, c, fc);
  CHECK_FALSE(above.divergence_scale);
  CHECK(std::abs(above.states.back().y) < 1e-6);
}

TEST_CASE("per-scale and limit modes converge") {
  auto fc = per_scale();
  FlowState s{1, 0.01, 0.01, 0.0};
  double prev = INFINITY;
  for (long j = 1; j <= 4; ++j) {
    s.j = j;
    FlowState a = step(s, fc, config(Mode::PerScale, false, 10));
    FlowState b = step(s, fc, config(Mode::LimitConstants, false, 10));
    double d = std::abs(a.x - b.x) + std::abs(a.y - b.y);
    if (j >= 2) CHECK(d < prev);
    prev = d;
  }
  s.j = 5;
  FlowState a = step(s, fc, config(Mode::PerScale, false, 10));
  FlowState b = step(s, fc, config(Mode::LimitConstants, false, 10));
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
}

TEST_CASE("CSV output") {
  auto fc = FlowCoefficients::limits(9, kC);
  auto t = trajectory(0.01, 0.01, config(Mode::LimitConstants, false, 3), fc);
  std::ostringstream out;
  write_trajectory_csv(out, t, 0.01);
  std::string text = out.str();
  CHECK(text.rfind("j,x,y,kappa,q,x_minus_q,y_minus_q\n1,0.01,0.01,0,0.01,0,0\n", 0) == 0);
  std::vector<SweepRow> rows{{0.1, 0.2, false, std::nullopt}, {0.0, 0.3, true, 7L}};
  std::ostringstream s2;
  write_sweep_csv(s2, rows);
  CHECK(s2.str() == "x1,y1,diverged,divergence_scale\n0.1,0.2,0,\n0,0.3,1,7\n");
}
