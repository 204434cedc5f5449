#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ktrg/manifold.hpp"

using namespace ktrg;
using namespace ktrg::manifold;

namespace {

constexpr double kC = -0.39232106808;

flow::FlowCoefficients per_scale() {
  static const flow::FlowCoefficients fc = [] {
    cov::StackOptions o;
    o.tail = false;
    auto s = cov::decompose(Lattice::make(3, 5, 3, 0.0), cov::build_cutoffs(3, 1, 5), o);
    auto rg = coeffs::compute(s, coeffs::kKtAlphaSq, 2);
    return flow::FlowCoefficients::from_rg(rg, kC, coeffs::volume_factor(s, 0, coeffs::kKtAlphaSq));
  }();
  return fc;
}

ManifoldProblem problem(double y1, flow::Mode mode) {
  ManifoldProblem p;
  p.y1 = y1;
  p.flow.mode = mode;
  p.coeffs = mode == flow::Mode::PerScale ? per_scale() : flow::FlowCoefficients::limits(3, kC);
  return p;
}

}  // namespace

TEST_CASE("diagonal coordinates") {
  CHECK(diagonalize(1, 0) == std::pair{1.0, 1.0});
  CHECK(diagonalize(0, 1) == std::pair{2.0, -1.0});
  for (auto [u, v] : {std::pair{0.3, -0.7}, std::pair{1e-5, 3e-6}, std::pair{-2.5, 11.0}}) {
    auto [wp, wm] = diagonalize(u, v);
    auto [u2, v2] = undiagonalize(wp, wm);
    CHECK(std::abs(u2 - u) < 1e-15 * std::max(1.0, std::abs(u)));
    CHECK(std::abs(v2 - v) < 1e-15 * std::max(1.0, std::abs(v)));
  }
}

TEST_CASE("zero coupling") {
  ManifoldProblem p = problem(0.0, flow::Mode::PerScale);
  p.J = 100;
  auto t = apply_T(WeightedSequence::zeros(100), p);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(t.w_plus[k] + t.w_minus[k] + t.kappa[k] == 0.0);
  auto fp = solve_fixed_point(p);
  CHECK(fp.sigma == 0.0);
  CHECK(fp.iterations == 0);
}

TEST_CASE("problem validation") {
  ManifoldProblem p = problem(0.2, flow::Mode::LimitConstants);
  CHECK_THROWS_AS(solve_fixed_point(p), DomainError);
  p = problem(0.01, flow::Mode::LimitConstants);
  p.tau = 0.0;
  CHECK_THROWS_AS(solve_fixed_point(p), DomainError);
  p = problem(0.01, flow::Mode::LimitConstants);
  CHECK_THROWS_AS(apply_T(WeightedSequence::zeros(10), p), DomainError);
  CHECK_THROWS_AS(empirical_contraction(p, 1, 0), DomainError);
}

TEST_CASE("fixed point agrees with shooting") {
  for (flow::Mode mode : {flow::Mode::LimitConstants, flow::Mode::PerScale}) {
    for (double y1 : {0.005, 0.01, 0.02}) {
      ManifoldProblem p = problem(y1, mode);
      auto fp = solve_fixed_point(p);
      double sh = solve_shooting(y1, p.flow, p.coeffs, {0.0, 0.1});
      CHECK(std::abs(fp.sigma - sh) <= 1e-8);
      CHECK(std::abs(fp.sigma) <= 2.0 * p.eps1);
      auto image = apply_T(fp.seq, p);
      CHECK(weighted_distance(image, fp.seq, p) < 1e-12);
      if (mode == flow::Mode::LimitConstants) CHECK(fp.sigma == doctest::Approx(y1).epsilon(1e-12));
    }
  }
}

TEST_CASE("surrogate feedback moves the separatrix") {
  ManifoldProblem p = problem(0.01, flow::Mode::PerScale);
  p.flow.surrogate.enabled = true;
  auto fp = solve_fixed_point(p);
  double sh = solve_shooting(p.y1, p.flow, p.coeffs, {0.0, 0.1});
  CHECK(std::abs(fp.sigma - sh) <= 1e-8);
  double plain = solve_fixed_point(problem(0.01, flow::Mode::PerScale)).sigma;
  CHECK(fp.sigma != doctest::Approx(plain).epsilon(1e-6));
  for (double k : fp.seq.kappa) CHECK(k >= 0.0);
}

TEST_CASE("odd coupling gives the same separatrix") {
  ManifoldProblem p = problem(-0.01, flow::Mode::PerScale);
  auto fp = solve_fixed_point(p);
  double sh = solve_shooting(-0.01, p.flow, p.coeffs, {0.0, 0.1});
  double pos = solve_fixed_point(problem(0.01, flow::Mode::PerScale)).sigma;
  CHECK(std::abs(fp.sigma - sh) <= 1e-10);
  CHECK(std::abs(fp.sigma - pos) <= 1e-10);
}

TEST_CASE("shooting contract") {
  ManifoldProblem p = problem(0.01, flow::Mode::PerScale);
  double a = solve_shooting(0.01, p.flow, p.coeffs, {0.0, 0.1}, 1e-9);
  double b = solve_shooting(0.01, p.flow, p.coeffs, {0.0, 0.1}, 1e-10);
  CHECK(a > 0.0);
  CHECK(std::abs(a - b) <= 1e-9);
  CHECK(shooting_side(a - 1e-6, 0.01, p.flow, p.coeffs) == -1);
  CHECK(shooting_side(a + 1e-6, 0.01, p.flow, p.coeffs) == 1);
  CHECK_THROWS_AS(solve_shooting(0.01, p.flow, p.coeffs, {0.05, 0.1}), CheckFailure);
  CHECK_THROWS_AS(solve_shooting(0.01, p.flow, p.coeffs, {0.1, 0.0}), DomainError);
}

TEST_CASE("separatrix criticality") {
  for (flow::Mode mode : {flow::Mode::LimitConstants, flow::Mode::PerScale}) {
    ManifoldProblem p = problem(0.01, mode);
    double sigma = solve_fixed_point(p).sigma;
    flow::FlowConfig c = p.flow;
    c.horizon = 10000;
    CHECK_FALSE(flow::envelope_exit(flow::trajectory(sigma, 0.01, c, p.coeffs), 0.01));
    for (double d : {1e-6, -1e-6}) {
      auto exit = flow::envelope_exit(flow::trajectory(sigma + d, 0.01, c, p.coeffs), 0.01);
      REQUIRE(exit);
      CHECK(*exit < 10000);
    }
  }
}

TEST_CASE("decay law and ball membership") {
  ManifoldProblem p = problem(0.01, flow::Mode::LimitConstants);
  auto fp = solve_fixed_point(p);
  CHECK(fp.norm <= 1.0);
  auto t = flow::trajectory(fp.sigma, p.y1, p.flow, p.coeffs);
  double sup = 0.0;
  for (const auto& s : t.states)
    sup = std::max(sup, std::abs(s.x - flow::kosterlitz_q(p.y1, s.j)) / flow::envelope_h(p.y1, s.j));
  CHECK(sup <= p.tau);

  WeightedSequence w = WeightedSequence::zeros(p.J);
  for (std::size_t k = 0; k < w.size(); ++k) {
    double th = p.tau * flow::envelope_h(p.y1, static_cast<long>(k) + 1);
    w.w_plus[k] = (k % 2 ? 1.0 : -1.0) * th;
    w.w_minus[k] = 0.5 * th * (k % 3 ? 1.0 : -1.0);
  }
  CHECK(weighted_norm(w, p) == doctest::Approx(1.0));
  CHECK(weighted_norm(apply_T(w, p), p) <= 1.0);
}

TEST_CASE("horizon truncation") {
  ManifoldProblem p = problem(0.01, flow::Mode::PerScale);
  p.J = 20000;
  double full = solve_fixed_point(p).sigma;
  p.J = 10000;
  double half = solve_fixed_point(p).sigma;
  double bound = tail_envelope(0.01, 10001) / flow::kosterlitz_q(0.01, 10000);
  CHECK(std::abs(full - half) < bound);
  double direct = 0.0;
  for (long s = 500; s < 5000000; ++s) {
    double h = flow::envelope_h(0.01, s);
    direct += flow::kosterlitz_q(0.01, s + 1) * h * h;
  }
  CHECK(tail_envelope(0.01, 500) == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("contraction estimate") {
  ManifoldProblem p = problem(0.01, flow::Mode::LimitConstants);
  p.J = 20000;
  double at_default = empirical_contraction(p, 100, 7, 2);
  CHECK(at_default <= 0.5);
  CHECK(at_default == empirical_contraction(p, 100, 7, 1));
  double prev = INFINITY;
  for (double tau : {0.4, 0.2, 0.1, 0.05}) {
    p.tau = tau;
    double e = empirical_contraction(p, 40, 3, 2);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("non-contraction is detected") {
  coeffs::RgCoefficients rg;
  rg.L = 3;
  for (int j = 1; j <= 400; ++j) rg.scales.push_back({j, 0.5, 2.0, 0, 0, 0, 0.8});
  ManifoldProblem p = problem(0.01, flow::Mode::PerScale);
  p.coeffs = flow::FlowCoefficients::from_rg(rg, kC, 1.0);
  CHECK_THROWS_AS(solve_fixed_point(p), CheckFailure);
}

TEST_CASE("separatrix CSV") {
  std::vector<SeparatrixRow> rows{{0.01, 0.01, 0.01, 6, 0.002}};
  std::ostringstream out;
  write_separatrix_csv(out, rows, flow::FlowCoefficients::limits(3, 0.0));
  std::string text = out.str();
  CHECK(text.rfind("y1,sigma_fixed_point,sigma_shooting,agreement,iterations,contraction_estimate,z,s,beta\n", 0) == 0);
  CHECK(text.find("0.01,0.01,0.01,0,6,0.002,") != std::string::npos);
}
