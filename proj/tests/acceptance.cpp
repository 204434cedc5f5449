// One line per acceptance criterion; exit status 0 iff all pass.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "ktrg/coefficients.hpp"
#include "ktrg/covariance.hpp"
#include "ktrg/covariance_checks.hpp"
#include "ktrg/extraction.hpp"
#include "ktrg/flow.hpp"
#include "ktrg/manifold.hpp"
#include "ktrg/oracle.hpp"
#include "ktrg/polymer.hpp"
#include "ktrg/regulator.hpp"

using namespace ktrg;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAlphaSq = 8.0 * kPi;

struct Outcome {
  bool passed = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

cov::CovarianceStack stack(int L, int R, int gamma, int M, double mass, bool tail) {
  cov::StackOptions o;
  o.tail = tail;
  return cov::decompose(Lattice::make(L, R, gamma, mass), cov::build_cutoffs(gamma, M, R), o);
}

const cov::CovarianceStack& deep_L3() {
  static const auto s = stack(3, 6, 3, 1, 0.0, false);
  return s;
}

const cov::CovarianceStack& wide_L9() {
  static const auto s = stack(9, 4, 3, 2, 0.0, false);
  return s;
}

const coeffs::RgCoefficients& rg_L9() {
  static const auto rg = coeffs::compute(wide_L9(), kAlphaSq);
  return rg;
}

double coulomb_c() {
  static const double c = cov::coulomb_constant_c(cov::build_cutoffs(3, 1, 2)).c;
  return c;
}

Outcome telescoping() {
  Timer t;
  auto s = stack(3, 3, 3, 1, 0.1, true);
  const double err = cov::telescoping_error(s);
  const double sec = t.seconds();
  return {err <= 1e-8 && sec < 60.0, fmt("max relative error %.3e (<= 1e-8), %.2f s (< 60 s)", err, sec)};
}

Outcome diagonal_law() {
  auto law = cov::diagonal_law(deep_L3(), 1);
  double lo = INFINITY, hi = 0.0;
  for (int j = 1; j <= 5; ++j) {
    lo = std::min(lo, law.scaled[static_cast<std::size_t>(j)]);
    hi = std::max(hi, law.scaled[static_cast<std::size_t>(j)]);
  }
  return {law.growth < 3.0, fmt("max_j s_j / s_1 = %.3f (< 3), s_j in [%.3e, %.3e] for j = 1..5", law.growth, lo, hi)};
}

Outcome finite_range() {
  auto a = cov::leakage(stack(3, 3, 3, 1, 0.1, true));
  auto b = cov::leakage(deep_L3());
  const double worst = std::max(a.max_ratio(), b.max_ratio());
  return {worst < 1e-6, fmt("max leakage ratio %.3e over (3,3,0.1) and (3,6,0), every scale (< 1e-6)", worst)};
}

Outcome coefficient_limits() {
  const auto& rg = rg_L9();
  auto lim = coeffs::limit_constants(9, kAlphaSq, coulomb_c());
  std::vector<double> da, db;
  bool a_by_4 = false, b_by_4 = false;
  for (const auto& s : rg.scales) {
    da.push_back(std::abs(s.a / lim.a - 1.0));
    db.push_back(std::abs(s.b / lim.b - 1.0));
    if (s.j <= 4) {
      a_by_4 = a_by_4 || da.back() < 0.05;
      b_by_4 = b_by_4 || db.back() < 0.05;
    }
  }
  const bool ok = a_by_4 && b_by_4 && decreasing(da) && decreasing(db);
  return {ok, fmt("L = 9, j = 1..%zu: a dev %.3g -> %.3g, b dev %.3g -> %.3g (5%% by j = 4, decreasing), c = %.10f",
                  rg.scales.size(), da.front(), da.back(), db.front(), db.back(), coulomb_c())};
}

Outcome volume_factor() {
  std::vector<double> dev;
  for (int j = 1; j <= 5; ++j) dev.push_back(std::abs(coeffs::volume_factor(deep_L3(), j, kAlphaSq) - 1.0));
  const bool ok = decreasing(dev) && dev[3] < 0.05;
  return {ok, fmt("L = 3: |vol_j - 1| = %.3g %.3g %.3g %.3g %.3g (decreasing, < 0.05 at j = 4)", dev[0], dev[1], dev[2],
                  dev[3], dev[4])};
}

manifold::ManifoldProblem problem(double y1) {
  manifold::ManifoldProblem p;
  p.y1 = y1;
  p.coeffs = flow::FlowCoefficients::limits(9, coulomb_c());
  return p;
}

Outcome flow_decay() {
  Timer t;
  auto p = problem(0.01);
  const double sigma = manifold::solve_fixed_point(p).sigma;
  flow::FlowConfig cfg;
  cfg.horizon = 100000;
  auto traj = flow::trajectory(sigma, 0.01, cfg, p.coeffs);
  auto fit = flow::deviation_profile(traj, 0.01);
  const double sec = t.seconds();
  const double e = fit.exponent_x.value_or(INFINITY);
  return {e <= -1.3 && sec < 10.0 && !traj.divergence_scale,
          fmt("exponent of |x_j - q_j| = %.3f (<= -1.3), J = %zu, %.2f s (< 10 s)", e, traj.states.size(), sec)};
}

Outcome separatrix() {
  double worst = 0.0;
  long latest_exit = 0;
  bool exits = true;
  for (double y1 : {0.005, 0.01, 0.02}) {
    auto p = problem(y1);
    const double fp = manifold::solve_fixed_point(p).sigma;
    const double sh = manifold::solve_shooting(y1, p.flow, p.coeffs, {-0.1, 0.1});
    worst = std::max(worst, std::abs(fp - sh));
    flow::FlowConfig cfg;
    cfg.horizon = 10000;
    for (double d : {1e-6, -1e-6}) {
      auto exit = flow::envelope_exit(flow::trajectory(fp + d, y1, cfg, p.coeffs), y1);
      exits = exits && exit.has_value();
      if (exit) latest_exit = std::max(latest_exit, *exit);
    }
  }
  const double zero = manifold::solve_fixed_point(problem(0.0)).sigma;
  return {worst <= 1e-8 && exits && zero == 0.0,
          fmt("max |fixed point - shooting| = %.2e (<= 1e-8), latest envelope exit j = %ld (< 1e4), Sigma(0) = %g", worst,
              latest_exit, zero)};
}

Outcome contraction() {
  auto p = problem(0.01);
  const double lip = manifold::empirical_contraction(p, 100, 20240611);
  auto q = p;
  q.coeffs = flow::FlowCoefficients::from_rg(rg_L9(), coulomb_c(), coeffs::volume_factor(wide_L9(), 0, kAlphaSq));
  q.flow.mode = flow::Mode::PerScale;
  const double per_scale = manifold::empirical_contraction(q, 100, 20240611);
  return {lip <= 0.5, fmt("Lipschitz estimate %.4f over 100 pairs, tau = %.2f (<= 0.5); per-scale L = 9 coefficients: %.3f",
                          lip, p.tau, per_scale)};
}

// Connected subsets of a 7x7 window through its center with at most 4 cells.
long window_small_count() {
  constexpr int n = 7, center = 24;
  auto connected = [&](const std::vector<int>& cells) {
    std::set<int> in(cells.begin(), cells.end()), seen{cells.front()};
    std::vector<int> stack{cells.front()};
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      const std::array<int, 4> nb{c + 1, c - 1, c + n, c - n};
      for (int d : nb) {
        if (d < 0 || d >= n * n || (std::abs(d - c) == 1 && d / n != c / n)) continue;
        if (in.contains(d) && seen.insert(d).second) stack.push_back(d);
      }
    }
    return seen.size() == in.size();
  };
  long count = 1;
  for (int a = 0; a < n * n; ++a) {
    if (a == center) continue;
    count += connected({center, a});
    for (int b = a + 1; b < n * n; ++b) {
      if (b == center) continue;
      count += connected({center, a, b});
      for (int c = b + 1; c < n * n; ++c)
        if (c != center) count += connected({center, a, b, c});
    }
  }
  return count;
}

Outcome polymers() {
  using namespace poly;
  const long brute = window_small_count();
  const long S = count_S(3);

  auto lat = Lattice::make(3, 2, 3);
  auto fine = Paving::make(lat, 0);
  auto coarse = Paving::make(lat, 1);
  auto family = connected_polymers(fine, 5);
  bool reblock = true;
  for (const Polymer& X : family) reblock = reblock && reblock_inequality(fine, coarse, X, 0.05);
  const double eta = max_reblock_eta(fine, coarse, family);

  double spread = 0.0;
  for (double A : {10.0, 100.0}) {
    const double k3 = k_small_sup(3, A, 0.5) / 9.0, k9 = k_small_sup(9, A, 0.5) / 81.0;
    spread = std::max(spread, std::max(k3, k9) / std::min(k3, k9));
  }

  auto fs = small_polymers(fine);
  auto cs = small_polymers(coarse);
  bool identities = true;
  for (std::uint64_t t = 0; t < 100 && identities; ++t) {
    Extraction ex(fine, coarse, random_activities(fs, 1000 + 2 * t), random_activities(cs, 1001 + 2 * t));
    identities = check_extraction(ex).ok();
  }
  const bool ok = S == brute && brute == 99 && reblock && eta > 0.0 && spread < 2.0 && identities;
  return {ok, fmt("S = %ld (window enumeration %ld); reblocking on %zu polymers (eta = 0.05, sup eta = %g); "
                  "k_small/L^2 spread %.3f (< 2); extraction identities on 100 rational inputs: %s",
                  S, brute, family.size(), eta, spread, identities ? "exact" : "violated")};
}

Outcome regulators() {
  using namespace poly;
  auto lat = Lattice::make(3, 3, 3);
  auto p1 = Paving::make(lat, 1);
  const double kappa = kappa_for(3, 0.1);
  RegulatorConstants rc{5.0, 1.0, kappa};
  double factor = 0.0;
  long violations = 0, tried = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto phi = Field::smooth_random(lat, 2, 1.0, seed);
    Regulator g(p1, phi);
    auto A = make_polymer(p1, {p1.id(-4, -4), p1.id(-3, -4), p1.id(-3, -3)});
    auto B = make_polymer(p1, {p1.id(2, 2), p1.id(2, 3)});
    auto C = make_polymer(p1, {p1.id(-2, 3)});
    auto X = polymer_union(polymer_union(A, B), C);
    const double whole = g.log_G(X, rc);
    double parts = 0.0;
    for (const Polymer& comp : components(p1, X)) parts += g.log_G(comp, rc);
    factor = std::max(factor, std::abs(whole - parts) / std::max(1.0, whole));
    for (const Polymer& Y : small_polymers(p1)) {
      ++tried;
      if (g.log_G_str(Y, kappa) > g.log_G(Y, rc)) ++violations;
    }
  }
  return {factor <= 1e-12 && violations == 0,
          fmt("factorization error %.2e; G_str <= G on %ld small polymers over 100 smooth fields (c1 = 5): %ld violations",
              factor, tried, violations)};
}

Outcome oracle_checks() {
  using namespace oracle;
  Timer t;
  auto lat = Lattice::make(5, 1, 5);
  const double s = 0.0, beta = kAlphaSq / (1.0 - s), z = 0.05;
  auto neutral = neutral_Z(lat, beta, z, 4);
  const auto& ev = neutral.runs.back();
  const bool symmetric = ev.Z(z) == ev.Z(-z) && ev.coefficients[1] == 0.0 && ev.coefficients[3] == 0.0;

  auto ms = default_m_sequence();
  auto grand = grand_Z(lat, beta, z, 4, ms);
  bool monotone = true;
  for (std::size_t i = 1; i < grand.runs.size(); ++i)
    for (const auto& term : grand.runs[i].sectors)
      if (term.Q != 0) {
        const double prev = grand.runs[i - 1].sector(term.n, term.Q);
        monotone = monotone && (term.coefficient < prev || (prev == 0.0 && term.coefficient == 0.0));
      }
  auto sk = siegert_kac_check(lat, beta, 4, s);
  const double sec = t.seconds();
  return {symmetric && monotone && sk.passed() && sec < 120.0,
          fmt("Z(z) = Z(-z) = %.12f; charged sectors decreasing over m = 0.5..0.0625: %s; Siegert-Kac max rel error %.2e "
              "(<= 1e-10); %.2f s",
              ev.Z(z), monotone ? "yes" : "no", sk.max_relative_error, sec)};
}

}  // namespace

int main() {
  const std::array<std::pair<const char*, std::function<Outcome()>>, 11> criteria{{
      {"decomposition telescoping", telescoping},
      {"diagonal law", diagonal_law},
      {"finite range", finite_range},
      {"coefficient limits", coefficient_limits},
      {"volume factor", volume_factor},
      {"flow decay", flow_decay},
      {"separatrix solver agreement", separatrix},
      {"contraction", contraction},
      {"polymer suite", polymers},
      {"regulator properties", regulators},
      {"partition oracle", oracle_checks},
  }};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.passed;
    std::printf("[%s] %2zu %-28s %s\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
