#include "ktrg/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "ktrg/csv.hpp"
#include "ktrg/parallel.hpp"

namespace ktrg::manifold {

using flow::envelope_h;
using flow::kosterlitz_q;

std::pair<double, double> diagonalize(double u, double v) { return {u + 2.0 * v, u - v}; }

std::pair<double, double> undiagonalize(double w_plus, double w_minus) {
  return {(w_plus + 2.0 * w_minus) / 3.0, (w_plus - w_minus) / 3.0};
}

void validate(const ManifoldProblem& p) {
  flow::validate(p.flow);
  if (p.J < 2) throw DomainError("manifold horizon must be at least 2");
  if (!(p.tau > 0.0)) throw DomainError("tau must be positive");
  if (!std::isfinite(p.y1) || std::abs(p.y1) > p.eps1)
    throw DomainError("|y1| = " + std::to_string(std::abs(p.y1)) + " exceeds eps1 = " + std::to_string(p.eps1));
}

WeightedSequence WeightedSequence::zeros(long J) {
  auto n = static_cast<std::size_t>(J);
  return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

double weighted_distance(const WeightedSequence& a, const WeightedSequence& b, const ManifoldProblem& p) {
  const double y = std::abs(p.y1);
  double sup = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double dp = std::abs(a.w_plus[k] - b.w_plus[k]);
    const double dm = std::abs(a.w_minus[k] - b.w_minus[k]);
    const double dk = std::abs(a.kappa[k] - b.kappa[k]);
    if (y == 0.0) {
      if (dp + dm + dk > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    const double th = p.tau * envelope_h(y, static_cast<long>(k) + 1);
    sup = std::max({sup, dp / th, 2.0 * dm / th, dk / (th * th)});
  }
  return sup;
}

double weighted_norm(const WeightedSequence& w, const ManifoldProblem& p) {
  return weighted_distance(w, WeightedSequence::zeros(static_cast<long>(w.size())), p);
}

double tail_envelope(double y1, long J) {
  const double y = std::abs(y1);
  if (y == 0.0) return 0.0;
  auto f = [y](double s) {
    const double h = y * std::pow(1.0 + y * (s - 1.0), -1.5);
    return y / (1.0 + y * s) * h * h;
  };
  constexpr long kExplicit = 2000;
  double sum = 0.0;
  for (long s = J; s < J + kExplicit; ++s) sum += f(double(s));
  // Euler-Maclaurin for the remainder
  const double s0 = double(J + kExplicit);
  boost::math::quadrature::exp_sinh<double> integrator;
  const double integral = integrator.integrate([&](double t) { return f(s0 + t); });
  const double dh = 1e-3 * (s0 + 1.0 / y);
  const double deriv = (f(s0 + dh) - f(s0 - dh)) / (2.0 * dh);
  return sum + integral + 0.5 * f(s0) - deriv / 12.0;
}

namespace {

// Works on y1 > 0; negative y1 is mapped by the parity of the flow.
WeightedSequence apply_T_positive(const WeightedSequence& w, const ManifoldProblem& p, double closure) {
  const long J = static_cast<long>(w.size());
  const double y1 = p.y1;
  WeightedSequence out = WeightedSequence::zeros(J);
  if (y1 == 0.0) return out;
  const auto n = static_cast<std::size_t>(J);
  std::vector<double> q(n + 2), Wp(n), Wm(n), R(n);
  for (std::size_t k = 0; k < n + 2; ++k) q[k] = kosterlitz_q(y1, static_cast<long>(k) + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const long j = static_cast<long>(k) + 1;
    auto [u, v] = undiagonalize(w.w_plus[k], w.w_minus[k]);
    const double qj = q[k];
    const double qn = q[k + 1];
    flow::Corrections c = flow::corrections(j, qj + u, qj + v, w.kappa[k], p.coeffs, p.flow);
    const double U = -v * v - qj * qj * qn + c.F;
    const double V = -u * v - qj * qj * qn + c.M;
    Wp[k] = U + 2.0 * V - (2.0 * qj + qn) * qn * w.w_plus[k];
    Wm[k] = U - V;
    R[k] = c.R;
  }
  const double hJ = envelope_h(y1, J);
  double S = Wm[n - 1] / (hJ * hJ) * closure;
  for (std::size_t k = n; k-- > 0;) {
    S += q[k + 1] * Wm[k];
    out.w_minus[k] = -S / q[k];
  }
  out.w_plus[0] = out.w_minus[0];
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double r = q[k + 1] / q[k];
    out.w_plus[k + 1] = r * r * out.w_plus[k] + Wp[k];
  }
  if (p.flow.surrogate.enabled)
    for (std::size_t k = 0; k + 1 < n; ++k) out.kappa[k + 1] = p.flow.surrogate.rho * out.kappa[k] + R[k];
  return out;
}

ManifoldProblem positive(const ManifoldProblem& p) {
  ManifoldProblem m = p;
  m.y1 = std::abs(p.y1);
  return m;
}

}  // namespace

WeightedSequence apply_T(const WeightedSequence& w, const ManifoldProblem& p) {
  if (static_cast<long>(w.size()) != p.J) throw DomainError("sequence length differs from the horizon");
  ManifoldProblem m = positive(p);
  return apply_T_positive(w, m, tail_envelope(m.y1, m.J + 1));
}

FixedPoint solve_fixed_point(const ManifoldProblem& p, double tol, int max_iterations) {
  validate(p);
  FixedPoint out;
  out.seq = WeightedSequence::zeros(p.J);
  if (p.y1 == 0.0) return out;
  ManifoldProblem m = positive(p);
  const double closure = tail_envelope(m.y1, m.J + 1);
  double prev = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    WeightedSequence next = apply_T_positive(out.seq, m, closure);
    const double r = weighted_distance(next, out.seq, m);
    out.seq = std::move(next);
    out.iterations = it;
    out.residual = r;
    if (!std::isfinite(r)) throw CheckFailure("fixed-point iteration produced a non-finite sequence");
    if (r <= tol) break;
    if (it >= 2 && prev > 100.0 * tol) {
      const double ratio = r / prev;
      out.ratio = std::max(out.ratio, ratio);
      if (ratio > 0.95)
        throw CheckFailure("fixed-point map is not contracting: residual ratio " + std::to_string(ratio) +
                           " at iteration " + std::to_string(it));
    }
    prev = r;
  }
  if (out.residual > tol)
    throw CheckFailure("fixed-point iteration did not reach " + std::to_string(tol) + " in " +
                       std::to_string(max_iterations) + " iterations");
  out.sigma = m.y1 + out.seq.w_minus[0];
  out.norm = weighted_norm(out.seq, m);
  return out;
}

int shooting_side(double x1, double y1, const flow::FlowConfig& config, const flow::FlowCoefficients& c) {
  flow::validate(config);
  const double q1 = std::abs(y1);
  flow::FlowState s;
  s.x = x1;
  s.y = y1;
  auto sign = [](double w) { return w > 0.0 ? 1 : -1; };
  for (;;) {
    if (!std::isfinite(s.y) || std::abs(s.y) > config.ceiling) return -1;
    if (!std::isfinite(s.x) || std::abs(s.x) > config.ceiling) return 1;
    const double w = s.x - std::abs(s.y);
    if (std::abs(w) > kosterlitz_q(q1, s.j) || s.j >= config.horizon) return sign(w);
    s = flow::step(s, c, config);
  }
}

double solve_shooting(double y1, const flow::FlowConfig& config, const flow::FlowCoefficients& c,
                      std::pair<double, double> bracket, double tol) {
  auto [lo, hi] = bracket;
  if (!(lo < hi)) throw DomainError("shooting bracket must satisfy lo < hi");
  if (shooting_side(lo, y1, config, c) != -1 || shooting_side(hi, y1, config, c) != 1)
    throw CheckFailure("shooting bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                       "] does not straddle the separatrix");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (shooting_side(mid, y1, config, c) > 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double empirical_contraction(const ManifoldProblem& p, int n_samples, std::uint64_t seed, unsigned workers) {
  validate(p);
  if (n_samples < 2) throw DomainError("empirical contraction needs at least 2 samples");
  if (p.y1 == 0.0) return 0.0;
  ManifoldProblem m = positive(p);
  const double closure = tail_envelope(m.y1, m.J + 1);
  auto sample = [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    WeightedSequence w = WeightedSequence::zeros(m.J);
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double th = m.tau * envelope_h(m.y1, static_cast<long>(k) + 1);
      w.w_plus[k] = th * sym(rng);
      w.w_minus[k] = 0.5 * th * sym(rng);
      if (m.flow.surrogate.enabled) w.kappa[k] = th * th * pos(rng);
    }
    return w;
  };
  auto ratios = parallel_map(static_cast<std::size_t>(n_samples), workers, [&](std::size_t i) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (i + 1));
    WeightedSequence a = sample(rng);
    WeightedSequence b = sample(rng);
    const double d = weighted_distance(a, b, m);
    if (d == 0.0) return 0.0;
    return weighted_distance(apply_T_positive(a, m, closure), apply_T_positive(b, m, closure), m) / d;
  });
  return *std::max_element(ratios.begin(), ratios.end());
}

void write_separatrix_csv(std::ostream& out, std::span<const SeparatrixRow> rows, const flow::FlowCoefficients& c) {
  csv::row(out, "y1", "sigma_fixed_point", "sigma_shooting", "agreement", "iterations", "contraction_estimate", "z",
           "s", "beta");
  for (const SeparatrixRow& r : rows) {
    flow::FlowState st;
    st.x = r.sigma_fixed_point;
    st.y = r.y1;
    flow::Couplings sz = flow::to_original(st, c);
    const double beta = coeffs::kKtAlphaSq / (1.0 - sz.s);
    csv::row(out, csv::num(r.y1), csv::num(r.sigma_fixed_point), csv::num(r.sigma_shooting),
             csv::num(std::abs(r.sigma_fixed_point - r.sigma_shooting)), csv::num(r.iterations),
             csv::num(r.contraction), csv::num(sz.z), csv::num(sz.s), csv::num(beta));
  }
}

}  // namespace ktrg::manifold
