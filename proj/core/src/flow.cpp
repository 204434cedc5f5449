#include "ktrg/flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "ktrg/csv.hpp"
#include "ktrg/parallel.hpp"

namespace ktrg::flow {

void validate(const FlowConfig& config) {
  const Surrogate& s = config.surrogate;
  if (!(s.rho > 0.0 && s.rho < 1.0)) throw DomainError("surrogate rho must lie in (0, 1)");
  if (!(s.c_R >= 0.0 && s.c_F >= 0.0 && s.c_M >= 0.0)) throw DomainError("surrogate gains must be nonnegative");
  if (!(config.ceiling > 0.0) || !std::isfinite(config.ceiling)) throw DomainError("ceiling must be positive");
  if (config.horizon < 1) throw DomainError("horizon must be at least 1");
}

FlowCoefficients FlowCoefficients::limits(int L, double c) {
  auto lim = coeffs::limit_constants(L, coeffs::kKtAlphaSq, c);
  FlowCoefficients out;
  out.L_ = L;
  out.a_ = lim.a;
  out.b_ = lim.b;
  return out;
}

FlowCoefficients FlowCoefficients::from_rg(const coeffs::RgCoefficients& rg, double c, double initial_volume) {
  FlowCoefficients out = limits(rg.L, c);
  out.vol0_ = initial_volume;
  for (std::size_t k = 0; k < rg.scales.size(); ++k) {
    const auto& s = rg.scales[k];
    if (s.j != static_cast<int>(k) + 1) throw DomainError("coefficient table must start at j = 1 without gaps");
    out.a_j_.push_back(s.a);
    out.b_j_.push_back(s.b);
    out.vol_j_.push_back(s.volume_factor);
  }
  return out;
}

double FlowCoefficients::a_ratio(long j) const {
  return j >= 1 && j <= tabulated() ? a_j_[static_cast<std::size_t>(j - 1)] / a_ : 1.0;
}
double FlowCoefficients::b_ratio(long j) const {
  return j >= 1 && j <= tabulated() ? b_j_[static_cast<std::size_t>(j - 1)] / b_ : 1.0;
}
double FlowCoefficients::volume(long j) const {
  return j >= 1 && j <= tabulated() ? vol_j_[static_cast<std::size_t>(j - 1)] : 1.0;
}

Corrections corrections(long j, double x, double y, double kappa, const FlowCoefficients& c,
                        const FlowConfig& config) {
  Corrections out;
  if (config.mode == Mode::PerScale) {
    const double vol = c.volume(j);
    out.F = -(c.a_ratio(j) - 1.0) * y * y;
    out.M = (vol - 1.0) * y - (vol * c.b_ratio(j) - 1.0) * x * y;
  }
  const Surrogate& s = config.surrogate;
  if (s.enabled) {
    const double m = std::max(std::abs(x), std::abs(y));
    out.F += s.c_F * kappa;
    out.M += s.c_M * kappa * y;
    out.R = s.c_R * (kappa * kappa + kappa * m + m * m * m);
  }
  return out;
}

namespace {

bool crossed(const FlowState& s, double ceiling) {
  return !std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.kappa) || std::abs(s.x) > ceiling ||
         std::abs(s.y) > ceiling;
}

}  // namespace

FlowState step(const FlowState& s, const FlowCoefficients& c, const FlowConfig& config) {
  if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.kappa))
    throw DomainError("flow state at scale " + std::to_string(s.j) + " is not finite");
  Corrections k = corrections(s.j, s.x, s.y, s.kappa, c, config);
  FlowState n;
  n.j = s.j + 1;
  n.x = s.x - s.y * s.y + k.F;
  n.y = s.y - s.x * s.y + k.M;
  n.kappa = config.surrogate.enabled ? config.surrogate.rho * s.kappa + k.R : 0.0;
  n.diverged = s.diverged || crossed(n, config.ceiling);
  return n;
}

FlowTrajectory trajectory(double x1, double y1, const FlowConfig& config, const FlowCoefficients& c) {
  validate(config);
  FlowTrajectory t;
  t.config = config;
  FlowState s;
  s.x = x1;
  s.y = y1;
  s.diverged = crossed(s, config.ceiling);
  t.states.reserve(static_cast<std::size_t>(config.horizon));
  t.states.push_back(s);
  if (s.diverged) t.divergence_scale = 1;
  while (t.states.back().j < config.horizon) {
    const FlowState& cur = t.states.back();
    if (cur.diverged && (config.stop_on_divergence || !std::isfinite(cur.x) || !std::isfinite(cur.y))) break;
    FlowState next = step(cur, c, config);
    if (next.diverged && !t.divergence_scale) t.divergence_scale = next.j;
    t.states.push_back(next);
  }
  return t;
}

FlowState to_rescaled(Couplings sz, const FlowCoefficients& c) {
  FlowState s;
  s.x = c.b() * sz.s;
  s.y = std::sqrt(c.a() * c.b()) * sz.z;
  return s;
}

Couplings to_original(const FlowState& s, const FlowCoefficients& c) {
  return {s.x / c.b(), s.y / std::sqrt(c.a() * c.b())};
}

FlowState first_step(Couplings sz, const FlowCoefficients& c, const FlowConfig& config) {
  Couplings next{sz.s, c.initial_volume() * sz.z};
  FlowState s = to_rescaled(next, c);
  if (config.surrogate.enabled) {
    double m = std::max(std::abs(sz.s), std::abs(sz.z));
    s.kappa = config.surrogate.c_R * m * m;
  }
  s.diverged = crossed(s, config.ceiling);
  return s;
}

double kosterlitz_q(double q1, long j) {
  if (j < 1) throw DomainError("kosterlitz_q needs j >= 1");
  return q1 / (1.0 + std::abs(q1) * double(j - 1));
}

double envelope_h(double y1, long j) {
  const double a = std::abs(y1);
  return a * std::pow(1.0 + a * double(j - 1), -1.5);
}

namespace {

std::optional<double> fit_slope(const std::vector<double>& lx, const std::vector<double>& ly, double& amplitude) {
  if (lx.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= double(lx.size());
  my /= double(lx.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  double slope = sxy / sxx;
  amplitude = std::exp(my - slope * mx);
  return slope;
}

}  // namespace

DeviationFit deviation_profile(const FlowTrajectory& traj, double q1) {
  DeviationFit out;
  if (traj.divergence_scale) throw DomainError("deviation profile needs a non-diverged trajectory");
  const std::size_t n = traj.states.size();
  std::vector<double> lj, lx, ljy, ly;
  for (std::size_t i = n / 2; i < n; ++i) {
    const FlowState& s = traj.states[i];
    const double q = kosterlitz_q(q1, s.j);
    const double dx = std::abs(s.x - std::abs(q));
    const double dy = std::abs(s.y - q);
    if (dx > 1e-14) {
      lj.push_back(std::log(double(s.j)));
      lx.push_back(std::log(dx));
    }
    if (dy > 1e-14) {
      ljy.push_back(std::log(double(s.j)));
      ly.push_back(std::log(dy));
    }
  }
  out.exponent_x = fit_slope(lj, lx, out.amplitude_x);
  out.exponent_y = fit_slope(ljy, ly, out.amplitude_y);
  return out;
}

std::optional<long> envelope_exit(const FlowTrajectory& traj, double q1) {
  for (const FlowState& s : traj.states) {
    const double q = kosterlitz_q(q1, s.j);
    const double h = envelope_h(q1, s.j);
    if (s.diverged || std::abs(s.x - std::abs(q)) > h || std::abs(s.y - q) > h) return s.j;
  }
  return std::nullopt;
}

std::vector<SweepRow> sweep(std::span<const std::pair<double, double>> starts, const FlowConfig& config,
                            const FlowCoefficients& c, unsigned workers) {
  return parallel_map(starts.size(), workers, [&](std::size_t i) {
    auto [x1, y1] = starts[i];
    FlowTrajectory t = trajectory(x1, y1, config, c);
    return SweepRow{x1, y1, t.divergence_scale.has_value(), t.divergence_scale};
  });
}

void write_trajectory_csv(std::ostream& out, const FlowTrajectory& traj, double q1) {
  csv::row(out, "j", "x", "y", "kappa", "q", "x_minus_q", "y_minus_q");
  for (const FlowState& s : traj.states) {
    const double q = kosterlitz_q(q1, s.j);
    csv::row(out, csv::num(s.j), csv::num(s.x), csv::num(s.y), csv::num(s.kappa), csv::num(q),
             csv::num(s.x - std::abs(q)), csv::num(s.y - q));
  }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  csv::row(out, "x1", "y1", "diverged", "divergence_scale");
  for (const SweepRow& r : rows)
    csv::row(out, csv::num(r.x1), csv::num(r.y1), csv::num(r.diverged), r.scale ? csv::num(*r.scale) : "");
}

}  // namespace ktrg::flow
