#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "ktrg/coefficients.hpp"
#include "ktrg/covariance.hpp"
#include "ktrg/covariance_checks.hpp"
#include "ktrg/csv.hpp"
#include "ktrg/extraction.hpp"
#include "ktrg/flow.hpp"
#include "ktrg/manifold.hpp"
#include "ktrg/oracle.hpp"
#include "ktrg/polymer.hpp"
#include "ktrg/regulator.hpp"

namespace ktrg::app {

bool Report::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void Report::merge(Report other) {
  for (auto& c : other.checks) checks.push_back(std::move(c));
  for (auto& a : other.artifacts) artifacts.push_back(std::move(a));
}

const Check* Report::first_failure() const {
  for (const Check& c : checks)
    if (!c.passed) return &c;
  return nullptr;
}

namespace {

void write_artifact(Report& r, const RunConfig& c, const std::string& name, const std::function<void(std::ostream&)>& body) {
  auto path = c.out_dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  body(out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
  r.artifacts.push_back(path);
}

Check at_most(std::string module, std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(module), std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

Check below(std::string module, std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(module), std::move(name), value < threshold, value, threshold, std::move(detail)};
}

Check holds(std::string module, std::string name, bool ok, std::string detail = {}) {
  return {std::move(module), std::move(name), ok, ok ? 1.0 : 0.0, 1.0, std::move(detail)};
}

cov::CovarianceStack build_stack(int L, int R, double mass, bool tail, unsigned workers) {
  auto [g, M] = odd_base(L);
  cov::StackOptions o;
  o.tail = tail;
  o.workers = workers;
  return cov::decompose(Lattice::make(L, R, g, mass), cov::build_cutoffs(g, M, R), o);
}

constexpr double kMaxCoefficientSide = 6561.0;

int tractable_R(int L, int R) {
  int r = R;
  while (r > 2 && std::pow(double(L), r) > kMaxCoefficientSide) --r;
  return r;
}

flow::FlowCoefficients coefficient_source(const RunConfig& c) {
  const auto& co = c.coefficients;
  if (co.mode == "limit") return flow::FlowCoefficients::limits(co.L, co.c);
  auto stack = build_stack(co.L, tractable_R(co.L, co.R), 0.0, false, c.workers);
  auto rg = coeffs::compute(stack, co.alpha_sq, c.workers);
  return flow::FlowCoefficients::from_rg(rg, co.c, coeffs::volume_factor(stack, 0, co.alpha_sq));
}

flow::FlowConfig flow_config(const RunConfig& c, long horizon) {
  flow::FlowConfig f;
  f.mode = c.coefficients.mode == "limit" ? flow::Mode::LimitConstants : flow::Mode::PerScale;
  f.surrogate = {c.flow.surrogate.enabled, c.flow.surrogate.rho, c.flow.surrogate.c_R, c.flow.surrogate.c_F,
                 c.flow.surrogate.c_M};
  f.ceiling = c.flow.ceiling;
  f.horizon = horizon;
  return f;
}

manifold::ManifoldProblem manifold_problem(const RunConfig& c, double y1, const flow::FlowCoefficients& coeffs) {
  manifold::ManifoldProblem p;
  p.y1 = y1;
  p.J = c.manifold.J;
  p.tau = c.manifold.tau;
  p.eps1 = c.manifold.eps1;
  p.flow = flow_config(c, c.manifold.J);
  p.coeffs = coeffs;
  return p;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

Report run_decompose(const RunConfig& c) {
  Report r;
  const auto& la = c.lattice;
  cov::StackOptions o;
  o.workers = c.workers;
  o.tol = {c.tolerances.leakage, c.tolerances.telescoping, c.tolerances.psd};
  auto lattice = Lattice::make(la.L, la.R, la.gamma, la.mass);
  auto stack = cov::decompose(lattice, cov::build_cutoffs(la.gamma, lattice.M(), la.R), o);
  const double tele = cov::telescoping_error(stack);
  auto leak = cov::leakage(stack);
  auto modes = cov::lowest_modes(stack);
  auto law = cov::diagonal_law(stack);
  const double alpha_sq = c.coefficients.alpha_sq;

  write_artifact(r, c, "decompose_scales.csv", [&](std::ostream& out) {
    out << "j,origin,diagonal_deviation,diagonal_scaled,leakage_ratio,lowest_mode,volume_factor\n";
    for (int j = 0; j < stack.scales(); ++j) {
      const auto k = static_cast<std::size_t>(j);
      csv::row(out, j, stack.origin(j), law.deviation[k], law.scaled[k], leak.ratio[k], modes[k],
               coeffs::volume_factor(stack, j, alpha_sq));
    }
  });

  r.add(at_most("decompose", "telescoping relative error", tele, c.tolerances.telescoping));
  r.add(below("decompose", "leakage beyond L^{j+1}/2", leak.max_ratio(), c.tolerances.leakage));
  const double min_mode = *std::min_element(modes.begin(), modes.end());
  r.add({"decompose", "positive semidefinite scales", min_mode >= -c.tolerances.psd, min_mode, -c.tolerances.psd, {}});
  if (stack.scales() >= 3) r.add(below("decompose", "diagonal law growth", law.growth, 3.0));
  return r;
}

Report run_coeffs(const RunConfig& c) {
  Report r;
  const auto& co = c.coefficients;
  const int R = tractable_R(co.L, co.R);
  auto stack = build_stack(co.L, R, 0.0, false, c.workers);
  auto rg = coeffs::compute(stack, co.alpha_sq, c.workers);
  auto lim = coeffs::limit_constants(co.L, co.alpha_sq, co.c);

  std::vector<double> dev_a, dev_b, dev_vol;
  for (const auto& s : rg.scales) {
    dev_a.push_back(std::abs(s.a / lim.a - 1.0));
    dev_b.push_back(std::abs(s.b / lim.b - 1.0));
    dev_vol.push_back(std::abs(s.volume_factor - 1.0));
  }
  write_artifact(r, c, "coefficients.csv", [&](std::ostream& out) {
    out << "j,a,b,e2,e3,e4,volume_factor,a_limit,b_limit,a_deviation,b_deviation\n";
    for (std::size_t k = 0; k < rg.scales.size(); ++k) {
      const auto& s = rg.scales[k];
      csv::row(out, s.j, s.a, s.b, s.e2, s.e3, s.e4, s.volume_factor, lim.a, lim.b, dev_a[k], dev_b[k]);
    }
  });

  std::string note = R < co.R ? "stack capped at R = " + std::to_string(R) : std::string{};
  r.add(holds("coeffs", "a_j deviation from limit decreasing", strictly_decreasing(dev_a), note));
  r.add(holds("coeffs", "b_j deviation from limit decreasing", strictly_decreasing(dev_b), note));
  r.add(holds("coeffs", "volume factor deviation decreasing", strictly_decreasing(dev_vol), note));
  if (rg.scales.size() >= 3) {
    r.add(below("coeffs", "a_j within 5% of limit at last scale", dev_a.back(), 0.05, note));
    r.add(below("coeffs", "b_j within 5% of limit at last scale", dev_b.back(), 0.05, note));
  }
  return r;
}

Report run_flow(const RunConfig& c) {
  Report r;
  auto coeffs = coefficient_source(c);
  const auto& f = c.flow;
  double x1 = f.x1;
  if (f.on_manifold) x1 = manifold::solve_fixed_point(manifold_problem(c, f.y1, coeffs)).sigma;
  auto cfg = flow_config(c, f.horizon);
  auto traj = flow::trajectory(x1, f.y1, cfg, coeffs);

  flow::FlowTrajectory thin{{}, traj.config, traj.divergence_scale};
  for (std::size_t k = 0; k < traj.states.size(); k += static_cast<std::size_t>(f.stride)) thin.states.push_back(traj.states[k]);
  if (!traj.states.empty() && (traj.states.size() - 1) % static_cast<std::size_t>(f.stride) != 0)
    thin.states.push_back(traj.states.back());
  write_artifact(r, c, "flow_trajectory.csv", [&](std::ostream& out) { flow::write_trajectory_csv(out, thin, f.y1); });

  if (f.on_manifold && !f.surrogate.enabled) {
    auto fit = flow::deviation_profile(traj, f.y1);
    const double e = fit.exponent_x.value_or(std::numeric_limits<double>::infinity());
    r.add(at_most("flow", "deviation exponent of |x_j - q_j|", e, c.tolerances.exponent,
                  fit.exponent_x ? std::string{} : "deviation below resolution"));
    r.add(holds("flow", "on-manifold trajectory stays in the envelope", !flow::envelope_exit(traj, f.y1)));
  }
  r.add(holds("flow", "no divergence on the manifold", !f.on_manifold || !traj.divergence_scale));
  return r;
}

Report run_separatrix(const RunConfig& c) {
  Report r;
  auto coeffs = coefficient_source(c);
  std::vector<manifold::SeparatrixRow> rows;
  for (std::size_t i = 0; i < c.manifold.y1.size(); ++i) {
    const double y1 = c.manifold.y1[i];
    auto p = manifold_problem(c, y1, coeffs);
    auto fp = manifold::solve_fixed_point(p);
    const double sh = manifold::solve_shooting(y1, p.flow, coeffs, {-0.1, 0.1});
    const double lip = manifold::empirical_contraction(p, c.manifold.samples, c.seed + i, c.workers);
    rows.push_back({y1, fp.sigma, sh, fp.iterations, lip});

    const std::string tag = "y1 = " + csv::num(y1);
    r.add(at_most("separatrix", "fixed point vs shooting (" + tag + ")", std::abs(fp.sigma - sh), c.tolerances.agreement));
    r.add(at_most("separatrix", "contraction estimate (" + tag + ")", lip, c.tolerances.contraction));

    auto cfg = p.flow;
    cfg.horizon = 10000;
    for (double d : {1e-6, -1e-6}) {
      auto exit = flow::envelope_exit(flow::trajectory(fp.sigma + d, y1, cfg, coeffs), y1);
      r.add(holds("separatrix", "perturbation " + csv::num(d) + " leaves the envelope before 1e4 (" + tag + ")",
                  exit.has_value(), exit ? "exit at j = " + std::to_string(*exit) : "no exit"));
    }
  }
  auto zero = manifold::solve_fixed_point(manifold_problem(c, 0.0, coeffs));
  r.add(holds("separatrix", "Sigma(0) = 0", zero.sigma == 0.0));

  write_artifact(r, c, "separatrix.csv", [&](std::ostream& out) { manifold::write_separatrix_csv(out, rows, coeffs); });
  return r;
}

Report run_polymers(const RunConfig& c) {
  using namespace poly;
  Report r;
  const auto& p = c.polymers;
  auto lat = Lattice::make(p.L, p.R, p.L);
  auto fine = Paving::make(lat, p.j);
  auto coarse = Paving::make(lat, p.j + 1);

  auto family = connected_polymers(fine, p.max_size);
  write_artifact(r, c, "polymer_enumeration.csv", [&](std::ostream& out) { write_enumeration_csv(out, fine, coarse, family); });

  const long S = count_S(p.L);
  r.add({"polymers", "small sets through a block", S == 99, double(S), 99.0, "fixed polyominoes of sizes 1-4"});

  bool all = true;
  for (const Polymer& X : family) all = all && reblock_inequality(fine, coarse, X, p.eta);
  r.add(holds("polymers", "reblocking inequality at eta = " + csv::num(p.eta), all,
              std::to_string(family.size()) + " polymers, largest eta " + csv::num(max_reblock_eta(fine, coarse, family))));

  std::vector<std::vector<double>> ks;
  for (double A : p.A) {
    const double k3 = k_small_sup(3, A, p.lambda) / 9.0;
    const double k9 = k_small_sup(9, A, p.lambda) / 81.0;
    r.add(below("polymers", "k_small / L^2 spread across L = 3, 9 (A = " + csv::num(A) + ")",
                std::max(k3, k9) / std::min(k3, k9), 2.0, "k3 = " + csv::num(k3) + ", k9 = " + csv::num(k9)));
  }

  if (fine.per_side() * fine.per_side() <= 128) {
    auto fine_small = small_polymers(fine);
    auto coarse_small = small_polymers(coarse);
    bool ok = true;
    std::string counterexample;
    std::size_t checks = 0;
    for (int t = 0; t < p.trials && ok; ++t) {
      const std::uint64_t s = c.seed + 2 * static_cast<std::uint64_t>(t);
      Extraction ex(fine, coarse, random_activities(fine_small, s), random_activities(coarse_small, s + 1));
      auto rep = check_extraction(ex);
      ok = rep.ok();
      checks += rep.checks;
      counterexample = rep.counterexample;
    }
    r.add(holds("polymers", "extraction identities on " + std::to_string(p.trials) + " random rational inputs", ok,
                ok ? std::to_string(checks) + " exact checks" : counterexample));
  }

  // regulators on a torus of at least 27 sites per side, scales 1 and 2
  auto rlat = Lattice::make(p.L, std::max(p.R, p.L == 3 ? 3 : 2), p.L);
  auto p1 = Paving::make(rlat, 1);
  auto p2 = Paving::make(rlat, 2);
  const double kappa = kappa_for(p.L, p.kappa_c);
  RegulatorConstants rc{p.c1, p.c3, kappa};
  double factor_err = 0.0;
  bool dominated = true, monotone = true;
  for (int f = 0; f < p.fields; ++f) {
    auto phi = Field::smooth_random(rlat, 2, 1.0, c.seed + 1000 + static_cast<std::uint64_t>(f));
    Regulator g1(p1, phi), g2(p2, phi);
    const int h = (p1.per_side() - 1) / 2;
    auto A = make_polymer(p1, {p1.id(-h, -h), p1.id(-h + 1, -h)});
    auto B = make_polymer(p1, {p1.id(h - 1, h - 1), p1.id(h - 1, h)});
    if (p1.per_side() >= 5) {
      const double whole = g1.log_G(polymer_union(A, B), rc);
      const double parts = g1.log_G(A, rc) + g1.log_G(B, rc);
      factor_err = std::max(factor_err, std::abs(whole - parts) / std::max(1.0, std::abs(whole)));
    }
    for (int b = 0; b < p1.count(); ++b) {
      auto X = make_polymer(p1, {b});
      dominated = dominated && g1.log_G_str(X, kappa) <= g1.log_G(X, rc);
      monotone = monotone && g1.log_G_str_block(b, kappa) <= g2.log_G_str_block(p1.parent(b), kappa);
    }
  }
  r.add(at_most("regulator", "factorization over components", factor_err, 1e-12));
  r.add(holds("regulator", "strong regulator below field regulator on " + std::to_string(p.fields) + " fields", dominated));
  r.add(holds("regulator", "strong regulator increases with scale", monotone));
  return r;
}

Report run_oracle(const RunConfig& c) {
  using namespace oracle;
  Report r;
  const auto& o = c.oracle;
  auto lat = Lattice::make(o.side, 1, o.side);
  Budget budget;
  budget.max_configurations = o.max_configurations;
  auto grand = grand_Z(lat, o.beta, o.z, o.n_max, o.m_sequence, budget);
  auto neutral = neutral_Z(lat, o.beta, o.z, o.n_max, budget);
  auto sk = siegert_kac_check(lat, o.beta, o.n_max, o.s, budget);
  sk.tolerance = c.tolerances.siegert_kac;

  write_artifact(r, c, "oracle_sectors.csv", [&](std::ostream& out) { write_oracle_csv(out, grand); });
  write_artifact(r, c, "oracle_neutral.csv", [&](std::ostream& out) { write_oracle_csv(out, neutral); });
  write_artifact(r, c, "siegert_kac.csv", [&](std::ostream& out) {
    out << "n,configuration,field,relative_error\n";
    for (std::size_t n = 0; n < sk.field.size(); ++n) {
      const double a = sk.configuration[n], b = sk.field[n];
      csv::row(out, static_cast<int>(n), a, b, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
  });

  const auto& ev = neutral.runs.back();
  r.add(holds("oracle", "Z(beta, z) = Z(beta, -z)", ev.Z(o.z) == ev.Z(-o.z), "Z = " + csv::num(ev.Z(o.z))));
  bool monotone = true;
  for (std::size_t i = 1; i < grand.runs.size(); ++i)
    for (const auto& t : grand.runs[i].sectors)
      if (t.Q != 0) {
        const double prev = grand.runs[i - 1].sector(t.n, t.Q);
        monotone = monotone && (t.coefficient < prev || (t.coefficient == 0.0 && prev == 0.0));
      }
  r.add(holds("oracle", "non-neutral sectors decrease along the mass sequence", monotone));
  if (o.n_max >= 1)
    r.add(below("oracle", "single charge weight at the smallest mass", grand.runs.back().sector(1, 1),
                grand.runs.front().sector(1, 1)));
  auto ex = extrapolate_neutral(grand);
  double worst = 0.0;
  for (int n = 0; n <= o.n_max; ++n) {
    const auto k = static_cast<std::size_t>(n);
    const double err = std::abs(ex.coefficients[k] - ev.coefficients[k]);
    worst = std::max(worst, err / std::max(ex.residual[k] + 1e-12 * std::abs(ev.coefficients[k]), 1e-300));
  }
  r.add(at_most("oracle", "neutral sectors converge to the massless sum (error / residual)", worst, 1.0));
  r.add(at_most("oracle", "Siegert-Kac coefficient agreement", sk.max_relative_error, sk.tolerance));
  return r;
}

Report run(const std::string& command, const RunConfig& c) {
  if (command == "decompose") return run_decompose(c);
  if (command == "coeffs") return run_coeffs(c);
  if (command == "flow") return run_flow(c);
  if (command == "separatrix") return run_separatrix(c);
  if (command == "polymers") return run_polymers(c);
  if (command == "oracle") return run_oracle(c);
  if (command == "all") {
    Report r;
    for (const auto& name : commands())
      if (name != "all") r.merge(run(name, c));
    return r;
  }
  throw ConfigError("unknown command " + command);
}

std::string report_json(const Report& r, double seconds) {
  using nlohmann::json;
  json checks = json::array();
  for (const Check& c : r.checks) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(csv::num(v)); };
    checks.push_back({{"module", c.module},
                      {"name", c.name},
                      {"passed", c.passed},
                      {"value", num(c.value)},
                      {"threshold", num(c.threshold)},
                      {"detail", c.detail}});
  }
  json j{{"schema", 1}, {"passed", r.ok()}, {"checks", checks}};
  if (seconds >= 0.0) j["runtime_seconds"] = seconds;
  return j.dump(2) + "\n";
}

Report verify_all(const RunConfig& c, double* seconds) {
  const auto start = std::chrono::steady_clock::now();
  Report r = run("all", c);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (seconds) *seconds = elapsed;
  write_artifact(r, c, "verify.json", [&](std::ostream& out) { out << report_json(r, -1.0); });
  return r;
}

void print_summary(std::ostream& out, const Report& r) {
  std::size_t width = 10;
  for (const Check& c : r.checks) width = std::max(width, c.name.size());
  for (const Check& c : r.checks) {
    out << (c.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(11) << c.module << std::setw(static_cast<int>(width) + 2)
        << c.name << csv::num(c.value) << " (limit " << csv::num(c.threshold) << ")";
    if (!c.detail.empty()) out << "  " << c.detail;
    out << '\n';
  }
  out << r.checks.size() << " checks, " << std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return !c.passed; })
      << " failed\n";
}

}  // namespace ktrg::app
