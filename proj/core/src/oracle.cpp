#include "ktrg/oracle.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>

#include "ktrg/covariance.hpp"
#include "ktrg/csv.hpp"

namespace ktrg::oracle {

int ChargeConfiguration::total_charge() const {
  int q = 0;
  for (const Particle& p : particles) q += p.charge;
  return q;
}

PairPotential::PairPotential(int side, double mass, std::vector<double> table)
    : side_(side), mass_(mass), table_(std::move(table)) {}

PairPotential PairPotential::yukawa(const Lattice& lattice, double m) {
  if (!(m > 0.0)) throw DomainError("Yukawa potential needs m > 0");
  return PairPotential(lattice.side(), m, cov::torus_yukawa_table(lattice.with_mass(m)));
}

PairPotential PairPotential::normalized(const Lattice& lattice) {
  return PairPotential(lattice.side(), 0.0, cov::normalized_potential_table(lattice));
}

double PairPotential::operator()(Site d) const {
  int a = d.x0 % side_, b = d.x1 % side_;
  if (a < 0) a += side_;
  if (b < 0) b += side_;
  return table_[static_cast<std::size_t>(a) * static_cast<std::size_t>(side_) + static_cast<std::size_t>(b)];
}

namespace {

Site minus(Site a, Site b) { return {a.x0 - b.x0, a.x1 - b.x1}; }

void check_charges(const ChargeConfiguration& cfg) {
  for (const Particle& p : cfg.particles)
    if (p.charge != 1 && p.charge != -1) throw DomainError("charges must be +1 or -1");
}

}  // namespace

double configuration_energy(const ChargeConfiguration& cfg, const PairPotential& W) {
  check_charges(cfg);
  double h = 0.0;
  for (const Particle& a : cfg.particles)
    for (const Particle& b : cfg.particles) h += a.charge * b.charge * W(minus(a.position, b.position));
  return 0.5 * h;
}

EnergySplit energy_split(const ChargeConfiguration& cfg, const PairPotential& W) {
  check_charges(cfg);
  const double w0 = W({0, 0});
  EnergySplit e;
  for (const Particle& a : cfg.particles)
    for (const Particle& b : cfg.particles) e.neutral += a.charge * b.charge * (W(minus(a.position, b.position)) - w0);
  e.neutral *= 0.5;
  const double q = cfg.total_charge();
  e.charge = 0.5 * q * q * w0;
  return e;
}

double ZEvaluation::Z(double z) const {
  double out = 0.0, zn = 1.0;
  for (double c : coefficients) {
    out += zn * c;
    zn *= z;
  }
  return out;
}

double ZEvaluation::sector(int n, int Q) const {
  for (const SectorTerm& t : sectors)
    if (t.n == n && t.Q == Q) return t.coefficient;
  return 0.0;
}

std::vector<double> default_m_sequence() { return {0.5, 0.25, 0.125, 0.0625}; }

namespace {

double binomial(long long n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / i;
  return r;
}

void check_budget(const Lattice& lattice, int n_max, const Budget& budget, bool labelled) {
  if (lattice.side() > budget.max_side) throw DomainError("oracle torus side above the budget");
  if (n_max < 0 || n_max > budget.max_n) throw DomainError("oracle n_max outside the budget");
  const long long items = 2LL * lattice.side() * lattice.side();
  double total = 0.0;
  for (int n = 0; n <= n_max; ++n)
    total += labelled ? std::pow(double(items), n) : binomial(items + n - 1, n);
  if (total > double(budget.max_configurations)) throw DomainError("oracle configuration budget exceeded");
}

void check_beta_z(double beta, double z) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
  if (!std::isfinite(z)) throw DomainError("z must be finite");
}

// Multisets of (site, charge) items in nondecreasing order. Each multiset
// stands for n!/prod(mult!) labelled configurations, so its contribution to
// (1/n!) sum_labelled is exp(-beta H)/prod(mult!).
class MultisetSum {
 public:
  MultisetSum(const Lattice& lattice, const PairPotential& W, double beta, int n_max, bool neutral_only)
      : side_(lattice.side()), W_(W), beta_(beta), n_max_(n_max), neutral_only_(neutral_only),
        w0_(W({0, 0})), acc_(static_cast<std::size_t>(n_max + 1), std::vector<double>(static_cast<std::size_t>(2 * n_max + 1))) {
    items_ = 2 * side_ * side_;
    sites_.reserve(static_cast<std::size_t>(n_max));
    charges_.reserve(static_cast<std::size_t>(n_max));
  }

  ZEvaluation run(double m) {
    acc_[0][static_cast<std::size_t>(n_max_)] = 1.0;
    if (n_max_ > 0) extend(0, 0.0, 0, 1.0, -1, 0);
    ZEvaluation ev;
    ev.m = m;
    ev.coefficients.assign(static_cast<std::size_t>(n_max_ + 1), 0.0);
    for (int n = 0; n <= n_max_; ++n)
      for (int Q = -n; Q <= n; ++Q) {
        double c = acc_[static_cast<std::size_t>(n)][static_cast<std::size_t>(Q + n_max_)];
        if ((n + Q) % 2 != 0) continue;
        if (neutral_only_ && Q != 0) continue;
        ev.coefficients[static_cast<std::size_t>(n)] += c;
        ev.sectors.push_back({n, Q, c});
      }
    return ev;
  }

 private:
  Site site(int item) const { return {(item / 2) / side_, (item / 2) % side_}; }

  void extend(int start, double H, int Q, double inv_mult, int last, int run) {
    const int depth = static_cast<int>(sites_.size());
    for (int item = start; item < items_; ++item) {
      const Site x = site(item);
      const int s = item % 2 == 0 ? 1 : -1;
      const int q = Q + s;
      if (neutral_only_ && std::abs(q) > n_max_ - depth - 1) continue;
      double dH = 0.5 * w0_;
      for (int i = 0; i < depth; ++i)
        dH += s * charges_[static_cast<std::size_t>(i)] * W_(minus(x, sites_[static_cast<std::size_t>(i)]));
      const int r = item == last ? run + 1 : 1;
      const double mult = inv_mult / r;
      const double h = H + dH;
      acc_[static_cast<std::size_t>(depth + 1)][static_cast<std::size_t>(q + n_max_)] += std::exp(-beta_ * h) * mult;
      if (depth + 1 < n_max_) {
        sites_.push_back(x);
        charges_.push_back(s);
        extend(item, h, q, mult, item, r);
        sites_.pop_back();
        charges_.pop_back();
      }
    }
  }

  int side_;
  const PairPotential& W_;
  double beta_;
  int n_max_;
  bool neutral_only_;
  double w0_;
  int items_ = 0;
  std::vector<std::vector<double>> acc_;
  std::vector<Site> sites_;
  std::vector<int> charges_;
};

}  // namespace

OracleResult grand_Z(const Lattice& lattice, double beta, double z, int n_max, std::span<const double> m_sequence,
                     const Budget& budget) {
  check_beta_z(beta, z);
  check_budget(lattice, n_max, budget, false);
  if (m_sequence.empty()) throw DomainError("m sequence is empty");
  for (std::size_t i = 0; i < m_sequence.size(); ++i) {
    if (!(m_sequence[i] > 0.0)) throw DomainError("masses must be positive");
    if (i > 0 && !(m_sequence[i] < m_sequence[i - 1])) throw DomainError("m sequence must decrease");
  }
  OracleResult r{beta, z, n_max, {m_sequence.begin(), m_sequence.end()}, {}};
  for (double m : m_sequence) {
    auto W = PairPotential::yukawa(lattice, m);
    r.runs.push_back(MultisetSum(lattice, W, beta, n_max, false).run(m));
  }
  return r;
}

OracleResult neutral_Z(const Lattice& lattice, double beta, double z, int n_max, const Budget& budget) {
  check_beta_z(beta, z);
  check_budget(lattice, n_max, budget, false);
  auto W = PairPotential::normalized(lattice);
  OracleResult r{beta, z, n_max, {}, {}};
  r.runs.push_back(MultisetSum(lattice, W, beta, n_max, true).run(0.0));
  return r;
}

Extrapolation extrapolate_neutral(const OracleResult& r) {
  if (r.runs.size() < 2) throw DomainError("extrapolation needs two masses");
  const ZEvaluation& a = r.runs[r.runs.size() - 2];
  const ZEvaluation& b = r.runs.back();
  const double ratio = (a.m / b.m) * (a.m / b.m);
  Extrapolation e;
  for (int n = 0; n <= r.n_max; ++n) {
    const double ca = a.sector(n, 0), cb = b.sector(n, 0);
    const double corr = (cb - ca) / (ratio - 1.0);
    e.coefficients.push_back(cb + corr);
    e.residual.push_back(std::abs(corr));
  }
  return e;
}

SiegertKacReport siegert_kac_check(const Lattice& lattice, double beta, int n_max, double s, const Budget& budget) {
  check_beta_z(beta, 0.0);
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("split parameter s must lie in [0, 1)");
  check_budget(lattice, n_max, budget, true);
  const int S = lattice.side();
  const int V = S * S;

  // nonzero modes: e^{ikx} per site and 1/(V * lambda(k))
  std::vector<std::vector<std::complex<double>>> phase;
  std::vector<double> inv;
  for (int a = 0; a < S; ++a)
    for (int b = 0; b < S; ++b) {
      if (a == 0 && b == 0) continue;
      const double k0 = 2.0 * std::numbers::pi * a / S, k1 = 2.0 * std::numbers::pi * b / S;
      const double lam = 2.0 * (1.0 - std::cos(k0)) + 2.0 * (1.0 - std::cos(k1));
      inv.push_back(1.0 / (V * lam));
      std::vector<std::complex<double>> row(static_cast<std::size_t>(V));
      for (int x = 0; x < V; ++x) row[static_cast<std::size_t>(x)] = std::polar(1.0, k0 * (x / S) + k1 * (x % S));
      phase.push_back(std::move(row));
    }
  const std::size_t K = inv.size();

  SiegertKacReport rep;
  rep.field.assign(static_cast<std::size_t>(n_max + 1), 0.0);
  rep.field[0] = 1.0;
  const double a1 = 0.5 * (1.0 - s) * beta, a2 = 0.5 * s * beta;
  double factorial = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    factorial *= n;
    if (n % 2 != 0) continue;
    std::vector<int> x(static_cast<std::size_t>(n), 0);
    double sum = 0.0;
    for (;;) {
      for (int signs = 0; signs < (1 << n); ++signs) {
        if (2 * std::popcount(static_cast<unsigned>(signs)) != n) continue;
        double form = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          std::complex<double> rho{0.0, 0.0};
          for (int i = 0; i < n; ++i) {
            const auto& e = phase[k][static_cast<std::size_t>(x[static_cast<std::size_t>(i)])];
            rho += (signs >> i & 1) ? e : -e;
          }
          form += std::norm(rho) * inv[k];
        }
        sum += std::exp(-a1 * form) * std::exp(-a2 * form);
      }
      int i = 0;
      while (i < n && ++x[static_cast<std::size_t>(i)] == V) x[static_cast<std::size_t>(i++)] = 0;
      if (i == n) break;
    }
    rep.field[static_cast<std::size_t>(n)] = sum / factorial;
  }

  rep.configuration = neutral_Z(lattice, beta, 0.0, n_max, budget).runs.back().coefficients;
  for (int n = 0; n <= n_max; ++n) {
    const double c = rep.configuration[static_cast<std::size_t>(n)];
    const double f = rep.field[static_cast<std::size_t>(n)];
    const double scale = std::max(std::abs(c), 1.0);
    rep.max_relative_error = std::max(rep.max_relative_error, std::abs(c - f) / scale);
  }
  return rep;
}

double pressure_estimate(const Lattice& lattice, double beta, double z, int n_max, const Budget& budget) {
  const double Z = neutral_Z(lattice, beta, z, n_max, budget).Z();
  if (!(Z > 0.0)) throw CheckFailure("partition function is not positive");
  return std::log(Z) / (beta * lattice.side() * lattice.side());
}

void write_oracle_csv(std::ostream& out, const OracleResult& r) {
  out << "n,Q,m,coefficient,term\n";
  for (const ZEvaluation& ev : r.runs)
    for (const SectorTerm& t : ev.sectors)
      csv::row(out, t.n, t.Q, ev.m, t.coefficient, t.coefficient * std::pow(r.z, t.n));
}

}  // namespace ktrg::oracle
