#include "ktrg/regulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace ktrg::poly {

namespace {
constexpr Site kDir[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

Site shift(Site x, Site d) { return {x.x0 + d.x0, x.x1 + d.x1}; }
}  // namespace

Field::Field(Lattice lattice, std::vector<double> values) : lattice_(std::move(lattice)), values_(std::move(values)) {
  const auto n = static_cast<std::size_t>(lattice_.side()) * static_cast<std::size_t>(lattice_.side());
  if (values_.size() != n) throw DomainError("field size differs from the lattice volume");
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("field values must be finite");
}

Field Field::constant(const Lattice& lattice, double value) {
  const auto n = static_cast<std::size_t>(lattice.side()) * static_cast<std::size_t>(lattice.side());
  return Field(lattice, std::vector<double>(n, value));
}

Field Field::smooth_random(const Lattice& lattice, int modes, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  struct Mode {
    int k0, k1;
    double a, theta;
  };
  std::vector<Mode> ms;
  for (int k0 = -modes; k0 <= modes; ++k0)
    for (int k1 = -modes; k1 <= modes; ++k1)
      if (k0 != 0 || k1 != 0) {
        double a = amplitude * gauss(rng) / (1.0 + k0 * k0 + k1 * k1);
        ms.push_back({k0, k1, a, phase(rng)});
      }
  const int side = lattice.side();
  const int h = lattice.half();
  std::vector<double> v(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
  for (int x0 = -h; x0 <= h; ++x0)
    for (int x1 = -h; x1 <= h; ++x1) {
      double s = 0.0;
      for (const Mode& m : ms) s += m.a * std::cos(2.0 * std::numbers::pi * (m.k0 * x0 + m.k1 * x1) / side + m.theta);
      v[static_cast<std::size_t>(x0 + h) * static_cast<std::size_t>(side) + static_cast<std::size_t>(x1 + h)] = s;
    }
  return Field(lattice, std::move(v));
}

double Field::operator()(Site x) const {
  Site r = lattice_.reduce(x);
  const int h = lattice_.half();
  return values_[static_cast<std::size_t>(r.x0 + h) * static_cast<std::size_t>(lattice_.side()) +
                 static_cast<std::size_t>(r.x1 + h)];
}

double Field::diff(Site x, int k) const { return (*this)(shift(x, kDir[k])) - (*this)(x); }

double Field::diff2(Site x, int k, int l) const { return diff(shift(x, kDir[l]), k) - diff(x, k); }

double kappa_for(int L, double c) {
  if (L < 2 || !(c > 0.0)) throw DomainError("kappa needs L >= 2 and c > 0");
  return c / std::log(double(L));
}

namespace {

double g1(const Field& phi, Site x) {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) {
    double d = phi.diff(x, k);
    s += d * d;
  }
  return s;
}

double m1(const Field& phi, Site x) {
  double m = 0.0;
  for (int k = 0; k < 4; ++k) m = std::max(m, std::abs(phi.diff(x, k)));
  return m;
}

double m2(const Field& phi, Site x) {
  double m = 0.0;
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) m = std::max(m, std::abs(phi.diff2(x, k, l)));
  return m;
}

}  // namespace

Regulator::Regulator(const Paving& paving, const Field& phi) : paving_(paving), phi_(&phi) {
  if (phi.lattice().side() != paving.lattice().side()) throw DomainError("field and paving live on different tori");
  const auto nb = static_cast<std::size_t>(paving.count());
  g1_sum_.assign(nb, 0.0);
  std::vector<double> sup1(nb, 0.0), sup2(nb, 0.0);
  for (int b = 0; b < paving.count(); ++b) {
    const auto k = static_cast<std::size_t>(b);
    for (Site x : paving.sites(b)) {
      g1_sum_[k] += g1(phi, x);
      sup1[k] = std::max(sup1[k], m1(phi, x));
      sup2[k] = std::max(sup2[k], m2(phi, x));
    }
  }
  star1_.assign(nb, 0.0);
  star2_.assign(nb, 0.0);
  const double Lj = std::pow(double(paving.lattice().L()), paving.j());
  for (int b = 0; b < paving.count(); ++b) {
    const auto k = static_cast<std::size_t>(b);
    for (int c : neighborhood(paving, make_polymer(paving, {b})).blocks) {
      star1_[k] = std::max(star1_[k], sup1[static_cast<std::size_t>(c)]);
      star2_[k] = std::max(star2_[k], sup2[static_cast<std::size_t>(c)]);
    }
    star1_[k] *= Lj;
    star2_[k] *= Lj * Lj;
  }
}

double Regulator::grad_l2(const Polymer& X) const {
  double s = 0.0;
  for (int b : X.blocks) s += g1_sum_[static_cast<std::size_t>(b)];
  return s;
}

double Regulator::grad_boundary_l2(const Polymer& X) const {
  double s = 0.0;
  for (int b : X.blocks)
    for (Site x : paving_.sites(b)) {
      bool edge = false;
      for (Site d : kDir) edge = edge || !X.contains(paving_.block_of(shift(x, d)));
      if (edge) s += g1(*phi_, x);
    }
  return std::pow(double(paving_.lattice().L()), paving_.j()) * s;
}

double Regulator::hessian_w2(const Polymer& X) const {
  double s = 0.0;
  for (int b : X.blocks) s += star2_[static_cast<std::size_t>(b)] * star2_[static_cast<std::size_t>(b)];
  return s;
}

double Regulator::sup_star(int block, int n) const {
  if (n != 1 && n != 2) throw DomainError("sup_star supports n = 1, 2");
  return (n == 1 ? star1_ : star2_).at(static_cast<std::size_t>(block));
}

double Regulator::log_G(const Polymer& X, const RegulatorConstants& c) const {
  if (X.j != paving_.j()) throw DomainError("polymer scale differs from the regulator scale");
  return c.c1 * c.kappa * grad_l2(X) + c.c3 * c.kappa * grad_boundary_l2(X) + c.c1 * c.kappa * hessian_w2(X);
}

double Regulator::log_G_str_block(int block, double kappa) const {
  const auto k = static_cast<std::size_t>(block);
  return kappa * std::max(star1_.at(k) * star1_.at(k), star2_.at(k) * star2_.at(k));
}

double Regulator::log_G_str(const Polymer& X, double kappa) const {
  if (X.j != paving_.j()) throw DomainError("polymer scale differs from the regulator scale");
  double s = 0.0;
  for (int b : X.blocks) s += log_G_str_block(b, kappa);
  return s;
}

}  // namespace ktrg::poly
