#include "ktrg/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "ktrg/parallel.hpp"

namespace ktrg::coeffs {

using cov::CovarianceStack;
using cov::OctantTable;

Site offset(Dir d) {
  switch (d) {
    case Dir::PlusE1: return {1, 0};
    case Dir::PlusE2: return {0, 1};
    case Dir::MinusE1: return {-1, 0};
    case Dir::MinusE2: return {0, -1};
  }
  return {0, 0};
}

double d1(const OctantTable& t, Dir mu, int y0, int y1) {
  Site m = offset(mu);
  return t(y0 + m.x0, y1 + m.x1) - t(y0, y1);
}

double d2(const OctantTable& t, Dir mu, Dir nu, int y0, int y1) {
  Site m = offset(mu);
  Site n = offset(nu);
  return t(y0 + m.x0 + n.x0, y1 + m.x1 + n.x1) - t(y0 + m.x0, y1 + m.x1) -
         t(y0 + n.x0, y1 + n.x1) + t(y0, y1);
}

namespace {

void check_scale(const CovarianceStack& stack, int j, int lo, int hi) {
  if (j < lo || j > hi)
    throw DomainError("scale " + std::to_string(j) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "] for a stack with " +
                      std::to_string(stack.scales()) + " scales");
}

double finite_or_throw(double v, const char* what, int j) {
  if (!std::isfinite(v))
    throw CheckFailure(std::string("non-finite ") + what + " at scale " + std::to_string(j));
  return v;
}

int octant_multiplicity(int a, int b) {
  if (a == 0) return 1;
  if (b == 0 || b == a) return 4;
  return 8;
}

struct Term {
  const OctantTable* table;
  double coef;
};

// Rows of a linear combination of scale tables: values at (y0, y1) for
// y0 in [-W, W], stored at index y0 + W.
class CompositeRows {
 public:
  CompositeRows(std::vector<Term> terms, int W) : terms_(std::move(terms)), W_(W) {}

  void fill(int y1, std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(2 * W_ + 1), 0.0);
    for (const Term& t : terms_) {
      const int r = t.table->radius();
      if (std::abs(y1) > r) continue;
      const int top = std::min(r, W_);
      for (int y0 = -top; y0 <= top; ++y0) out[static_cast<std::size_t>(y0 + W_)] += t.coef * (*t.table)(y0, y1);
    }
  }

  int width() const { return W_; }

 private:
  std::vector<Term> terms_;
  int W_;
};

// Sum over y of prod of forward differences along +e1 of two composites.
double bond_sum(const CompositeRows& f, const CompositeRows& g) {
  const int W = std::min(f.width(), g.width());
  std::vector<double> rf, rg;
  double acc = 0.0;
  for (int y1 = -W; y1 <= W; ++y1) {
    f.fill(y1, rf);
    g.fill(y1, rg);
    const int of = f.width() - W;
    const int og = g.width() - W;
    for (int i = 0; i + 1 < 2 * W + 1; ++i) {
      double df = rf[static_cast<std::size_t>(of + i + 1)] - rf[static_cast<std::size_t>(of + i)];
      double dg = rg[static_cast<std::size_t>(og + i + 1)] - rg[static_cast<std::size_t>(og + i)];
      acc += df * dg;
    }
  }
  return acc;
}

// Second difference of a composite row triple for a pair type:
// 0 = (e1, e1), 1 = (e1, -e1), 2 = (e1, e2). `c` is row y1, `u` row y1+1,
// `d` row y1-1; index i is y0 + W.
double second(int type, const std::vector<double>& c, const std::vector<double>& u, std::size_t i) {
  switch (type) {
    case 0: return c[i + 2] - 2.0 * c[i + 1] + c[i];
    case 1: return 2.0 * c[i] - c[i + 1] - c[i - 1];
    default: return u[i + 1] - c[i + 1] - u[i] + c[i];
  }
}

// Number of ordered direction pairs of each type among the 16.
constexpr double kTypeCount[3] = {4.0, 4.0, 8.0};

std::vector<Term> lower_scales(const CovarianceStack& s, int j, double coef = 1.0) {
  std::vector<Term> t;
  for (int n = 0; n < j; ++n) t.push_back({&s.table(n), coef});
  return t;
}

}  // namespace

WKernels::WKernels(const CovarianceStack& stack, int j, double alpha_sq)
    : stack_(&stack), j_(j), alpha_sq_(alpha_sq) {
  check_scale(stack, j, 0, stack.scales());
  const double L = stack.lattice().L();
  radius_ = j == 0 ? 0 : stack.radius(j - 1) + 2;
  const int rb = j == 0 ? 0 : stack.radius(j - 1);
  b_ = OctantTable(rb);
  c_ = OctantTable(rb);
  e_ = OctantTable(radius_);
  for (int n = 0; n < j; ++n)
    d_weight_.push_back(0.5 * std::sqrt(alpha_sq) * std::exp(-0.5 * alpha_sq * stack.origin_sum(j - 1, n)) *
                        std::pow(L, -2.0 * n));
  if (j == 0) return;

  std::vector<double> g(static_cast<std::size_t>(j));
  for (int a = 0; a <= rb; ++a) {
    for (int bb = 0; bb <= a; ++bb) {
      for (int n = 0; n < j; ++n) g[static_cast<std::size_t>(n)] = stack(n, a, bb);
      double wb = 0.0;
      double wc = 0.0;
      for (int n = 0; n < j; ++n) {
        double gn = g[static_cast<std::size_t>(n)];
        if (gn == 0.0) continue;
        double diff = 0.0;  // Gamma_{j-1,n+1}(0|y)
        double sum = 0.0;   // Gamma_{j-1,n+1}(0) + Gamma_{j-1,n+1}(y)
        for (int i = n + 1; i < j; ++i) {
          diff += stack.origin(i) - g[static_cast<std::size_t>(i)];
          sum += stack.origin(i) + g[static_cast<std::size_t>(i)];
        }
        double pre = std::exp(-alpha_sq * stack.origin(n)) * std::pow(L, -4.0 * n);
        wb += std::exp(-alpha_sq * diff) * pre * std::expm1(alpha_sq * gn);
        wc += 0.5 * std::exp(-alpha_sq * sum) * pre * std::expm1(-alpha_sq * gn);
      }
      b_.at(a, bb) = wb;
      c_.at(a, bb) = wc;
    }
  }

  std::vector<double> diffs(static_cast<std::size_t>(j));
  for (int a = 0; a <= radius_; ++a) {
    for (int bb = 0; bb <= a; ++bb) {
      double we = 0.0;
      for (Dir mu : kDirs) {
        for (int n = 0; n < j; ++n) diffs[static_cast<std::size_t>(n)] = d1(stack.table(n), mu, a, bb);
        // suffix sums give d Gamma_{j-1,n}
        double upper = 0.0;  // d Gamma_{j-1,n+1}
        for (int n = j - 1; n >= 0; --n) {
          double full = upper + diffs[static_cast<std::size_t>(n)];
          double w = std::exp(-0.5 * alpha_sq * stack.origin_sum(j - 1, n)) * std::pow(L, -2.0 * n);
          we += 0.5 * w * (full * full - upper * upper);
          upper = full;
        }
      }
      e_.at(a, bb) = 0.25 * alpha_sq * we;
    }
  }
}

double WKernels::a(Dir mu, Dir nu, int y0, int y1) const {
  double s = 0.0;
  for (int n = 0; n < j_; ++n) s += d2(stack_->table(n), mu, nu, y0, y1);
  return 0.5 * s;
}

double WKernels::d(Dir mu, int y0, int y1) const {
  double s = 0.0;
  for (int n = 0; n < j_; ++n) s += d_weight_[static_cast<std::size_t>(n)] * d1(stack_->table(n), mu, y0, y1);
  return s;
}

WKernels::Summability WKernels::summability() const {
  Summability out;
  if (j_ == 0) return out;
  const double L = stack_->lattice().L();
  const double Lj = std::pow(L, j_);

  for (int a = 0; a <= radius_; ++a) {
    for (int bb = 0; bb <= a; ++bb) {
      const double m = octant_multiplicity(a, bb);
      const double r = std::hypot(double(a), double(bb));
      out.b += m * std::abs(b_(a, bb)) * r * r * r;
      out.c += m * std::abs(c_(a, bb));
      out.e += m * std::abs(e_(a, bb)) * r;
    }
  }
  out.b /= Lj;
  out.c *= Lj * Lj;
  out.e *= Lj;

  const int W = radius_ + 2;
  CompositeRows F(lower_scales(*stack_, j_, 0.5), W);
  std::vector<Term> dterms;
  for (int n = 0; n < j_; ++n) dterms.push_back({&stack_->table(n), d_weight_[static_cast<std::size_t>(n)]});
  CompositeRows G(std::move(dterms), W);
  double sa[3] = {0, 0, 0};
  double sd[2] = {0, 0};
  std::vector<double> down, cur, up, gc, gu;
  F.fill(-W - 1, down);
  F.fill(-W, cur);
  for (int y1 = -W; y1 < W; ++y1) {
    F.fill(y1 + 1, up);
    G.fill(y1, gc);
    G.fill(y1 + 1, gu);
    for (int i = 1; i + 2 < 2 * W + 1; ++i) {
      const double y0 = i - W;
      const double r = std::hypot(y0, double(y1));
      const auto k = static_cast<std::size_t>(i);
      for (int t = 0; t < 3; ++t) sa[t] += std::abs(second(t, cur, up, k)) * r;
      sd[0] += std::abs(gc[k + 1] - gc[k]);
      sd[1] += std::abs(gu[k] - gc[k]);
    }
    down.swap(cur);
    cur.swap(up);
  }
  out.a = std::max({sa[0], sa[1], sa[2]}) / Lj;
  out.d = std::max(sd[0], sd[1]) * Lj;
  return out;
}

double volume_factor(int L, double gamma_origin, double alpha_sq) {
  return double(L) * L * std::exp(-0.5 * alpha_sq * gamma_origin);
}

double volume_factor(const CovarianceStack& stack, int j, double alpha_sq) {
  check_scale(stack, j, 0, stack.scales() - 1);
  return volume_factor(stack.lattice().L(), stack.origin(j), alpha_sq);
}

double coeff_a(const CovarianceStack& stack, int j, double alpha_sq) {
  check_scale(stack, j, 1, stack.scales() - 1);
  const double L = stack.lattice().L();
  const double g0 = stack.origin(j);
  WKernels w(stack, j, alpha_sq);
  const OctantTable& gj = stack.table(j);

  double first = 0.0;
  const int rb = w.b_table().radius();
  for (int a = 0; a <= rb; ++a) {
    for (int b = 0; b <= a; ++b) {
      double r2 = double(a) * a + double(b) * b;
      first += octant_multiplicity(a, b) * r2 * w.b(a, b) * std::expm1(-alpha_sq * (g0 - gj.at(a, b)));
    }
  }
  double second = 0.0;
  for (int a = 0; a <= gj.radius(); ++a) {
    for (int b = 0; b <= a; ++b) {
      double r2 = double(a) * a + double(b) * b;
      second += octant_multiplicity(a, b) * r2 * std::expm1(alpha_sq * gj.at(a, b));
    }
  }
  second *= std::exp(-alpha_sq * g0) * std::pow(L, -4.0 * j);
  return finite_or_throw(0.5 * alpha_sq * (first + second), "a_j", j);
}

double coeff_b(const CovarianceStack& stack, int j, double alpha_sq) {
  check_scale(stack, j, 1, stack.scales() - 1);
  const double L = stack.lattice().L();
  const int W = stack.radius(j) + 1;
  CompositeRows gj({{&stack.table(j), 1.0}}, W);
  double acc = bond_sum(gj, gj);
  for (int n = 0; n < j; ++n) {
    double weight = std::exp(-0.5 * alpha_sq * stack.origin_sum(j - 1, n)) * std::pow(L, 2.0 * (j - n));
    CompositeRows gn({{&stack.table(n), 1.0}}, stack.radius(n) + 1);
    acc += 2.0 * weight * bond_sum(gn, gj);
  }
  // The four directions give equal sums; with the factor 1/2 that is twice
  // the +e1 sum.
  return finite_or_throw(0.5 * alpha_sq * 2.0 * acc, "b_j", j);
}

namespace {

// (1/4) sum over direction pairs of d^mu d^nu Gamma_j(0) y^mu y^nu.
double taylor_quadratic(const OctantTable& g, Site y) {
  double q = 0.0;
  for (Dir mu : kDirs)
    for (Dir nu : kDirs) q += d2(g, mu, nu, 0, 0) * component(y, mu) * component(y, nu);
  return 0.25 * q;
}

}  // namespace

double e4_remainder(const CovarianceStack& stack, int j, double alpha_sq, Site y) {
  check_scale(stack, j, 1, stack.scales() - 1);
  const OctantTable& g = stack.table(j);
  return std::expm1(-alpha_sq * (g.at(0, 0) - g(y.x0, y.x1))) - 0.5 * alpha_sq * taylor_quadratic(g, y);
}

EnergyCoefficients energy_coeffs(const CovarianceStack& stack, int j, double alpha_sq) {
  check_scale(stack, j, 1, stack.scales() - 1);
  const double L = stack.lattice().L();
  const double L2j = std::pow(L, 2.0 * j);
  const OctantTable& gj = stack.table(j);
  EnergyCoefficients out;

  double lap = 0.0;
  for (Dir mu : kDirs) lap += d2(gj, mu, mu, 0, 0);
  out.e2 = -0.5 * L2j * 0.5 * lap;

  // e3: pair types weighted by their multiplicity among the 16 ordered pairs.
  {
    const int W = stack.radius(j) + 2;
    std::vector<Term> aterms{{&gj, 1.0}};
    for (int n = 0; n < j; ++n) aterms.push_back({&stack.table(n), 3.0});
    CompositeRows A(std::move(aterms), W + 1);
    CompositeRows D({{&gj, 1.0}}, W + 1);
    const double d0[3] = {d2(gj, Dir::PlusE1, Dir::PlusE1, 0, 0), d2(gj, Dir::PlusE1, Dir::MinusE1, 0, 0),
                          d2(gj, Dir::PlusE1, Dir::PlusE2, 0, 0)};
    double s[3] = {0, 0, 0};
    std::vector<double> ac, au, dc, du;
    for (int y1 = -W; y1 <= W; ++y1) {
      A.fill(y1, ac);
      A.fill(y1 + 1, au);
      D.fill(y1, dc);
      D.fill(y1 + 1, du);
      for (int y0 = -W; y0 <= W; ++y0) {
        auto i = static_cast<std::size_t>(y0 + W + 1);
        for (int t = 0; t < 3; ++t) s[t] += second(t, ac, au, i) * (second(t, dc, du, i) - d0[t]);
      }
    }
    double total = 0.0;
    for (int t = 0; t < 3; ++t) total += kTypeCount[t] * s[t];
    out.e3 = 0.25 * L2j * 0.25 * total;
  }

  // e4
  {
    WKernels w(stack, j, alpha_sq);
    const double g0 = gj.at(0, 0);
    const int rb = w.b_table().radius();
    double first = 0.0;
    for (int y0 = -rb; y0 <= rb; ++y0) {
      for (int y1 = -rb; y1 <= rb; ++y1) {
        double wb = w.b(y0, y1);
        if (wb == 0.0) continue;
        first += wb * (std::expm1(-alpha_sq * (g0 - gj(y0, y1))) -
                       0.5 * alpha_sq * taylor_quadratic(gj, Site{y0, y1}));
      }
    }
    double second_sum = 0.0;
    for (int a = 0; a <= gj.radius(); ++a)
      for (int b = 0; b <= a; ++b) second_sum += octant_multiplicity(a, b) * std::expm1(alpha_sq * gj.at(a, b));
    out.e4 = 2.0 * L2j * first + std::exp(-alpha_sq * g0) * second_sum / L2j;
  }
  finite_or_throw(out.e3, "e3", j);
  finite_or_throw(out.e4, "e4", j);
  return out;
}

RgCoefficients compute(const CovarianceStack& stack, double alpha_sq, unsigned workers) {
  RgCoefficients out;
  out.L = stack.lattice().L();
  out.alpha_sq = alpha_sq;
  const int count = std::max(0, stack.scales() - 1);
  out.scales = parallel_map(static_cast<std::size_t>(count), workers, [&](std::size_t k) {
    const int j = static_cast<int>(k) + 1;
    ScaleCoefficients c;
    c.j = j;
    c.a = coeff_a(stack, j, alpha_sq);
    c.b = coeff_b(stack, j, alpha_sq);
    auto e = energy_coeffs(stack, j, alpha_sq);
    c.e2 = e.e2;
    c.e3 = e.e3;
    c.e4 = e.e4;
    c.volume_factor = volume_factor(stack, j, alpha_sq);
    return c;
  });
  return out;
}

LimitConstants limit_constants(int L, double alpha_sq, double c) {
  if (std::abs(alpha_sq - kKtAlphaSq) > 1e-12 * kKtAlphaSq)
    throw DomainError("limit constants are defined at alpha^2 = 8 pi only");
  const double lnL = std::log(double(L));
  const double pi = kKtAlphaSq / 8.0;
  return {8.0 * pi * pi * std::exp(8.0 * pi * c) * lnL, 2.0 * lnL};
}

double second_difference_sum(const CovarianceStack& stack, int j) {
  check_scale(stack, j, 0, stack.scales() - 1);
  const int W = stack.radius(j) + 2;
  CompositeRows G({{&stack.table(j), 1.0}}, W + 1);
  double s[3] = {0, 0, 0};
  std::vector<double> c, u;
  for (int y1 = -W; y1 <= W; ++y1) {
    G.fill(y1, c);
    G.fill(y1 + 1, u);
    for (int y0 = -W; y0 <= W; ++y0)
      for (int t = 0; t < 3; ++t) s[t] += second(t, c, u, static_cast<std::size_t>(y0 + W + 1));
  }
  return std::max({std::abs(s[0]), std::abs(s[1]), std::abs(s[2])});
}

double moment_off_diagonal(const CovarianceStack& stack, int j, double alpha_sq) {
  check_scale(stack, j, 0, stack.scales() - 1);
  const OctantTable& g = stack.table(j);
  const int r = g.radius();
  const double pre = std::exp(-alpha_sq * g.at(0, 0));
  double off = 0.0, diag0 = 0.0, diag1 = 0.0;
  for (int y0 = -r; y0 <= r; ++y0) {
    for (int y1 = -r; y1 <= r; ++y1) {
      double v = pre * std::expm1(alpha_sq * g(y0, y1));
      off += v * y0 * y1;
      diag0 += v * y0 * y0;
      diag1 += v * y1 * y1;
    }
  }
  return std::max(std::abs(off), std::abs(diag0 - diag1)) / std::max(1.0, std::abs(diag0));
}

}  // namespace ktrg::coeffs
