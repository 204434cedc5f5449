#pragma once

#include <cstdint>
#include <vector>

#include "ktrg/polymer.hpp"

namespace ktrg::poly {

class Field {
 public:
  Field(Lattice lattice, std::vector<double> values);
  static Field constant(const Lattice& lattice, double value);
  // Sum of random Fourier modes with |k|_inf <= modes, amplitudes ~ 1/(1+|k|^2).
  static Field smooth_random(const Lattice& lattice, int modes, double amplitude, std::uint64_t seed);

  const Lattice& lattice() const { return lattice_; }
  double operator()(Site x) const;
  // Forward difference along direction k of (+e0, +e1, -e0, -e1).
  double diff(Site x, int k) const;
  double diff2(Site x, int k, int l) const;

 private:
  Lattice lattice_;
  std::vector<double> values_;
};

struct RegulatorConstants {
  double c1 = 5.0;
  double c3 = 1.0;
  double kappa = 0.1;
};
// kappa_L = c / ln L
double kappa_for(int L, double c);

// Field norms of one field on one paving, with per-block aggregates cached.
class Regulator {
 public:
  Regulator(const Paving& paving, const Field& phi);

  double grad_l2(const Polymer& X) const;           // ||grad phi||^2 on X
  double grad_boundary_l2(const Polymer& X) const;  // ||grad phi||^2 on the boundary of X
  double hessian_w2(const Polymer& X) const;        // W(grad^2 phi, X)^2
  double sup_star(int block, int n) const;          // ||grad^n phi||_inf on block*

  double log_G(const Polymer& X, const RegulatorConstants& c) const;
  double log_G_str(const Polymer& X, double kappa) const;
  double log_G_str_block(int block, double kappa) const;

  const Paving& paving() const { return paving_; }

 private:
  Paving paving_;
  const Field* phi_;
  std::vector<double> g1_sum_;  // per block: sum over sites of sum_mu |d phi|^2
  std::vector<double> star1_, star2_;
};

}  // namespace ktrg::poly
