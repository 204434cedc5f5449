#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "ktrg/lattice.hpp"

namespace ktrg::oracle {

struct Particle {
  Site position;
  int charge = 1;  // +1 or -1
};

struct ChargeConfiguration {
  std::vector<Particle> particles;
  int total_charge() const;
};

// Pair potential on the torus tabulated over all differences.
class PairPotential {
 public:
  // W(x; m), needs m > 0
  static PairPotential yukawa(const Lattice& lattice, double m);
  // W(x|0), the massless potential with W(0|0) = 0
  static PairPotential normalized(const Lattice& lattice);

  double operator()(Site d) const;
  int side() const { return side_; }
  double mass() const { return mass_; }

 private:
  PairPotential(int side, double mass, std::vector<double> table);
  int side_;
  double mass_;
  std::vector<double> table_;
};

// (1/2) sum_{i,j} s_i s_j W(x_i - x_j), self-energy included
double configuration_energy(const ChargeConfiguration& cfg, const PairPotential& W);

struct EnergySplit {
  double neutral = 0.0;  // (1/2) sum s s' (W(x - x') - W(0))
  double charge = 0.0;   // (Q^2 / 2) W(0)
  double total() const { return neutral + charge; }
};
EnergySplit energy_split(const ChargeConfiguration& cfg, const PairPotential& W);

struct Budget {
  int max_side = 7;
  int max_n = 6;
  long long max_configurations = 400'000'000;
};

struct SectorTerm {
  int n = 0;
  int Q = 0;
  double coefficient = 0.0;  // (1/n!) sum over labelled configurations of exp(-beta H)
};

// One evaluation of the z-series at fixed mass (m = 0 for the neutral sum).
struct ZEvaluation {
  double m = 0.0;
  std::vector<double> coefficients;  // index n
  std::vector<SectorTerm> sectors;
  double Z(double z) const;
  double sector(int n, int Q) const;
};

struct OracleResult {
  double beta = 0.0;
  double z = 0.0;
  int n_max = 0;
  std::vector<double> m_sequence;
  std::vector<ZEvaluation> runs;  // one per m, or a single m = 0 run
  double Z() const { return runs.back().Z(z); }
};

std::vector<double> default_m_sequence();

OracleResult grand_Z(const Lattice& lattice, double beta, double z, int n_max,
                     std::span<const double> m_sequence, const Budget& budget = {});
OracleResult neutral_Z(const Lattice& lattice, double beta, double z, int n_max, const Budget& budget = {});

// Richardson extrapolation m -> 0 of the neutral coefficients from the last two
// masses (error O(m^2)); residual is the size of the correction.
struct Extrapolation {
  std::vector<double> coefficients;
  std::vector<double> residual;
};
Extrapolation extrapolate_neutral(const OracleResult& r);

struct SiegertKacReport {
  std::vector<double> configuration;  // neutral configuration sums
  std::vector<double> field;          // Gaussian characteristic function side
  double max_relative_error = 0.0;
  double tolerance = 1e-10;
  bool passed() const { return max_relative_error <= tolerance; }
};
// Field side: the Gaussian with covariance beta W(.|0) split into independent
// parts (1 - s) beta W and s beta W, evaluated through the charge density's
// Fourier modes over labelled configurations.
SiegertKacReport siegert_kac_check(const Lattice& lattice, double beta, int n_max, double s = 0.0,
                                   const Budget& budget = {});

double pressure_estimate(const Lattice& lattice, double beta, double z, int n_max, const Budget& budget = {});

// Header n,Q,m,coefficient,term
void write_oracle_csv(std::ostream& out, const OracleResult& r);

}  // namespace ktrg::oracle
