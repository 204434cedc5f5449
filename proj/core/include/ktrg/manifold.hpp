#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "ktrg/flow.hpp"

namespace ktrg::manifold {

// Stable and unstable coordinates of the deviation (u, v) from q_j.
std::pair<double, double> diagonalize(double u, double v);
std::pair<double, double> undiagonalize(double w_plus, double w_minus);

struct ManifoldProblem {
  double y1 = 0.01;
  long J = 100000;
  double tau = 0.1;
  double eps1 = 0.05;
  flow::FlowConfig flow;
  flow::FlowCoefficients coeffs = flow::FlowCoefficients::limits(9, 0.0);
};

void validate(const ManifoldProblem& p);

// Index k holds scale j = k + 1.
struct WeightedSequence {
  std::vector<double> w_plus;
  std::vector<double> w_minus;
  std::vector<double> kappa;

  static WeightedSequence zeros(long J);
  std::size_t size() const { return w_plus.size(); }
};

// sup_j max{|w+|/(tau h), 2|w-|/(tau h), kappa/(tau h)^2}
double weighted_norm(const WeightedSequence& w, const ManifoldProblem& p);
double weighted_distance(const WeightedSequence& a, const WeightedSequence& b, const ManifoldProblem& p);

WeightedSequence apply_T(const WeightedSequence& w, const ManifoldProblem& p);

struct FixedPoint {
  double sigma = 0.0;
  WeightedSequence seq;
  int iterations = 0;
  double residual = 0.0;
  double ratio = 0.0;  // largest ratio of successive residuals
  double norm = 0.0;   // weighted norm of the fixed point
};
FixedPoint solve_fixed_point(const ManifoldProblem& p, double tol = 1e-13, int max_iterations = 500);

// Bisection on x1 by the sign of x_j - y_j at the first scale where it
// exceeds q_j, a coupling crosses the ceiling, or the horizon is reached.
double solve_shooting(double y1, const flow::FlowConfig& config, const flow::FlowCoefficients& c,
                      std::pair<double, double> bracket, double tol = 1e-13);
// +1 when x1 lies above the separatrix, -1 below.
int shooting_side(double x1, double y1, const flow::FlowConfig& config, const flow::FlowCoefficients& c);

// max ||T w - T w'|| / ||w - w'|| over random pairs in the unit ball.
double empirical_contraction(const ManifoldProblem& p, int n_samples, std::uint64_t seed, unsigned workers = 1);

// Sum_{s >= J} q_{s+1} h_s^2, the envelope used to close the unstable tail.
double tail_envelope(double y1, long J);

struct SeparatrixRow {
  double y1 = 0.0;
  double sigma_fixed_point = 0.0;
  double sigma_shooting = 0.0;
  int iterations = 0;
  double contraction = 0.0;
};
void write_separatrix_csv(std::ostream& out, std::span<const SeparatrixRow> rows, const flow::FlowCoefficients& c);

}  // namespace ktrg::manifold
