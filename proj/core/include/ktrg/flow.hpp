#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ktrg/coefficients.hpp"

namespace ktrg::flow {

enum class Mode { LimitConstants, PerScale };

// Scalar stand-in for the norm of the irrelevant activity.
struct Surrogate {
  bool enabled = false;
  double rho = 0.2;
  double c_R = 1.0;
  double c_F = 1.0;
  double c_M = 1.0;
};

struct FlowConfig {
  Mode mode = Mode::LimitConstants;
  Surrogate surrogate;
  double ceiling = 1.0;
  long horizon = 100000;
  bool stop_on_divergence = true;
};

void validate(const FlowConfig& config);

// Per-scale coefficients in the form the rescaled flow needs. Scales outside
// the table fall back to the limits.
class FlowCoefficients {
 public:
  static FlowCoefficients limits(int L, double c);
  static FlowCoefficients from_rg(const coeffs::RgCoefficients& rg, double c, double initial_volume);

  int L() const { return L_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double initial_volume() const { return vol0_; }
  int tabulated() const { return static_cast<int>(a_j_.size()); }
  double a_ratio(long j) const;
  double b_ratio(long j) const;
  double volume(long j) const;

 private:
  int L_ = 3;
  double a_ = 1.0;
  double b_ = 1.0;
  double vol0_ = 1.0;
  std::vector<double> a_j_, b_j_, vol_j_;  // index j - 1
};

struct FlowState {
  long j = 1;
  double x = 0.0;
  double y = 0.0;
  double kappa = 0.0;
  bool diverged = false;
};

// F, M and the surrogate remainder r at one scale.
struct Corrections {
  double F = 0.0;
  double M = 0.0;
  double R = 0.0;
};
Corrections corrections(long j, double x, double y, double kappa, const FlowCoefficients& c,
                        const FlowConfig& config);

FlowState step(const FlowState& s, const FlowCoefficients& c, const FlowConfig& config);

struct FlowTrajectory {
  std::vector<FlowState> states;  // j = 1, 2, ...
  FlowConfig config;
  std::optional<long> divergence_scale;
};

FlowTrajectory trajectory(double x1, double y1, const FlowConfig& config, const FlowCoefficients& c);

// Original couplings (s, z) and the special first step.
struct Couplings {
  double s = 0.0;
  double z = 0.0;
};
FlowState to_rescaled(Couplings sz, const FlowCoefficients& c);
Couplings to_original(const FlowState& s, const FlowCoefficients& c);
FlowState first_step(Couplings sz, const FlowCoefficients& c, const FlowConfig& config);

double kosterlitz_q(double q1, long j);
// h_j = |y1| [1 + |y1|(j-1)]^{-3/2}
double envelope_h(double y1, long j);

struct DeviationFit {
  std::optional<double> exponent_x;
  std::optional<double> exponent_y;
  double amplitude_x = 0.0;
  double amplitude_y = 0.0;
};
DeviationFit deviation_profile(const FlowTrajectory& traj, double q1);

// First scale where the trajectory leaves |x_j - |q_j||, |y_j - q_j| <= h_j.
std::optional<long> envelope_exit(const FlowTrajectory& traj, double q1);

struct SweepRow {
  double x1 = 0.0;
  double y1 = 0.0;
  bool diverged = false;
  std::optional<long> scale;
};
std::vector<SweepRow> sweep(std::span<const std::pair<double, double>> starts, const FlowConfig& config,
                            const FlowCoefficients& c, unsigned workers);

void write_trajectory_csv(std::ostream& out, const FlowTrajectory& traj, double q1);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace ktrg::flow
