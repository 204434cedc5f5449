#pragma once

#include <vector>

#include "ktrg/covariance.hpp"

namespace ktrg::cov {

// max_x |sum_j Gamma_j(x) + tail(x) - W(x; m)| / |W(0; m)|
double telescoping_error(const CovarianceStack& stack);

struct LeakageReport {
  // Per scale: max |Gamma_j(x)| / Gamma_j(0) over |x|_inf >= L^{j+1}/2 on the
  // torus, from the symbol route.
  std::vector<double> ratio;
  // Per scale: max |symbol route - recurrence| over the torus.
  std::vector<double> agreement;
  double max_ratio() const;
};
LeakageReport leakage(const CovarianceStack& stack);

// Lowest Fourier mode of every scale on the torus (dense theta grid when the
// torus is large).
std::vector<double> lowest_modes(const CovarianceStack& stack);

struct DiagonalLaw {
  std::vector<double> deviation;  // Gamma_j(0) - ln L / 2 pi, j = 0..R-1
  std::vector<double> scaled;     // |deviation| L^{j/4}
  // max_{j >= jmin} scaled_j / scaled_jmin
  double growth = 0.0;
};
DiagonalLaw diagonal_law(const CovarianceStack& stack, int jmin = 1);

struct DerivativeScaling {
  std::vector<double> first;   // L^j max |d Gamma_j|
  std::vector<double> second;  // L^{2j} max |d d Gamma_j|
  // Uniform bounds: max of the rescaled suprema over all scales.
  double bound_first = 0.0;
  double bound_second = 0.0;
  // Relative change of the rescaled suprema between the last two scales.
  double drift_first = 0.0;
  double drift_second = 0.0;
};
DerivativeScaling derivative_scaling(const CovarianceStack& stack);

// max_j max_i |Gamma_j(e_i) - Gamma_j(-e_i)|: the first-order Taylor term at
// the origin summed over the four directions.
double first_order_term(const CovarianceStack& stack);

// max_j max_x |sum_h C_h(x) - Gamma_j(x)| for the fine components.
double fine_aggregation_error(const CovarianceStack& stack);

}  // namespace ktrg::cov
