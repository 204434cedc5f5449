#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ktrg::app {

struct LatticeParams {
  int L = 3;
  int R = 3;
  int gamma = 3;
  double mass = 0.1;
};

struct CoefficientParams {
  int L = 9;
  int R = 4;
  double alpha_sq = 25.132741228718345;  // 8 pi
  std::string mode = "limit";            // "limit" or "per_scale"
  double c = -0.39232106808;
};

struct SurrogateParams {
  bool enabled = false;
  double rho = 0.2;
  double c_R = 1.0;
  double c_F = 1.0;
  double c_M = 1.0;
};

struct FlowParams {
  double y1 = 0.01;
  bool on_manifold = true;  // x1 from the separatrix solver
  double x1 = 0.0;
  double ceiling = 1.0;
  long horizon = 100000;
  int stride = 100;
  SurrogateParams surrogate;
};

struct ManifoldParams {
  std::vector<double> y1{0.005, 0.01, 0.02};
  long J = 100000;
  double tau = 0.1;
  double eps1 = 0.05;
  int samples = 100;
};

struct PolymerParams {
  int L = 3;
  int R = 2;
  int j = 0;
  int max_size = 5;
  double eta = 0.05;
  std::vector<double> A{10.0, 100.0};
  double lambda = 0.5;
  int trials = 100;
  double c1 = 5.0;
  double c3 = 1.0;
  double kappa_c = 0.1;
  int fields = 100;
};

struct OracleParams {
  int side = 5;
  double beta = 25.132741228718345;
  double z = 0.05;
  int n_max = 4;
  double s = 0.0;
  std::vector<double> m_sequence{0.5, 0.25, 0.125, 0.0625};
  long long max_configurations = 400'000'000;
};

struct ToleranceParams {
  double telescoping = 1e-8;
  double leakage = 1e-6;
  double psd = 1e-10;
  double agreement = 1e-8;
  double contraction = 0.5;
  double exponent = -1.3;
  double siegert_kac = 1e-10;
};

struct RunConfig {
  LatticeParams lattice;
  CoefficientParams coefficients;
  FlowParams flow;
  ManifoldParams manifold;
  PolymerParams polymers;
  OracleParams oracle;
  ToleranceParams tolerances;
  std::filesystem::path out_dir = "out";
  unsigned workers = 1;
  std::uint64_t seed = 20240611;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Comments (// and /* */) are allowed; unknown keys are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string dump_config(const RunConfig& c);

// Smallest odd gamma >= 3 with gamma^M = L, and M.
std::pair<int, int> odd_base(int L);

// Throws ConfigError naming the first violated precondition.
void validate(const RunConfig& c);

}  // namespace ktrg::app
