#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ktrg::app {

using nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LatticeParams, L, R, gamma, mass)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CoefficientParams, L, R, alpha_sq, mode, c)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SurrogateParams, enabled, rho, c_R, c_F, c_M)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FlowParams, y1, on_manifold, x1, ceiling, horizon, stride, surrogate)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ManifoldParams, y1, J, tau, eps1, samples)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PolymerParams, L, R, j, max_size, eta, A, lambda, trials, c1, c3,
                                                kappa_c, fields)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(OracleParams, side, beta, z, n_max, s, m_sequence,
                                                max_configurations)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ToleranceParams, telescoping, leakage, psd, agreement, contraction,
                                                exponent, siegert_kac)

namespace {

json to_json_config(const RunConfig& c) {
  return json{{"lattice", c.lattice},     {"coefficients", c.coefficients}, {"flow", c.flow},
              {"manifold", c.manifold},   {"polymers", c.polymers},         {"oracle", c.oracle},
              {"tolerances", c.tolerances}, {"out_dir", c.out_dir.string()},  {"workers", c.workers},
              {"seed", c.seed}};
}

void reject_unknown(const json& given, const json& known, const std::string& where) {
  for (const auto& [key, value] : given.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key " + where + key);
    if (value.is_object() && known[key].is_object()) reject_unknown(value, known[key], where + key + ".");
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const RunConfig defaults;
  reject_unknown(j, to_json_config(defaults), "");
  RunConfig c = defaults;
  try {
    if (j.contains("lattice")) c.lattice = j["lattice"].get<LatticeParams>();
    if (j.contains("coefficients")) c.coefficients = j["coefficients"].get<CoefficientParams>();
    if (j.contains("flow")) c.flow = j["flow"].get<FlowParams>();
    if (j.contains("manifold")) c.manifold = j["manifold"].get<ManifoldParams>();
    if (j.contains("polymers")) c.polymers = j["polymers"].get<PolymerParams>();
    if (j.contains("oracle")) c.oracle = j["oracle"].get<OracleParams>();
    if (j.contains("tolerances")) c.tolerances = j["tolerances"].get<ToleranceParams>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("workers")) c.workers = j["workers"].get<unsigned>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config has a field of the wrong type: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str());
}

std::string dump_config(const RunConfig& c) { return to_json_config(c).dump(2); }

std::pair<int, int> odd_base(int L) {
  for (int g = 3; g <= L; g += 2) {
    int M = 0;
    long long p = 1;
    while (p < L) {
      p *= g;
      ++M;
    }
    if (p == L) return {g, M};
  }
  throw ConfigError("L = " + std::to_string(L) + " is not a power of an odd base");
}

void validate(const RunConfig& c) {
  const auto& la = c.lattice;
  require(la.L > 1 && la.L % 2 == 1, "lattice.L must be odd and > 1");
  require(la.R >= 1 && la.R <= 8, "lattice.R must lie in [1, 8]");
  require(la.gamma >= 3 && la.gamma % 2 == 1, "lattice.gamma must be odd and >= 3");
  {
    long long p = 1;
    while (p < la.L) p *= la.gamma;
    require(p == la.L, "lattice.L must be a power of lattice.gamma");
  }
  require(finite(la.mass) && la.mass > 0.0, "lattice.mass must be positive");

  const auto& co = c.coefficients;
  require(co.L > 1 && co.L % 2 == 1, "coefficients.L must be odd and > 1");
  require(co.R >= 2, "coefficients.R must be >= 2");
  odd_base(co.L);
  require(co.mode == "limit" || co.mode == "per_scale", "coefficients.mode must be limit or per_scale");
  require(finite(co.alpha_sq) && co.alpha_sq > 0.0, "coefficients.alpha_sq must be positive");
  require(std::abs(co.alpha_sq - 8.0 * std::acos(-1.0)) < 1e-9, "coefficients.alpha_sq must equal 8 pi on the transition line");
  require(finite(co.c), "coefficients.c must be finite");

  const auto& f = c.flow;
  require(finite(f.y1) && f.y1 > 0.0 && f.y1 < 0.1, "flow.y1 must lie in (0, 0.1)");
  require(finite(f.x1), "flow.x1 must be finite");
  require(f.ceiling > 0.0, "flow.ceiling must be positive");
  require(f.horizon >= 1 && f.horizon <= 10'000'000, "flow.horizon must lie in [1, 1e7]");
  require(f.stride >= 1, "flow.stride must be >= 1");
  require(f.surrogate.rho >= 0.0 && f.surrogate.rho < 1.0, "flow.surrogate.rho must lie in [0, 1)");

  const auto& m = c.manifold;
  require(!m.y1.empty(), "manifold.y1 must not be empty");
  for (double y : m.y1) require(finite(y) && y > 0.0 && y < 0.1, "manifold.y1 values must lie in (0, 0.1)");
  require(m.J >= 10 && m.J <= 10'000'000, "manifold.J must lie in [10, 1e7]");
  require(m.tau > 0.0 && m.tau <= 1.0, "manifold.tau must lie in (0, 1]");
  require(m.eps1 > 0.0, "manifold.eps1 must be positive");
  require(m.samples >= 1, "manifold.samples must be >= 1");

  const auto& p = c.polymers;
  require(p.L > 1 && p.L % 2 == 1, "polymers.L must be odd and > 1");
  require(p.R >= 1 && p.j >= 0 && p.j + 1 <= p.R, "polymers needs 0 <= j < R");
  require(p.max_size >= 1 && p.max_size <= 8, "polymers.max_size must lie in [1, 8]");
  require(p.eta > 0.0, "polymers.eta must be positive");
  require(!p.A.empty(), "polymers.A must not be empty");
  for (double A : p.A) require(A > 1.0, "polymers.A values must exceed 1");
  require(p.lambda > 0.0, "polymers.lambda must be positive");
  require(p.trials >= 1, "polymers.trials must be >= 1");
  require(p.c1 > 0.0 && p.c3 >= 0.0 && p.kappa_c > 0.0, "regulator constants must be positive");
  require(p.fields >= 1, "polymers.fields must be >= 1");

  const auto& o = c.oracle;
  require(o.side >= 3 && o.side <= 7 && o.side % 2 == 1, "oracle.side must be 3, 5 or 7");
  require(finite(o.beta) && o.beta > 0.0, "oracle.beta must be positive");
  require(finite(o.z), "oracle.z must be finite");
  require(o.n_max >= 0 && o.n_max <= 6, "oracle.n_max must lie in [0, 6]");
  require(o.s >= 0.0 && o.s < 1.0, "oracle.s must lie in [0, 1)");
  require(o.m_sequence.size() >= 2, "oracle.m_sequence needs at least two masses");
  for (std::size_t i = 0; i < o.m_sequence.size(); ++i) {
    require(o.m_sequence[i] > 0.0, "oracle.m_sequence must be positive");
    if (i > 0) require(o.m_sequence[i] < o.m_sequence[i - 1], "oracle.m_sequence must decrease");
  }
  require(o.max_configurations > 0, "oracle.max_configurations must be positive");

  const auto& t = c.tolerances;
  for (double v : {t.telescoping, t.leakage, t.psd, t.agreement, t.contraction, t.siegert_kac})
    require(finite(v) && v >= 0.0, "tolerances must be finite and >= 0");
  require(finite(t.exponent), "tolerances.exponent must be finite");
  require(c.workers >= 1 && c.workers <= 256, "workers must lie in [1, 256]");
  require(!c.out_dir.empty(), "out_dir must not be empty");
}

}  // namespace ktrg::app
