#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "ktrg/lattice.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kCheckFailure = 1;

template <class T>
void apply(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> out_dir;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;

  std::optional<int> L, R;
  std::optional<double> mass;
  std::optional<std::string> mode;
  std::optional<double> x1, y1;
  std::optional<bool> surrogate;
  std::optional<long> horizon;
  std::optional<int> j, trials;
  std::optional<int> side, nmax;
  std::optional<double> beta, z;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON configuration file (comments allowed)")->check(CLI::ExistingFile);
  cmd->add_option("--out-dir", o.out_dir, "Directory for CSV and report artifacts");
  cmd->add_option("--workers", o.workers, "Upper bound on parallel width")->check(CLI::Range(1u, 256u));
  cmd->add_option("--seed", o.seed, "Seed for sampled checks");
}

void apply_overrides(const std::string& command, const Overrides& o, ktrg::app::RunConfig& c) {
  if (o.out_dir) c.out_dir = *o.out_dir;
  apply(o.workers, c.workers);
  apply(o.seed, c.seed);
  if (command == "decompose") {
    apply(o.L, c.lattice.L);
    apply(o.R, c.lattice.R);
    apply(o.mass, c.lattice.mass);
    if (o.L) c.lattice.gamma = ktrg::app::odd_base(*o.L).first;
  } else if (command == "coeffs" || command == "flow" || command == "separatrix") {
    apply(o.L, c.coefficients.L);
    apply(o.R, c.coefficients.R);
    apply(o.mode, c.coefficients.mode);
  } else if (command == "polymers") {
    apply(o.L, c.polymers.L);
    apply(o.R, c.polymers.R);
    apply(o.j, c.polymers.j);
    apply(o.trials, c.polymers.trials);
  } else if (command == "oracle") {
    apply(o.side, c.oracle.side);
    apply(o.beta, c.oracle.beta);
    apply(o.z, c.oracle.z);
    apply(o.nmax, c.oracle.n_max);
  }
  if (command == "flow") {
    apply(o.y1, c.flow.y1);
    if (o.x1) {
      c.flow.x1 = *o.x1;
      c.flow.on_manifold = false;
    }
    apply(o.surrogate, c.flow.surrogate.enabled);
    apply(o.horizon, c.flow.horizon);
  }
  if (command == "separatrix" && o.y1) c.manifold.y1 = {*o.y1};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renormalization group engine for the two-dimensional Coulomb gas on its transition line"};
  app.require_subcommand(1);
  Overrides o;

  auto* decompose = app.add_subcommand("decompose", "Multiscale covariance split and its checks");
  decompose->add_option("--L", o.L, "Block factor");
  decompose->add_option("--R", o.R, "Number of scales");
  decompose->add_option("--mass", o.mass, "Yukawa mass");

  auto* coeffs = app.add_subcommand("coeffs", "Scale-dependent flow coefficients");
  coeffs->add_option("--L", o.L, "Block factor");
  coeffs->add_option("--R", o.R, "Number of scales");

  auto* flow = app.add_subcommand("flow", "Iterate the discrete flow");
  flow->add_option("--y1", o.y1, "Initial charge coupling")->required();
  flow->add_option("--x1", o.x1, "Initial temperature coupling (default: on the separatrix)");
  flow->add_option("--mode", o.mode, "Coefficient source")->check(CLI::IsMember({"limit", "per_scale"}));
  flow->add_option("--L", o.L, "Block factor");
  flow->add_option("--R", o.R, "Scales used for per-scale coefficients");
  flow->add_option("--horizon", o.horizon, "Number of scales to iterate");
  flow->add_flag("--surrogate", o.surrogate, "Enable the irrelevant-activity surrogate");

  auto* separatrix = app.add_subcommand("separatrix", "Separatrix by fixed point and by shooting");
  separatrix->add_option("--y1", o.y1, "Initial charge coupling")->required();
  separatrix->add_option("--mode", o.mode, "Coefficient source")->check(CLI::IsMember({"limit", "per_scale"}));
  separatrix->add_option("--L", o.L, "Block factor");
  separatrix->add_option("--R", o.R, "Scales used for per-scale coefficients");

  auto* polymers = app.add_subcommand("polymers", "Polymer geometry, activity sums, extraction identities, regulators");
  polymers->add_option("--L", o.L, "Block factor");
  polymers->add_option("--R", o.R, "Number of scales");
  polymers->add_option("--j", o.j, "Fine scale");
  polymers->add_option("--trials", o.trials, "Random rational extraction trials");

  auto* oracle = app.add_subcommand("oracle", "Brute-force partition function on a small torus");
  oracle->add_option("--side", o.side, "Torus side (3, 5 or 7)");
  oracle->add_option("--beta", o.beta, "Inverse temperature");
  oracle->add_option("--z", o.z, "Activity");
  oracle->add_option("--nmax", o.nmax, "Largest particle number");

  auto* all = app.add_subcommand("all", "Run every pipeline");
  auto* verify = app.add_subcommand("verify", "Run every check and write verify.json");

  for (auto* cmd : {decompose, coeffs, flow, separatrix, polymers, oracle, all, verify}) add_common(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  ktrg::app::RunConfig config;
  try {
    if (o.config) config = ktrg::app::load_config(*o.config);
    apply_overrides(command, o, config);
    ktrg::app::validate(config);
  } catch (const ktrg::app::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    std::filesystem::create_directories(config.out_dir);
    ktrg::app::Report report;
    double seconds = 0.0;
    if (command == "verify") {
      report = ktrg::app::verify_all(config, &seconds);
    } else {
      report = ktrg::app::run(command, config);
    }
    ktrg::app::print_summary(std::cout, report);
    if (command == "verify") std::cout << "runtime " << seconds << " s\n";
    for (const auto& a : report.artifacts) std::cout << "wrote " << a.string() << '\n';
    if (const auto* f = report.first_failure()) {
      std::cerr << "check failed: " << f->module << ": " << f->name << '\n';
      return kCheckFailure;
    }
  } catch (const ktrg::DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return kCheckFailure;
  }
  return 0;
}
