#include <iostream>

#include "CLI11.hpp"

#include "esterr/acceptance.hpp"
#include "esterr/cli_runner.hpp"
#include "esterr/csv.hpp"
#include "esterr/scenarios.hpp"

using namespace esterr;

namespace {

int list_registry() {
  std::cout << "priors\n";
  for (const auto& p : prior_registry()) {
    std::cout << "  " << p.name << "  " << p.prior.describe() << "\n";
  }
  std::cout << "noise\n";
  for (const auto& n : noise_registry()) {
    const DoobRecord doob = doob_registry_lookup(n.noise);
    std::cout << "  " << n.name << "  " << n.noise.describe()
              << "  tail_exponent=" << format_double(n.noise.tail_exponent())
              << "  doob=" << (doob.doob() ? "yes" : "no") << "\n";
  }
  return 0;
}

int selftest(const RunOptions& run_options) {
  const ExperimentConfig cfg = parse_config(selftest_config());
  RunOptions o = run_options;
  o.out_dir = run_options.out_dir / "selftest";
  const RunResult run_result = run(cfg, o);
  for (const auto& s : run_result.scenarios) {
    std::cout << s.name << " [" << s.job << "] " << s.status;
    if (!s.message.empty()) std::cout << ": " << s.message;
    std::cout << "\n";
  }
  AcceptanceOptions a;
  a.threads = run_options.threads;
  a.out_dir = run_options.out_dir / "acceptance";
  const auto results = run_acceptance(a, std::cout);
  bool ok = run_result.exit_code == 0;
  for (const auto& r : results) ok = ok && r.pass;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimation-error densities and small-noise limits for additive-noise models"};
  app.require_subcommand(1);

  RunOptions options;
  std::string out_dir = ".";
  std::uint64_t seed_override = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out-dir", out_dir, "Directory for artifacts");
    sub->add_option("--threads", options.threads, "Worker threads (0 = all cores)");
  };

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  std::string config_path;
  run_cmd->add_option("config", config_path, "JSON config")->required();
  add_common(run_cmd);
  auto* seed_opt = run_cmd->add_option("--seed-override", seed_override, "Replace every scenario seed");

  app.add_subcommand("list-registry", "List the built-in priors and noise laws");

  auto* self_cmd = app.add_subcommand("selftest", "Run the self-test config and the acceptance suite");
  add_common(self_cmd);

  auto* cal_cmd = app.add_subcommand("calibrate", "Log terminal deviations for the small-noise rows");
  std::string cal_out = kDefaultCalibration;
  cal_cmd->add_option("--output", cal_out, "Calibration file to write");
  cal_cmd->add_option("--threads", options.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  options.out_dir = out_dir;
  if (*seed_opt) options.seed_override = seed_override;

  try {
    if (*run_cmd) return run_config_file(config_path, options, std::cout);
    if (app.got_subcommand("list-registry")) return list_registry();
    if (*self_cmd) return selftest(options);
    if (*cal_cmd) {
      write_text_file(cal_out, calibrate_limits(options.threads).dump(2) + "\n");
      std::cout << "wrote " << cal_out << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigParse || e.kind() == ErrorKind::Io ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 2;
}
