// kgsym: experiment runner.
//
//   kgsym <convergence|efficiency|energy-drift|simulate> --config cfg.json
//         [--out dir] [--threads n] [--seed-override u64]
//
// Exit codes: 0 success, 1 other failure, 2 blow-up, 3 config error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kgsym/kgsym.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitBlowUp = 2;
constexpr int kExitConfig = 3;

struct Options {
  std::string config;
  std::optional<std::string> out;
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

void print_summary(const kgsym::RunReport& r, std::ostream& os) {
  if (r.reference) {
    os << "reference " << kgsym::scheme_name(r.reference->scheme) << " tau=" << r.reference->tau
       << " cross-check distance " << r.reference->distance << "\n";
  }
  for (const auto& s : r.schemes) {
    os << kgsym::scheme_name(s.scheme) << ":";
    if (s.fit) os << " order " << s.fit->slope;
    if (s.drift) os << " max|dH/H| " << s.drift->max_abs_relative_error << " trend " << s.drift->trend;
    if (s.blow_up_step) os << " blow-up at step " << *s.blow_up_step;
    os << " (" << s.seconds << " s)\n";
    for (const auto& w : s.warnings) os << "  warning: " << w << "\n";
  }
}

int run(const std::string& kind, const Options& opt) {
  kgsym::ExperimentConfig config;
  try {
    config = kgsym::load_config(opt.config);
    if (kgsym::experiment_name(config.kind) != kind) {
      throw kgsym::ConfigError("config '" + opt.config + "' describes a '" + kgsym::experiment_name(config.kind) +
                               "' experiment, not '" + kind + "'");
    }
    if (opt.out) config.output_dir = *opt.out;
    if (opt.seed) {
      auto* rough = std::get_if<kgsym::RoughDatumSpec>(&config.datum);
      if (rough == nullptr) throw kgsym::ConfigError("--seed-override needs a rough datum");
      rough->seed = *opt.seed;
    }
    if (opt.threads < 1) throw kgsym::ConfigError("--threads must be positive");
  } catch (const kgsym::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const auto report = kgsym::run_experiment(config, opt.threads);
    for (const auto& path : kgsym::write_outputs(report, config.output_dir)) std::cout << "wrote " << path << "\n";
    print_summary(report, std::cout);
    return report.blew_up() ? kExitBlowUp : 0;
  } catch (const kgsym::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const kgsym::BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << "\n";
    return kExitBlowUp;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Klein-Gordon low-regularity integrator experiments"};
  app.set_version_flag("--version", std::string(kgsym::kVersion));
  app.require_subcommand(1);

  Options opt;
  std::string chosen;
  for (const char* name : {"convergence", "efficiency", "energy-drift", "simulate"}) {
    auto* sub = app.add_subcommand(name, std::string("run a ") + name + " experiment");
    sub->add_option("--config", opt.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (overrides output_dir)");
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed-override", opt.seed, "replace the rough datum seed");
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  return run(chosen, opt);
}
