// ucbstab command-line tool.
//
//   ucbstab run           -c CONFIG [-o DIR] [--seed N]
//   ucbstab nstar         -c CONFIG
//   ucbstab ci            -c CONFIG [-o DIR] [--seed N]
//   ucbstab stability     -c CONFIG [-o DIR] [--seed N]
//   ucbstab growing-k     -c CONFIG [-o DIR] [--seed N]
//   ucbstab export-schema [-o FILE]
//
// Exit status: 0 success, 2 configuration error, 3 runtime error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ucbstab/ucbstab.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ucbstab;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Invocation {
  std::string config_path;
  std::string output_dir = ".";
  std::optional<std::uint64_t> seed_override;
};

LoadedConfig load(const Invocation &inv) {
  if (inv.config_path.empty()) throw ConfigError("config", "no config file given (--config)");
  if (!fs::exists(inv.config_path))
    throw ConfigError("config", "file '" + inv.config_path + "' does not exist");
  LoadedConfig loaded = load_config(inv.config_path);
  if (inv.seed_override) loaded.config.root_seed = *inv.seed_override;
  return loaded;
}

ReportHeader header_for(const LoadedConfig &loaded) {
  return {loaded.hash, loaded.config.root_seed, "ucbstab"};
}

fs::path prepare_output(const Invocation &inv) {
  const fs::path dir(inv.output_dir);
  fs::create_directories(dir);
  return dir;
}

template <typename Writer>
void write_file(const fs::path &path, Writer &&writer) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  writer(os);
  if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

int cmd_run(const Invocation &inv) {
  const auto loaded = load(inv);
  const auto report = run_experiment(loaded.config);
  const auto dir = prepare_output(inv);
  const auto header = header_for(loaded);
  write_file(dir / "replications.csv",
             [&](std::ostream &os) { write_replications_csv(os, report, header); });
  write_file(dir / "summary.json", [&](std::ostream &os) {
    write_summary_json(os, header, loaded.entries, report_summary_json(report));
  });
  std::cout << "replications=" << report.replications << " horizon=" << report.horizon
            << " n_star=" << detail::format_real(report.prediction.n_star)
            << " mean_regret=" << detail::format_real(report.mean_regret) << "\n"
            << "wrote " << (dir / "replications.csv").string() << " and "
            << (dir / "summary.json").string() << "\n";
  return 0;
}

int cmd_nstar(const Invocation &inv) {
  const auto loaded = load(inv);
  const auto instance = loaded.config.instance();
  const auto prediction = solve_n_star(instance, loaded.config.solver_tolerance);
  std::cout << "horizon    " << instance.horizon() << "\n"
            << "arms       " << instance.arm_count() << "\n"
            << "n_star     " << detail::format_real(prediction.n_star) << "\n"
            << "residual   " << detail::format_real(prediction.residual) << "\n"
            << "tolerance  " << detail::format_real(loaded.config.solver_tolerance) << "\n\n";
  std::cout << "arm  gap            predicted_pulls\n";
  for (std::size_t a = 0; a < instance.arm_count(); ++a) {
    std::cout << std::left << std::setw(5) << a << std::setw(15)
              << detail::format_real(prediction.gaps[a])
              << detail::format_real(prediction.predicted_pulls[a]) << "\n";
  }
  std::cout << "\nB      |S_B|  fraction  members\n";
  for (double b : kNearOptimalThresholds) {
    const auto set = near_optimal_set(prediction, b);
    std::cout << std::left << std::setw(7) << detail::format_real(b) << std::setw(7)
              << set.members.size() << std::setw(10) << detail::format_real(set.fraction);
    for (std::size_t i = 0; i < set.members.size(); ++i)
      std::cout << (i ? "," : "") << set.members[i];
    std::cout << "\n";
  }
  return 0;
}

int cmd_ci(const Invocation &inv) {
  const auto loaded = load(inv);
  const auto report = run_experiment(loaded.config);
  const auto dir = prepare_output(inv);
  const auto header = header_for(loaded);
  write_file(dir / "replications.csv",
             [&](std::ostream &os) { write_replications_csv(os, report, header); });
  write_file(dir / "ci.json", [&](std::ostream &os) {
    write_summary_json(os, header, loaded.entries, report_summary_json(report));
  });
  std::cout << "level      " << detail::format_real(1.0 - loaded.config.alpha) << "\n"
            << "ci_form    " << to_string(loaded.config.ci_form) << "\n"
            << "truth      " << detail::format_real(report.direction_truth) << "\n"
            << "coverage   " << std::fixed << std::setprecision(4) << report.coverage_rate
            << " +/- " << report.coverage_std_error << " (binomial s.e., R="
            << report.replications << ", degenerate=" << report.degenerate_intervals << ")\n";
  return 0;
}

int cmd_stability(const Invocation &inv) {
  const auto loaded = load(inv);
  const auto points = stability_suite(loaded.config);
  const auto dir = prepare_output(inv);
  const auto header = header_for(loaded);
  write_file(dir / "stability.csv",
             [&](std::ostream &os) { write_stability_csv(os, points, header); });
  write_file(dir / "stability.json", [&](std::ostream &os) {
    auto arr = nlohmann::json::array();
    for (const auto &p : points) arr.push_back(report_summary_json(p.report));
    write_summary_json(os, header, loaded.entries, arr);
  });
  std::cout << "horizon   arm  n_star        median_ratio  iqr\n";
  for (const auto &p : points) {
    for (std::size_t a = 0; a < p.ratios.size(); ++a) {
      std::cout << std::left << std::setw(10) << p.horizon << std::setw(5) << a
                << std::setw(14) << detail::format_real(p.report.prediction.n_star)
                << std::fixed << std::setprecision(4) << std::setw(14) << p.ratios[a].median
                << p.ratios[a].iqr() << std::defaultfloat << "\n";
    }
  }
  return 0;
}

int cmd_growing_k(const Invocation &inv) {
  const auto loaded = load(inv);
  const auto points = growing_k_suite(loaded.config);
  const auto dir = prepare_output(inv);
  const auto header = header_for(loaded);
  write_file(dir / "growing_k.csv",
             [&](std::ostream &os) { write_growing_k_csv(os, points, header); });
  write_file(dir / "growing_k.json", [&](std::ostream &os) {
    auto arr = nlohmann::json::array();
    for (const auto &p : points) {
      auto s = report_summary_json(p.report);
      s["arm_count"] = p.arm_count;
      s["max_median_deviation"] = p.max_median_deviation;
      s["near_optimal_threshold"] = p.near_optimal_threshold;
      s["near_optimal_fraction"] = p.near_optimal_fraction;
      arr.push_back(std::move(s));
    }
    write_summary_json(os, header, loaded.entries, arr);
  });
  std::cout << "horizon   K     n_star        max|median-1|\n";
  for (const auto &p : points) {
    std::cout << std::left << std::setw(10) << p.horizon << std::setw(6) << p.arm_count
              << std::setw(14) << detail::format_real(p.report.prediction.n_star)
              << std::fixed << std::setprecision(4) << p.max_median_deviation
              << std::defaultfloat << "\n";
  }
  return 0;
}

int cmd_export_schema(const std::string &path) {
  if (path.empty()) {
    std::cout << config_template();
    return 0;
  }
  write_file(path, [](std::ostream &os) { os << config_template(); });
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Monte Carlo laboratory for UCB arm-pull stability and inference"};
  app.require_subcommand(1);

  Invocation inv;
  std::uint64_t seed = 0;
  std::string schema_out;

  auto add_common = [&](CLI::App *sub, bool with_output) {
    sub->add_option("-c,--config", inv.config_path, "Experiment config file")->required();
    if (with_output) {
      sub->add_option("-o,--out", inv.output_dir, "Output directory");
      sub->add_option("--seed", seed, "Override experiment.root_seed");
    }
  };

  auto *run = app.add_subcommand("run", "Run replications; write CSV rows and a JSON summary");
  add_common(run, true);
  auto *nstar = app.add_subcommand("nstar", "Solve for n*, predicted pulls and S_B membership");
  add_common(nstar, false);
  auto *ci = app.add_subcommand("ci", "Coverage of the linear-combination interval");
  add_common(ci, true);
  auto *stability = app.add_subcommand("stability", "Stability ratios across horizons");
  add_common(stability, true);
  auto *growing = app.add_subcommand("growing-k", "Stability with K growing in T");
  add_common(growing, true);
  auto *schema = app.add_subcommand("export-schema", "Print a documented config template");
  schema->add_option("-o,--out", schema_out, "Write the template to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  for (auto *sub : {run, ci, stability, growing}) {
    if (sub->parsed() && sub->count("--seed") > 0) inv.seed_override = seed;
  }

  try {
    if (run->parsed()) return cmd_run(inv);
    if (nstar->parsed()) return cmd_nstar(inv);
    if (ci->parsed()) return cmd_ci(inv);
    if (stability->parsed()) return cmd_stability(inv);
    if (growing->parsed()) return cmd_growing_k(inv);
    if (schema->parsed()) return cmd_export_schema(schema_out);
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
