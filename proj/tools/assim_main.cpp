/*
 * Copyright 2026 The assim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// Command-line front end: simulate, assimilate, check, value-probe.
//
// Exit codes: 0 success, 1 a property check failed, 2 a solver did not
// converge, 3 invalid configuration or arguments.

#include "assim/checks.hpp"
#include "assim/errors.hpp"
#include "assim/experiment_config.hpp"
#include "assim/experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitConfig = 3;

int effective_jobs(int flag) {
  if (const char *env = std::getenv("ASSIM_JOBS")) {
    try {
      const int jobs = std::stoi(env);
      if (jobs >= 1) {
        return jobs;
      }
    } catch (const std::exception &) {
    }
    throw assim::ConfigError("ASSIM_JOBS must be a positive integer");
  }
  if (flag < 1) {
    throw assim::ConfigError("--jobs must be positive");
  }
  return flag;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Variational state estimation with Young-integral observation costs"};
  app.require_subcommand(1);

  int jobs = 1;
  bool record_timings = false;
  app.add_option("--jobs", jobs, "worker threads (ASSIM_JOBS overrides)");
  app.add_flag("--record-timings", record_timings,
               "add wall-clock timings to manifests (breaks byte-identity)");

  std::string config_path;
  std::string outdir;

  auto *sim = app.add_subcommand("simulate", "generate truth and observations");
  sim->add_option("-c,--config", config_path, "experiment JSON")->required();
  sim->add_option("-o,--outdir", outdir, "output directory")->required();

  std::string eta_path;
  std::optional<std::string> truth_path;
  auto *asim = app.add_subcommand("assimilate", "estimate the trajectory from observations");
  asim->add_option("-c,--config", config_path, "experiment JSON")->required();
  asim->add_option("--eta", eta_path, "observation CSV")->required();
  asim->add_option("--truth", truth_path, "truth CSV for RMSE reporting");
  asim->add_option("-o,--outdir", outdir, "output directory")->required();

  std::string suite = "all";
  std::uint64_t seed = 42;
  std::string check_out = "report.json";
  auto *check = app.add_subcommand("check", "run property checks");
  check->add_option("--suite", suite, "roughpath|adjoint|duality|gradient|valueprobe|all");
  check->add_option("--seed", seed, "base seed");
  check->add_option("-o,--output", check_out, "JSON report path")->capture_default_str();

  double h = 1e-4;
  std::string solver = "gradient";
  std::optional<std::string> probe_eta;
  std::optional<std::string> probe_out;
  auto *probe = app.add_subcommand("value-probe", "compare dV/dxi with the initial costate");
  probe->set_help_flag("--help", "print this help message and exit");
  probe->add_option("-c,--config", config_path, "experiment JSON")->required();
  probe->add_option("--h", h, "finite-difference step")->check(CLI::PositiveNumber);
  probe->add_option("--solver", solver, "gradient|shoot")
      ->check(CLI::IsMember({"gradient", "shoot"}));
  probe->add_option("--eta", probe_eta, "observation CSV (default: simulate)");
  probe->add_option("-o,--output", probe_out, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    assim::RunOptions options;
    options.record_timings = record_timings;
    options.jobs = effective_jobs(jobs);

    if (*sim) {
      const assim::ExperimentConfig config = assim::load_config(config_path);
      const nlohmann::json manifest = assim::simulate_to_dir(config, outdir, options);
      std::cout << manifest.dump(2) << '\n';
      return 0;
    }
    if (*asim) {
      const assim::ExperimentConfig config = assim::load_config(config_path);
      std::optional<std::filesystem::path> truth;
      if (truth_path) {
        truth = *truth_path;
      }
      const assim::AssimilationReport report =
          assim::assimilate_to_dir(config, eta_path, truth, outdir, options);
      std::cout << "status " << report.json.at("status").get<std::string>() << ", cost "
                << report.result.cost << ", mp_residual " << report.result.mp_residual
                << ", iterations " << report.result.iterations << '\n';
      return report.exit_code;
    }
    if (*check) {
      const auto records = assim::run_checks(assim::parse_check_suite(suite), seed);
      for (const auto &r : records) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.suite << '/' << r.name
                  << " value=" << r.value << " tol=" << r.tolerance << '\n';
      }
      const nlohmann::json doc = assim::checks_to_json(records, seed);
      assim::write_json(check_out, doc);
      return assim::all_passed(records) ? 0 : kExitCheckFailed;
    }
    if (*probe) {
      const assim::ExperimentConfig config = assim::load_config(config_path);
      std::optional<std::filesystem::path> eta;
      if (probe_eta) {
        eta = *probe_eta;
      }
      const auto report = assim::run_value_probe(
          config, h,
          solver == "shoot" ? assim::ValueSolver::shoot : assim::ValueSolver::gradient, eta,
          options);
      std::cout << report.json.dump(2) << '\n';
      if (probe_out) {
        assim::write_json(*probe_out, report.json);
      }
      return 0;
    }
  } catch (const assim::NoConvergence &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const assim::BlowUp &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const assim::InvalidParameter &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
