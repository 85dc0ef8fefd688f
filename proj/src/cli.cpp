#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ogs/harness.hpp"
#include "ogs/json_io.hpp"
#include "ogs/oracle.hpp"

#include "json.hpp"

namespace ogs {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAssertion = 2;
constexpr int kExitOracleLimit = 3;

void add_config_flags(CLI::App* cmd, ExperimentConfig* config,
                      std::string* scenario) {
  cmd->add_option("--scenario", *scenario,
                  "set-cover | load-balancing | facility-location | "
                  "nested-norm | custom-file");
  cmd->add_option("--n", config->n, "jobs / elements");
  cmd->add_option("--m", config->m, "machines / sets");
  cmd->add_option("--r", config->r, "ways per machine");
  cmd->add_option("--blocks", config->blocks, "blocks (nested scenario)");
  cmd->add_option("--density", config->density, "set membership probability");
  cmd->add_option("--cost-lo", config->cost_lo);
  cmd->add_option("--cost-hi", config->cost_hi);
  cmd->add_option("--load-lo", config->load_lo);
  cmd->add_option("--load-hi", config->load_hi);
  cmd->add_option("--aggregate", config->aggregate,
                  "l1 | l2 | linf | top2 | sumpow2 | pnormpow2");
  cmd->add_option("--inner", config->inner, "linf | l1 | l2 | top2");
  cmd->add_option("--alpha", config->alpha,
                  "solvability parameter (0 = scenario default)");
  cmd->add_option("--trials", config->trials);
  cmd->add_option("--seed", config->seed);
  cmd->add_option("--oracle-limit", config->oracle_limit);
  cmd->add_option("--assert-level", config->assert_level,
                  "0 = skip per-realization assertions");
  cmd->add_option("--threads", config->threads);
  cmd->add_option("--file", config->custom_file,
                  "instance file (custom-file scenario)");
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("OGS_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 1;
}

void print_summary(const RunReport& report, std::ostream& os) {
  os << "trials=" << report.trials.size()
     << " scheduled mean=" << report.scheduled.mean
     << " cost/opt mean=" << report.cost_ratio.mean
     << " (std " << report.cost_ratio.stddev << ")"
     << " tau mean=" << report.tau.mean << " max=" << report.tau.max
     << " wall=" << report.wall_seconds << "s\n";
  int bad = 0;
  for (const auto& rec : report.trials)
    if (!rec.assertions_ok) ++bad;
  if (bad > 0) os << bad << " trial(s) failed assertions\n";
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Online generalized scheduling testbed"};
  app.require_subcommand(1);

  ExperimentConfig config;
  config.seed = default_seed();
  std::string scenario = "set-cover";
  std::string out_path;

  auto* gen = app.add_subcommand("gen", "generate an instance file");
  add_config_flags(gen, &config, &scenario);
  gen->add_option("--out", out_path, "output path")->required();

  auto* run = app.add_subcommand("run", "run a Monte-Carlo experiment");
  add_config_flags(run, &config, &scenario);
  run->add_option("--out", out_path, "report path prefix (.json/.csv)");

  auto* replay = app.add_subcommand("replay", "re-run one trial by seed");
  add_config_flags(replay, &config, &scenario);
  std::uint64_t replay_seed = 0;
  replay->add_option("--trial-seed", replay_seed, "per-trial seed to replay")
      ->required();

  auto* check = app.add_subcommand("check", "run the property suites");
  int check_cases = 10000;
  std::uint64_t check_seed = default_seed();
  check->add_option("--cases", check_cases);
  check->add_option("--seed", check_seed);

  auto* report_cmd = app.add_subcommand("report", "re-summarize a report");
  std::string report_in;
  report_cmd->add_option("--in", report_in)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    config.scenario = scenario_from_name(scenario);

    if (gen->parsed()) {
      Rng rng(config.seed);
      if (config.scenario == Scenario::kSetCover) {
        const auto sc =
            generate_set_cover(config.n, config.m, config.density,
                               config.cost_lo, config.cost_hi, rng);
        write_file(out_path, set_cover_to_json(sc));
      } else if (config.scenario == Scenario::kFacilityLocation) {
        const auto inst = generate_facility_location(
            config.n, config.m, config.cost_lo, config.cost_hi,
            config.load_lo, config.load_hi, rng);
        write_file(out_path, instance_to_json(inst));
      } else {
        const auto inst = generate_load_balancing(
            config.n, config.m, config.load_lo, config.load_hi,
            NormSpec::linf(), AggregateSpec::norm_agg(NormSpec::lp(1.0)), rng);
        write_file(out_path, instance_to_json(inst));
      }
      std::cout << "wrote " << out_path << "\n";
      return kExitOk;
    }

    if (run->parsed()) {
      const RunReport report = run_experiment(config);
      print_summary(report, std::cout);
      if (!out_path.empty()) {
        write_file(out_path + ".json", report_to_json(report));
        write_file(out_path + ".csv", report_to_csv(report));
        std::cout << "wrote " << out_path << ".json and " << out_path
                  << ".csv\n";
      }
      for (const auto& rec : report.trials)
        if (!rec.assertions_ok) return kExitAssertion;
      return kExitOk;
    }

    if (replay->parsed()) {
      const TrialRecord rec = run_trial(config, replay_seed);
      std::cout << "seed=" << rec.seed << " scheduled=" << rec.scheduled
                << " cost=" << rec.cost << " opt=" << rec.opt
                << " tau=" << rec.tau
                << " assertions_ok=" << (rec.assertions_ok ? 1 : 0) << "\n";
      return rec.assertions_ok ? kExitOk : kExitAssertion;
    }

    if (check->parsed()) {
      const auto result = run_property_suite(check_cases, check_seed);
      std::cout << "property checks: " << result.checked << " checked, "
                << result.failures << " failed\n";
      for (const auto& msg : result.messages) std::cout << "  " << msg << "\n";
      return result.ok() ? kExitOk : kExitAssertion;
    }

    if (report_cmd->parsed()) {
      const auto j = nlohmann::json::parse(read_file(report_in));
      const auto& summary = j.at("summary");
      std::cout << "trials=" << j.at("trials").size()
                << " scheduled mean=" << summary.at("scheduled").at("mean")
                << " cost/opt mean=" << summary.at("cost_ratio").at("mean")
                << " tau mean=" << summary.at("tau").at("mean") << "\n";
      return kExitOk;
    }
  } catch (const AssertionFailure& e) {
    std::cerr << "assertion failure: " << e.what() << "\n";
    return kExitAssertion;
  } catch (const OracleLimitExceeded& e) {
    std::cerr << "oracle limit: " << e.what() << "\n";
    return kExitOracleLimit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ogs
