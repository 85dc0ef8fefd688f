#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ogs/cover_reduction.hpp"
#include "ogs/rng.hpp"

namespace ogs {

// ---------------------------------------------------------------------------
// Instance generators (deterministic under the given rng state).
// ---------------------------------------------------------------------------

// Each element joins each set with probability `density`; elements left
// uncovered get one uniformly random set. Costs uniform in [cost_lo, cost_hi].
SetCoverInstance generate_set_cover(int n, int m, double density,
                                    double cost_lo, double cost_hi, Rng& rng);

// Unrelated machines, r = 1, loads uniform in [load_lo, load_hi].
Instance generate_load_balancing(int n, int m, double load_lo, double load_hi,
                                 NormSpec inner, AggregateSpec aggregate,
                                 Rng& rng);

// Facility location: machine norm = opening cost * max + sum of assignment
// costs; aggregate l1.
Instance generate_facility_location(int n_clients, int m_facilities,
                                    double open_lo, double open_hi,
                                    double dist_lo, double dist_hi, Rng& rng);

// ---------------------------------------------------------------------------
// Experiment runner
// ---------------------------------------------------------------------------

enum class Scenario {
  kSetCover,
  kLoadBalancing,
  kFacilityLocation,
  kNestedNorm,
  kCustomFile,
};

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

struct ExperimentConfig {
  Scenario scenario = Scenario::kSetCover;
  int n = 12;
  int m = 6;
  int r = 1;
  int blocks = 2;  // nested scenario
  double density = 0.4;
  double cost_lo = 1.0, cost_hi = 4.0;
  double load_lo = 0.2, load_hi = 2.0;
  std::string aggregate = "l1";  // l1 | l2 | linf | top2 | sumpow2
  std::string inner = "linf";    // linf | l1 | top2
  double alpha = 0.0;            // 0 = theorem default for the scenario
  int trials = 100;
  std::uint64_t seed = 1;
  std::int64_t oracle_limit = std::int64_t(1) << 22;
  int assert_level = 1;  // 0 = skip per-realization assertions
  int threads = 1;
  std::string custom_file;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  int scheduled = 0;
  double cost = 0.0;
  double opt = 0.0;
  int tau = 0;
  bool assertions_ok = true;
  std::string note;
};

struct StatSummary {
  double mean = 0.0, stddev = 0.0, stderr_mean = 0.0;
  double min = 0.0, max = 0.0;
};

StatSummary summarize(const std::vector<double>& values);

struct RunReport {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;
  StatSummary scheduled;
  StatSummary cost_ratio;  // cost / opt over trials with opt > 0
  StatSummary tau;
  double wall_seconds = 0.0;  // metadata; excluded from the canonical bytes
};

class AssertionFailure : public std::runtime_error {
 public:
  AssertionFailure(std::uint64_t trial_seed, const std::string& what)
      : std::runtime_error(what + " (replay seed " +
                           std::to_string(trial_seed) + ")"),
        trial_seed(trial_seed) {}
  std::uint64_t trial_seed;
};

std::uint64_t trial_seed_of(std::uint64_t master_seed, int trial);
TrialRecord run_trial(const ExperimentConfig& config, std::uint64_t trial_seed);
RunReport run_experiment(const ExperimentConfig& config);

// Canonical bytes: config + trials + summary (no wall time).
std::string report_to_json(const RunReport& report, bool include_meta = true);
std::string report_to_csv(const RunReport& report);

// ---------------------------------------------------------------------------
// Norm/aggregate property suite (also behind the `check` CLI subcommand).
// ---------------------------------------------------------------------------

struct PropertySuiteResult {
  int checked = 0;
  int failures = 0;
  std::vector<std::string> messages;
  bool ok() const { return failures == 0; }
};

PropertySuiteResult run_property_suite(int cases_per_property,
                                       std::uint64_t seed);

int cli_main(int argc, char** argv);

}  // namespace ogs
