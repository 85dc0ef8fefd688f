#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ogs/instance.hpp"

namespace ogs {

// Hard cap on brute-force enumeration. Exceeding it is an error, never a
// silent approximation.
struct OracleLimit {
  std::int64_t max_enumeration = std::int64_t(1) << 22;
};

class OracleLimitExceeded : public std::runtime_error {
 public:
  explicit OracleLimitExceeded(const char* what) : std::runtime_error(what) {}
};

class InfeasibleInstance : public std::runtime_error {
 public:
  explicit InfeasibleInstance(const char* what) : std::runtime_error(what) {}
};

// A job as seen by a single machine: per-way loads, plus the job's original
// index for positional norms.
struct PackItem {
  int job = 0;
  std::vector<double> way_loads;
};

struct NormPackOpt {
  int count = 0;
  std::vector<std::optional<int>> ways;  // aligned with the input items
};

// Maximum number of items schedulable with ||chosen loads|| <= budget.
// Exact fast paths: LInf counts items with some way within budget; symmetric
// norms take the longest feasible prefix of items sorted by cheapest way
// (ties by job index). Everything else is enumerated.
// nr_dim is the coordinate count of the declaring machine norm (used by
// positional norms); pass 0 to size it from the items themselves.
NormPackOpt opt_norm_pack(const NormSpec& norm, std::span<const PackItem> items,
                          double budget, int nr_dim = 0, OracleLimit lim = {});

// Brute-force variant over an arbitrary load evaluator; used for composite
// (cluster-level) norms where no fast path applies.
NormPackOpt opt_norm_pack_general(
    const std::function<double(std::span<const std::optional<int>>)>& load_of,
    std::span<const PackItem> items, double budget, OracleLimit lim = {});

struct SchedPackResult {
  int count = 0;
  Assignment witness;
};

struct GenSchedResult {
  double cost = 0.0;
  Assignment witness;
};

// Exact offline optima by enumeration.
SchedPackResult opt_sched_pack(const Instance& inst, OracleLimit lim = {});
GenSchedResult opt_gen_sched(const Instance& inst, OracleLimit lim = {});
SchedPackResult opt_budgeted_sched_pack(const BudgetedInstance& inst,
                                        OracleLimit lim = {});

// Hindsight schedule-packing optimum over arrival prefixes. The value is
// nondecreasing and increases by at most one per arrival (asserted).
class PrefixOptTracker {
 public:
  explicit PrefixOptTracker(const Instance& inst, OracleLimit lim = {})
      : inst_(inst), lim_(lim) {}

  int observe();  // consume the next arrival, return OPT of the prefix
  int seen() const { return seen_; }
  int value() const { return last_; }

 private:
  const Instance& inst_;
  OracleLimit lim_;
  int seen_ = 0;
  int last_ = 0;
};

// Set-cover specific exact oracles (2^m set-family enumeration).
double opt_osc_cost(const SetCoverInstance& sc, OracleLimit lim = {});
// Offline budgeted maximum coverage over an element subset (empty subset
// list means all elements).
int opt_obcm(const SetCoverInstance& sc, double budget, OracleLimit lim = {});
int opt_obcm_subset(const SetCoverInstance& sc, double budget,
                    std::span<const int> element_ids, OracleLimit lim = {});

}  // namespace ogs
