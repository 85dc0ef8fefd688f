#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "ogs/pack_reductions.hpp"

namespace ogs {

// Packing agent used by the covering cascades: given a lower-bound guess and
// an aggregate budget, returns a fresh streaming solver.
using AgentFactory = std::function<std::unique_ptr<OnlinePackSolver>(
    double guess, double budget, std::unique_ptr<DrawSource> draws)>;

// Hindsight generalized-scheduling optimum cost of the first `prefix_len`
// arrivals: drives guess-and-double.
using PrefixCostFn = std::function<double(int prefix_len)>;
// Hindsight schedule-packing optimum (count) of a job subset at a given
// aggregate budget; drives the layer checkpoints.
using SubsetOptFn =
    std::function<int(std::span<const int> job_ids, double budget)>;

struct CascadeConfig {
  double alpha = 0.5;            // solvability parameter fed to the reduction
  double subadditivity_p = 1.0;  // doubling multiplies the estimate by 2^p
  // Post-wrapper factor by which one agent may exceed its budget; asserted
  // per agent when check_invariants is on.
  double agent_budget_factor = 1.0;
  // Hard stop for the lazily grown cascade: hitting it is an error, never a
  // silent partial run.
  int max_agents = 4096;
  bool check_invariants = true;
  bool measure_residuals = false;  // layered runner: per-layer residual OPT
  std::optional<double> fixed_estimate;  // skip doubling, use this budget
};

// Group cascade: (1 + ceil(log2 n)) groups of N agents, group g using the
// optimum lower bound n / 2^g. A job is offered to agents in order until one
// schedules it. Agents are created lazily.
class PartialScheduler {
 public:
  PartialScheduler(int n_total, double budget, double alpha,
                   AgentFactory factory, std::unique_ptr<DrawSource> draws);

  std::optional<Placement> offer(const Job& job);

  int agents_touched() const { return static_cast<int>(agents_.size()); }
  int groups() const { return groups_; }
  int agents_per_group() const { return per_group_; }
  double max_agent_load() const;

 private:
  OnlinePackSolver& agent(int index);

  int n_total_;
  double budget_;
  AgentFactory factory_;
  std::unique_ptr<DrawSource> draws_;
  int groups_;
  int per_group_;
  std::vector<std::unique_ptr<OnlinePackSolver>> agents_;
};

struct CoverRunResult {
  Assignment assignment;
  double cost = 0.0;            // aggregate cost of the final schedule
  double agent_cost_sum = 0.0;  // sum of per-agent realized loads
  int tau = 0;                  // cascaded full-scheduler agents used
  int phases = 1;
  int agents_touched = 0;  // packing agents instantiated overall
  std::vector<double> layer_residuals;  // layered runner only
  double final_estimate = 0.0;
};

// Guess-and-double plus a lazily grown sequence of PartialScheduler agents;
// every job is placed at its arrival with probability one.
CoverRunResult run_gen_sched(const Instance& inst, const AgentFactory& factory,
                             const PrefixCostFn& hindsight_cost,
                             const CascadeConfig& config, DrawSource& draws);

// Layered reduction for 1-subadditive aggregates: layer k targets residual
// bound L_k = n (1 - alpha/4)^k and splits its stream into checkpoint
// subinstances whenever the layer's hindsight packing optimum reaches a
// multiple of floor(L_k / 2); leftovers after the last layer are placed
// greedily at the smallest marginal aggregate increase.
CoverRunResult run_gen_sched_norm(const Instance& inst,
                                  const AgentFactory& factory,
                                  const PrefixCostFn& hindsight_cost,
                                  const SubsetOptFn& layer_opt,
                                  const CascadeConfig& config,
                                  DrawSource& draws);

struct OscRunResult {
  std::vector<std::uint8_t> cover;  // union of sets bought by any agent
  std::vector<int> covered_by;      // per element, the set that covered it
  double cover_cost = 0.0;          // cost of the union
  double agent_cost_sum = 0.0;      // analysis bound: sum of agent costs
  bool all_covered = false;
  int agents_touched = 0;
  int phases = 1;
  std::vector<double> layer_residuals;
  double final_estimate = 0.0;
};

struct OscConfig {
  double alpha = 0.0;  // 0 = 1 / (17 log2 m)
  int granularity = 0;
  bool check_invariants = true;
  bool measure_residuals = false;
  std::optional<double> fixed_estimate;
};

// Online set cover via the layered reduction with wrapped coverage agents.
OscRunResult run_osc(const SetCoverInstance& sc, DrawSource& draws,
                     const OscConfig& config = {});

// Coverage-maximization agent over set-cover shaped jobs (finite loads mark
// the containing sets), with the online budget wrapper applied.
std::unique_ptr<OnlinePackSolver> make_obcm_agent(
    std::vector<double> set_costs, double budget, double guess,
    std::unique_ptr<DrawSource> draws, int granularity = 0);

// ---------------------------------------------------------------------------
// Martingale tail bound check (test utility). A run is a sequence of
// (conditional mean, outcome) pairs with outcomes in [0, 1]; the event is
// {sum outcomes <= beta and sum conditional means >= beta + lambda}, whose
// probability is at most exp(-(3/14) lambda) for lambda >= beta + 1.
// ---------------------------------------------------------------------------
bool martingale_event(std::span<const std::pair<double, double>> run,
                      double beta, double lambda);

struct MartingaleVerdict {
  double empirical = 0.0;
  double bound = 0.0;       // exp(-(3/14) lambda)
  double slack = 0.0;       // three binomial standard errors
  int runs = 0;
  bool within = false;
};

MartingaleVerdict martingale_tail_check(
    const std::vector<std::vector<std::pair<double, double>>>& runs,
    double beta, double lambda);

}  // namespace ogs
