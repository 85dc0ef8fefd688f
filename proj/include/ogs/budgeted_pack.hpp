#pragma once

#include <optional>
#include <vector>

#include "ogs/draws.hpp"
#include "ogs/inner_solvers.hpp"
#include "ogs/instance.hpp"
#include "ogs/oracle.hpp"

namespace ogs {

struct TraceEvent {
  enum Kind { kOffer, kActivate, kAccept, kReject, kGuardStop };
  Kind kind;
  int machine;
  int job;

  bool operator==(const TraceEvent&) const = default;
};

// Threshold-crossing comparisons use this relative tolerance.
inline constexpr double kEngineTol = 1e-12;

// ---------------------------------------------------------------------------
// Budgeted coverage maximization (set-cover shaped packing).
//
// Every set draws a random activation threshold up front. An uncovered
// arriving element is offered to the inactive sets containing it in index
// order; a set activates once its offer count crosses its threshold,
// provided the running cost has not already exceeded the budget. One
// overshoot activation is possible; the wrapper resolves it.
// ---------------------------------------------------------------------------
class ObcmEngine {
 public:
  // Sets with cost above the budget never participate.
  ObcmEngine(std::vector<double> set_costs, double budget, double opt_guess,
             DrawSource& draws, int granularity = 0, bool record_trace = false);

  struct Decision {
    bool covered = false;
    int set = -1;
    bool activated_now = false;
  };
  // containing = indices of sets containing the arriving element.
  Decision observe(int element_id, std::span<const int> containing);

  int m() const { return static_cast<int>(costs_.size()); }
  const std::vector<int>& active_order() const { return active_order_; }
  bool active(int i) const { return active_[i] != 0; }
  const std::vector<std::vector<int>>& covered_by() const { return covered_; }
  const std::vector<std::vector<int>>& offered() const { return offered_; }
  double active_cost() const { return active_cost_; }
  int covered_count() const { return covered_count_; }
  std::optional<int> violator() const { return violator_; }
  double threshold(int i) const { return thresholds_[i]; }
  double threshold_multiplier(int i) const { return tau_bar_[i]; }
  const std::vector<TraceEvent>& trace() const { return trace_; }

 private:
  std::vector<double> costs_;
  double budget_;
  std::vector<double> tau_bar_;
  std::vector<double> thresholds_;
  std::vector<std::uint8_t> eligible_;
  std::vector<std::uint8_t> active_;
  std::vector<int> active_order_;
  std::vector<std::vector<int>> covered_;
  std::vector<std::vector<int>> offered_;
  double active_cost_ = 0.0;
  int covered_count_ = 0;
  std::optional<int> violator_;
  bool record_trace_;
  std::vector<TraceEvent> trace_;
};

struct ObcmResult {
  std::vector<std::uint8_t> active;
  std::vector<int> active_order;
  std::vector<std::vector<int>> covered_by;
  std::vector<std::vector<int>> offered;
  double active_cost = 0.0;
  int covered_count = 0;
  std::optional<int> violator;
  std::vector<TraceEvent> trace;
};

ObcmResult run_obcm(const SetCoverInstance& sc, double budget, double opt_guess,
                    DrawSource& draws, int granularity = 0,
                    bool record_trace = false);

// ---------------------------------------------------------------------------
// Budgeted schedule packing with random activation thresholds.
//
// Covers both the p-bounded variant (dyadic guesses, stretch factor s) and
// the weighted-l1 variant (two-part guess distribution); with s = p = 1 and
// a weighted-l1 aggregate the two runs are trace-identical under coupled
// draws.
//
// Jobs are indexed by engine-local arrival order, so positional inner norms
// (explicit per-coordinate weights) are only meaningful when the engine sees
// the instance's full stream.
// ---------------------------------------------------------------------------
enum class ActivationTest { kNormPackOpt, kOfferCount };
enum class GuessMode { kDyadic, kWeightedL1TwoPart };

struct EngineParams {
  double opt_guess = 0.0;  // exact optimum or a lower bound on it
  double s = 1.0;          // aggregate budget stretch; guard is f(y) < s^p B
  double p = 1.0;          // subadditivity degree of the aggregate
  GuessMode guess_mode = GuessMode::kDyadic;
  ActivationTest test = ActivationTest::kNormPackOpt;
  int granularity = 0;  // threshold granularity K; 0 = ceil(3 log2 m)
  bool record_trace = false;
  OracleLimit oracle_limit;
  // Override for the activation-test optimum; machines whose norm is not a
  // plain NormSpec (cluster machines in nested compositions) need one.
  std::function<int(int machine, std::span<const PackItem> offered,
                    double budget)>
      activation_opt;
};

struct MachineState {
  bool eligible = true;
  bool active = false;
  int activation_index = -1;
  double threshold_multiplier = 0.0;
  double frozen_marginal = 0.0;  // marginal at activation time
  double guess = 0.0;
  std::vector<PackItem> offered_pre;  // offers before activation
  std::vector<int> offered_post;      // jobs offered after activation
  std::vector<int> accepted;
};

class BudgetedPackEngine {
 public:
  // The instance supplies the shape (machines, norms, budgets, aggregate);
  // its job list is ignored — jobs stream through observe().
  BudgetedPackEngine(const BudgetedInstance& inst, EngineParams params,
                     InnerFactory factory, DrawSource& draws);

  std::optional<Placement> observe(const Job& job);

  const MachineState& machine(int i) const { return machines_[i]; }
  const std::vector<int>& active_order() const { return active_order_; }
  double aggregate_value() const { return aggregate_value_; }
  std::optional<int> violator() const { return violator_; }
  const std::vector<std::optional<Placement>>& placements() const {
    return placements_;
  }
  int scheduled() const { return scheduled_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }
  double guard_budget() const { return guard_budget_; }
  int jobs_seen() const { return job_index_; }
  // O_i together with the jobs offered after activation.
  std::vector<PackItem> total_offered(int i) const;
  const InnerSolver* solver(int i) const { return solvers_[i].get(); }

 private:
  Offer make_offer(const Job& job, int i, int local_id) const;
  PackItem make_item(const Job& job, int i, int local_id) const;
  double marginal_of(int i);
  double current_threshold(int i, double marginal) const;
  bool crosses_threshold(int i, double marginal) const;
  double draw_guess(int i, double frozen_marginal);

  const BudgetedInstance& inst_;
  EngineParams params_;
  InnerFactory factory_;
  DrawSource& draws_;
  std::vector<MachineState> machines_;
  std::vector<std::unique_ptr<InnerSolver>> solvers_;
  std::vector<int> active_order_;
  std::vector<double> masked_budgets_;
  double aggregate_value_ = 0.0;
  double guard_budget_ = 0.0;
  std::optional<int> violator_;
  std::vector<std::optional<Placement>> placements_;
  std::vector<Job> seen_jobs_;
  int scheduled_ = 0;
  int job_index_ = 0;
  int guess_count_ = 2;
  double log2m_ = 1.0;
  std::vector<TraceEvent> trace_;
};

struct BudgetedRunResult {
  Assignment assignment;
  int scheduled = 0;
  std::vector<MachineState> machines;
  std::vector<int> active_order;
  double aggregate_value = 0.0;
  std::optional<int> violator;
  std::vector<TraceEvent> trace;
};

// Batch drivers over the instance's own job list.
BudgetedRunResult run_budgeted_pbounded(const BudgetedInstance& inst, double s,
                                        double opt_guess, DrawSource& draws,
                                        EngineParams params = {});
// Weighted-l1 outer norm: the instance aggregate must evaluate to
// sum_i a_i y_i on masked budget vectors (a_i = activation weight of i).
BudgetedRunResult run_budgeted_wl1(const BudgetedInstance& inst,
                                   double opt_guess, DrawSource& draws,
                                   EngineParams params = {});

// ---------------------------------------------------------------------------
// Probability-1/2 budget wrapper. The engine may exceed the declared budget
// with its final activation; the wrapper restores strict feasibility by
// keeping either the machines activated before the violation or only the
// violating machine. With no violation the full assignment is kept.
// ---------------------------------------------------------------------------
struct WrapperOutcome {
  bool violated = false;
  bool keep_prefix = true;  // meaningful only when violated
};

Assignment budget_wrapper(const Assignment& full,
                          std::span<const int> active_order,
                          std::optional<int> violator, DrawSource& draws,
                          WrapperOutcome* outcome = nullptr);

ObcmResult budget_wrapper_obcm(const ObcmResult& run,
                               std::span<const double> set_costs,
                               DrawSource& draws,
                               WrapperOutcome* outcome = nullptr);

}  // namespace ogs
