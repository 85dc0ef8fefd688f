#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ogs/budgeted_pack.hpp"

namespace ogs {

// Streaming schedule-packing solver: jobs arrive one at a time and every
// placement is irrevocable. Placements are reported in the solver's own
// machine space; aggregate_load() is the aggregate of the loads actually
// kept (after any internal budget wrapper).
class OnlinePackSolver {
 public:
  virtual ~OnlinePackSolver() = default;
  virtual std::optional<Placement> offer(const Job& job) = 0;
  virtual double aggregate_load() const = 0;
  virtual int scheduled() const = 0;
};

// A schedule-packing problem minus its jobs.
struct PackShape {
  int m = 0;
  int r = 1;
  std::vector<NormSpec> inner_norms;
  AggregateSpec aggregate;
  double budget = 0.0;
};

PackShape shape_of(const Instance& inst);

struct SolverConfig {
  OracleLimit oracle_limit;
  bool record_trace = false;
  // Machines with an unbounded budget cap are clamped here (with a warning
  // recorded on the plan).
  double cap_ceiling = 1e30;
};

// Geometric machine-copy construction: each machine is split into
// max(1, ceil(log2 m)) copies with halving activation budgets
// b_i^max / 2^l, and the aggregate applies to per-original sums of copy
// budgets. The budgeted instance gets aggregate budget 3^p B.
struct CopyPlan {
  int machines = 0;  // originals
  int copies = 1;    // per original
  std::vector<int> original_of;   // copy index -> original machine
  std::vector<double> budgets;    // copy index -> activation budget
  bool clamped = false;           // some unit cap hit the ceiling

  int total() const { return machines * copies; }
  int copy_index(int original, int level) const {
    return original * copies + level;
  }
};

CopyPlan make_copy_plan(const AggregateSpec& aggregate, int m, double budget,
                        double cap_ceiling);

// Batch form producing a full budgeted instance (jobs replicated per copy).
struct CopiesInstance {
  BudgetedInstance instance;
  CopyPlan plan;
};
CopiesInstance reduce_to_copies(const Instance& inst, double p,
                                double cap_ceiling = 1e30);

Job expand_job_to_copies(const Job& job, const CopyPlan& plan, int r);

// Merge copy placements back onto original machines; counts are preserved
// because each job is placed at most once.
Assignment map_back(const Assignment& on_copies, const CopyPlan& plan, int n,
                    int r);

// Streaming solver for a shape, dispatched on the aggregate family:
// SumPowers/PNormPower -> copies + dyadic-guess engine; weighted l1 / l1 ->
// copies + weighted-l1 engine; Lp -> power reformulation; TopK -> big-copy
// weights; LInf/OrderedSym (symmetric) -> uniform machine budget; Nested ->
// recursive cluster composition. `guess` is a lower bound on the packing
// optimum.
std::unique_ptr<OnlinePackSolver> make_sched_pack_solver(
    const PackShape& shape, double guess, std::unique_ptr<DrawSource> draws,
    SolverConfig config = {});

// Worst-case factor by which the returned solver may exceed the shape's
// aggregate budget (post-wrapper), e.g. (3pc)^p for the p-bounded path.
double solver_budget_factor(const PackShape& shape);
// Guarantee parameters of the dispatched solver chain.
SolverGuarantee solver_guarantee(const PackShape& shape);

struct PackRunResult {
  Assignment assignment;
  int scheduled = 0;
  double aggregate_load = 0.0;  // on the original instance's aggregate
};

PackRunResult solve_sched_pack(const Instance& inst, double guess,
                               std::unique_ptr<DrawSource> draws,
                               SolverConfig config = {});
// Family-checked entry points.
PackRunResult solve_sched_pack_pbounded(const Instance& inst, double guess,
                                        std::unique_ptr<DrawSource> draws,
                                        SolverConfig config = {});
PackRunResult solve_sched_pack_symmetric(const Instance& inst, double guess,
                                         std::unique_ptr<DrawSource> draws,
                                         SolverConfig config = {});
PackRunResult solve_sched_pack_lp(const Instance& inst, double guess,
                                  std::unique_ptr<DrawSource> draws,
                                  SolverConfig config = {});
PackRunResult solve_sched_pack_topk(const Instance& inst, double guess,
                                    std::unique_ptr<DrawSource> draws,
                                    SolverConfig config = {});
PackRunResult solve_sched_pack_nested(const Instance& inst, double guess,
                                      std::unique_ptr<DrawSource> draws,
                                      SolverConfig config = {});

// Uniform-budget reduction pieces for symmetric aggregates, exposed for
// testing: the per-machine budget candidates B~ / 2^l and the activation
// count kappa = max{k : ||(b,...,b,0,...)|| <= 2B}.
std::vector<double> symmetric_budget_candidates(const NormSpec& norm, int m,
                                                double budget);
int symmetric_activation_cap(const NormSpec& norm, int m, double bar_b,
                             double budget);

// Exposed internals of the engine-backed solver, for trace and coupling
// tests.
class EnginePackSolver;
const BudgetedPackEngine* solver_engine(const OnlinePackSolver& solver);

}  // namespace ogs
