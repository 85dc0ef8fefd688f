#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ogs/norms.hpp"

namespace ogs {

// One arriving job: load of scheduling it on machine i in way k is
// loads[i * r + k]; +inf marks an unusable (machine, way).
struct Job {
  std::vector<double> loads;

  double load(int machine, int way, int r) const {
    return loads[static_cast<std::size_t>(machine) * r + way];
  }
};

struct Instance {
  int m = 0;
  int r = 1;
  std::vector<NormSpec> inner_norms;  // one per machine, over n*r coordinates
  AggregateSpec aggregate;
  double budget = 0.0;
  std::vector<Job> jobs;  // arrival order is the adversarial order

  int n() const { return static_cast<int>(jobs.size()); }
};

struct Placement {
  int machine = -1;
  int way = 0;

  bool operator==(const Placement&) const = default;
};

// Partial schedule plus machine activations. Each job is placed at most
// once; placing a job activates its machine.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(int n_jobs, int m)
      : placements_(n_jobs), active_(m, 0) {}

  void place(int job, Placement p);  // throws on re-placement
  void set_active(int machine) { active_.at(machine) = 1; }

  const std::optional<Placement>& placement(int job) const {
    return placements_.at(job);
  }
  bool active(int machine) const { return active_.at(machine) != 0; }
  std::span<const std::uint8_t> activations() const { return active_; }
  int placed_count() const;
  int size() const { return static_cast<int>(placements_.size()); }

 private:
  std::vector<std::optional<Placement>> placements_;
  std::vector<std::uint8_t> active_;
};

struct SetCoverInstance {
  std::vector<double> costs;              // per set, > 0
  std::vector<std::vector<int>> elements; // arrival order; sets containing it

  int m() const { return static_cast<int>(costs.size()); }
  int n() const { return static_cast<int>(elements.size()); }
  // Every element must belong to at least one set.
  bool feasible() const;
};

// Exact per-machine load: inner norm of the placed (job, way) loads.
double machine_load(const Instance& inst, const Assignment& a, int i);
double assignment_cost(const Instance& inst, const Assignment& a);

// Set cover as generalized scheduling: machine per set, p_ij = c_i for
// members and +inf otherwise, LInf inner norms, unit-weight l1 aggregate.
Instance osc_to_gensched(const SetCoverInstance& sc);

// Arrival-order iteration with an irrevocable commit per job. The next job
// is not visible until the current one has been decided.
class JobStream {
 public:
  explicit JobStream(const Instance& inst) : inst_(inst), a_(inst.n(), inst.m) {}

  bool done() const { return pos_ >= inst_.n(); }
  int current_index() const;
  const Job& current() const;
  void commit(std::optional<Placement> p);  // advances to the next job
  const Assignment& assignment() const { return a_; }

 private:
  const Instance& inst_;
  Assignment a_;
  int pos_ = 0;
};

// Aggregate evaluated on a machine-budget-shaped vector. Wraps either a
// plain AggregateSpec or the copies construction (base aggregate applied to
// per-original sums).
class AggregateFn {
 public:
  virtual ~AggregateFn() = default;
  virtual double eval(std::span<const double> z) const = 0;
  virtual double subadditivity_p() const = 0;
};

class SpecAggregate final : public AggregateFn {
 public:
  explicit SpecAggregate(AggregateSpec spec) : spec_(std::move(spec)) {}
  double eval(std::span<const double> z) const override { return spec_.eval(z); }
  double subadditivity_p() const override { return spec_.subadditivity_p(); }
  const AggregateSpec& spec() const { return spec_; }

 private:
  AggregateSpec spec_;
};

class GroupedAggregate final : public AggregateFn {
 public:
  GroupedAggregate(AggregateSpec base, std::vector<int> group_of, int groups)
      : base_(std::move(base)), group_of_(std::move(group_of)), groups_(groups) {}
  double eval(std::span<const double> z) const override;
  double subadditivity_p() const override { return base_.subadditivity_p(); }

 private:
  AggregateSpec base_;
  std::vector<int> group_of_;
  int groups_;
};

// Schedule packing with per-machine activation budgets: activating machine i
// charges b_i in full toward f, and machine i's own load must stay within
// b_i (up to the inner solver's violation factor).
struct BudgetedInstance {
  int m = 0;
  int r = 1;
  std::vector<NormSpec> inner_norms;
  std::vector<double> machine_budgets;
  std::shared_ptr<const AggregateFn> aggregate;
  double budget = 0.0;
  std::vector<Job> jobs;

  int n() const { return static_cast<int>(jobs.size()); }
  double activation_cost(std::span<const std::uint8_t> y) const;
};

BudgetedInstance make_budgeted(const Instance& inst,
                               std::vector<double> machine_budgets);

}  // namespace ogs
