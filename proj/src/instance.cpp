#include "ogs/instance.hpp"

#include <limits>
#include <stdexcept>

namespace ogs {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void Assignment::place(int job, Placement p) {
  auto& slot = placements_.at(job);
  if (slot.has_value())
    throw std::logic_error("assignment: job already placed irrevocably");
  if (p.machine < 0 || p.machine >= static_cast<int>(active_.size()))
    throw std::invalid_argument("assignment: machine out of range");
  slot = p;
  active_[p.machine] = 1;
}

int Assignment::placed_count() const {
  int c = 0;
  for (const auto& p : placements_)
    if (p.has_value()) ++c;
  return c;
}

bool SetCoverInstance::feasible() const {
  for (const auto& sets : elements)
    if (sets.empty()) return false;
  return true;
}

double machine_load(const Instance& inst, const Assignment& a, int i) {
  std::vector<double> x(static_cast<std::size_t>(inst.n()) * inst.r, 0.0);
  for (int j = 0; j < inst.n(); ++j) {
    const auto& p = a.placement(j);
    if (p && p->machine == i)
      x[static_cast<std::size_t>(j) * inst.r + p->way] =
          inst.jobs[j].load(i, p->way, inst.r);
  }
  return inst.inner_norms[i].eval(x);
}

double assignment_cost(const Instance& inst, const Assignment& a) {
  std::vector<double> loads(inst.m);
  for (int i = 0; i < inst.m; ++i) loads[i] = machine_load(inst, a, i);
  return inst.aggregate.eval(loads);
}

Instance osc_to_gensched(const SetCoverInstance& sc) {
  Instance inst;
  inst.m = sc.m();
  inst.r = 1;
  inst.inner_norms.assign(sc.m(), NormSpec::linf());
  inst.aggregate = AggregateSpec::norm_agg(
      NormSpec::weighted_l1(std::vector<double>(sc.m(), 1.0)));
  inst.jobs.reserve(sc.n());
  for (const auto& sets : sc.elements) {
    Job job;
    job.loads.assign(sc.m(), kInf);
    for (int i : sets) job.loads.at(i) = sc.costs.at(i);
    inst.jobs.push_back(std::move(job));
  }
  return inst;
}

int JobStream::current_index() const {
  if (done()) throw std::logic_error("job stream exhausted");
  return pos_;
}

const Job& JobStream::current() const { return inst_.jobs.at(current_index()); }

void JobStream::commit(std::optional<Placement> p) {
  if (done()) throw std::logic_error("job stream exhausted");
  if (p) a_.place(pos_, *p);
  ++pos_;
}

double GroupedAggregate::eval(std::span<const double> z) const {
  if (z.size() != group_of_.size())
    throw std::invalid_argument("grouped aggregate: dimension mismatch");
  std::vector<double> sums(groups_, 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) sums[group_of_[i]] += z[i];
  return base_.eval(sums);
}

double BudgetedInstance::activation_cost(std::span<const std::uint8_t> y) const {
  std::vector<double> z(m, 0.0);
  for (int i = 0; i < m; ++i) z[i] = y[i] ? machine_budgets[i] : 0.0;
  return aggregate->eval(z);
}

BudgetedInstance make_budgeted(const Instance& inst,
                               std::vector<double> machine_budgets) {
  if (static_cast<int>(machine_budgets.size()) != inst.m)
    throw std::invalid_argument("make_budgeted: budget count != m");
  BudgetedInstance b;
  b.m = inst.m;
  b.r = inst.r;
  b.inner_norms = inst.inner_norms;
  b.machine_budgets = std::move(machine_budgets);
  b.aggregate = std::make_shared<SpecAggregate>(inst.aggregate);
  b.budget = inst.budget;
  b.jobs = inst.jobs;
  return b;
}

}  // namespace ogs
