#include "ogs/cover_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ogs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamped_log2(int v) {
  return std::max(1.0, std::log2(static_cast<double>(std::max(v, 1))));
}

double rel_slack(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

// Incremental schedule with cheap marginal evaluation, used for the greedy
// leftover placement and for per-run cost accounting.
class RunningSchedule {
 public:
  explicit RunningSchedule(const Instance& inst)
      : inst_(inst), items_(inst.m), loads_(inst.m, 0.0) {}

  double marginal(int job, int i, int k) const {
    const double p = inst_.jobs[job].load(i, k, inst_.r);
    if (p == kInf) return kInf;
    std::vector<double> with = loads_;
    with[i] = machine_load_with(i, job, k, p);
    return inst_.aggregate.eval(with) - inst_.aggregate.eval(loads_);
  }

  void add(int job, Placement p) {
    const double load = inst_.jobs[job].load(p.machine, p.way, inst_.r);
    items_[p.machine].push_back(
        {static_cast<std::size_t>(job) * inst_.r + p.way, load});
    loads_[p.machine] = eval_machine(p.machine);
  }

  double cost() const { return inst_.aggregate.eval(loads_); }

 private:
  double eval_machine(int i) const {
    const int declared = inst_.inner_norms[i].dimension();
    const std::size_t dim =
        declared > 0 ? declared
                     : static_cast<std::size_t>(inst_.n()) * inst_.r;
    std::vector<double> x(dim, 0.0);
    for (const auto& [pos, load] : items_[i]) x[pos] = load;
    return inst_.inner_norms[i].eval(x);
  }

  double machine_load_with(int i, int job, int k, double p) const {
    const int declared = inst_.inner_norms[i].dimension();
    const std::size_t dim =
        declared > 0 ? declared
                     : static_cast<std::size_t>(inst_.n()) * inst_.r;
    std::vector<double> x(dim, 0.0);
    for (const auto& [pos, load] : items_[i]) x[pos] = load;
    x[static_cast<std::size_t>(job) * inst_.r + k] = p;
    return inst_.inner_norms[i].eval(x);
  }

  const Instance& inst_;
  std::vector<std::vector<std::pair<std::size_t, double>>> items_;
  std::vector<double> loads_;
};

}  // namespace

// ---------------------------------------------------------------------------
// PartialScheduler
// ---------------------------------------------------------------------------

PartialScheduler::PartialScheduler(int n_total, double budget, double alpha,
                                   AgentFactory factory,
                                   std::unique_ptr<DrawSource> draws)
    : n_total_(std::max(n_total, 1)),
      budget_(budget),
      factory_(std::move(factory)),
      draws_(std::move(draws)) {
  groups_ = 1 + static_cast<int>(
                    std::ceil(std::log2(static_cast<double>(n_total_))));
  const double ln_term = 10.0 * std::log(2.0 * clamped_log2(n_total_)) + 2.0;
  per_group_ = std::max(1, static_cast<int>(std::ceil(ln_term / alpha)));
}

OnlinePackSolver& PartialScheduler::agent(int index) {
  while (static_cast<int>(agents_.size()) <= index) {
    const int next = static_cast<int>(agents_.size());
    const int group = next / per_group_ + 1;  // groups are 1-based
    const double guess =
        static_cast<double>(n_total_) * std::ldexp(1.0, -group);
    agents_.push_back(
        factory_(guess, budget_, draws_->child(0x41000 + next)));
  }
  return *agents_[index];
}

std::optional<Placement> PartialScheduler::offer(const Job& job) {
  const int total = groups_ * per_group_;
  for (int a = 0; a < total; ++a) {
    if (auto p = agent(a).offer(job)) return p;
  }
  return std::nullopt;
}

double PartialScheduler::max_agent_load() const {
  double mx = 0.0;
  for (const auto& a : agents_) mx = std::max(mx, a->aggregate_load());
  return mx;
}

// ---------------------------------------------------------------------------
// run_gen_sched: doubling + infinite cascade of PartialSchedulers
// ---------------------------------------------------------------------------

CoverRunResult run_gen_sched(const Instance& inst, const AgentFactory& factory,
                             const PrefixCostFn& hindsight_cost,
                             const CascadeConfig& config, DrawSource& draws) {
  CoverRunResult out;
  out.assignment = Assignment(inst.n(), inst.m);
  if (inst.n() == 0) return out;

  const double doubling_factor = std::pow(2.0, config.subadditivity_p);
  double estimate =
      config.fixed_estimate ? *config.fixed_estimate : 0.0;
  int phase = 0;
  std::vector<std::unique_ptr<PartialScheduler>> cascade;
  int tau_phase = 0;

  // Checked against the estimate the cascade's agents were built with.
  auto check_agent_budgets = [&]() {
    if (!config.check_invariants) return;
    for (const auto& ps : cascade) {
      if (ps->max_agent_load() >
          config.agent_budget_factor * estimate + rel_slack(estimate))
        throw std::logic_error("agent exceeded its budget bound");
    }
  };
  auto fresh_cascade = [&]() {
    cascade.clear();
    tau_phase = 0;
  };
  auto cascade_agent = [&](int index) -> PartialScheduler& {
    while (static_cast<int>(cascade.size()) <= index) {
      const int next = static_cast<int>(cascade.size());
      cascade.push_back(std::make_unique<PartialScheduler>(
          inst.n(), estimate, config.alpha, factory,
          draws.child((static_cast<std::uint64_t>(phase) << 32) ^
                      (0x51000 + next))));
    }
    return *cascade[index];
  };
  // Route a job through the cascade; `record` is false when re-feeding
  // history after a restart.
  auto route = [&](int j, bool record) {
    for (int a = 0;; ++a) {
      if (a >= config.max_agents)
        throw std::runtime_error("covering cascade exhausted max_agents");
      auto p = cascade_agent(a).offer(inst.jobs[j]);
      if (p) {
        if (record) {
          out.assignment.place(j, *p);
          tau_phase = std::max(tau_phase, a + 1);
        }
        return;
      }
    }
  };

  for (int j = 0; j < inst.n(); ++j) {
    if (!config.fixed_estimate) {
      const double h = hindsight_cost(j + 1);
      if (j == 0 && phase == 0 && estimate == 0.0) estimate = h;
      if (h > estimate * (1.0 + 1e-12)) {
        check_agent_budgets();
        if (estimate <= 0.0) estimate = h;
        while (h > estimate * (1.0 + 1e-12)) estimate *= doubling_factor;
        ++phase;
        out.tau = std::max(out.tau, tau_phase);
        fresh_cascade();
        for (int seen = 0; seen < j; ++seen) route(seen, /*record=*/false);
      }
      if (config.check_invariants && h > estimate * (1.0 + 1e-9))
        throw std::logic_error("doubling invariant violated");
    }
    route(j, /*record=*/true);
  }

  check_agent_budgets();
  out.tau = std::max(out.tau, tau_phase);
  out.phases = phase + 1;
  out.final_estimate = estimate;
  for (const auto& ps : cascade) out.agents_touched += ps->agents_touched();
  RunningSchedule sched(inst);
  for (int j = 0; j < inst.n(); ++j)
    if (auto p = out.assignment.placement(j)) sched.add(j, *p);
  out.cost = sched.cost();
  return out;
}

// ---------------------------------------------------------------------------
// run_gen_sched_norm: the layered reduction
// ---------------------------------------------------------------------------

namespace {

struct Layer {
  double target = 0.0;  // L_k
  int guess = 1;        // floor(L_k / 2), at least 1
  int checkpoint = 1;
  int last_opt = 0;
  std::vector<int> arrivals;
  std::unique_ptr<OnlinePackSolver> agent;
  int agents_used = 0;
};

}  // namespace

CoverRunResult run_gen_sched_norm(const Instance& inst,
                                  const AgentFactory& factory,
                                  const PrefixCostFn& hindsight_cost,
                                  const SubsetOptFn& layer_opt,
                                  const CascadeConfig& config,
                                  DrawSource& draws) {
  CoverRunResult out;
  out.assignment = Assignment(inst.n(), inst.m);
  if (inst.n() == 0) return out;

  const int n = inst.n();
  const double shrink = 1.0 - config.alpha / 4.0;
  int layer_count = 1;
  while (static_cast<double>(n) * std::pow(shrink, layer_count) > 2.0)
    ++layer_count;
  // Layers 0..layer_count-1; leftovers are placed greedily.

  double estimate = config.fixed_estimate ? *config.fixed_estimate : 0.0;
  int phase = 0;
  std::vector<Layer> layers;
  int leftovers = 0;

  auto fresh_layers = [&]() {
    layers.clear();
    for (int k = 0; k < layer_count; ++k) {
      Layer layer;
      layer.target = static_cast<double>(n) * std::pow(shrink, k);
      layer.guess =
          std::max(1, static_cast<int>(std::floor(layer.target / 2.0)));
      layers.push_back(std::move(layer));
    }
  };
  auto retire_agent = [&](Layer& layer) {
    if (!layer.agent) return;
    const double load = layer.agent->aggregate_load();
    out.agent_cost_sum += load;
    if (config.check_invariants &&
        load > config.agent_budget_factor * estimate + rel_slack(estimate))
      throw std::logic_error("agent exceeded its budget bound");
    layer.agent.reset();
  };
  auto layer_agent = [&](int k) -> OnlinePackSolver& {
    Layer& layer = layers[k];
    if (!layer.agent) {
      layer.agent = factory(
          static_cast<double>(layer.guess), estimate,
          draws.child((static_cast<std::uint64_t>(phase) << 32) ^
                      (0x61000 + k * 4096 + layer.checkpoint)));
      ++layer.agents_used;
      ++out.agents_touched;
    }
    return *layer.agent;
  };

  RunningSchedule sched(inst);

  // Route one arrival through the layers; returns the placement if any layer
  // took it (ignored when re-feeding history after a restart).
  auto route = [&](int j) -> std::optional<Placement> {
    for (int k = 0; k < layer_count; ++k) {
      Layer& layer = layers[k];
      layer.arrivals.push_back(j);
      auto placed = layer_agent(k).offer(inst.jobs[j]);
      // Checkpoint bookkeeping runs after the agent saw the arrival.
      const int opt = layer_opt(layer.arrivals, estimate);
      if (config.check_invariants &&
          (opt < layer.last_opt || opt > layer.last_opt + 1))
        throw std::logic_error("layer optimum skipped a checkpoint");
      layer.last_opt = opt;
      if (opt == layer.checkpoint * layer.guess) {
        ++layer.checkpoint;
        retire_agent(layer);  // next checkpoint gets a fresh agent
      }
      if (placed) return placed;
    }
    return std::nullopt;
  };

  for (int j = 0; j < n; ++j) {
    if (!config.fixed_estimate) {
      const double h = hindsight_cost(j + 1);
      if (j == 0 && phase == 0 && estimate == 0.0) {
        estimate = h;
        fresh_layers();
      }
      if (h > estimate * (1.0 + 1e-12)) {
        if (estimate <= 0.0) estimate = h;
        while (h > estimate * (1.0 + 1e-12))
          estimate *= std::pow(2.0, config.subadditivity_p);
        ++phase;
        for (Layer& layer : layers) retire_agent(layer);
        fresh_layers();
        for (int seen = 0; seen < j; ++seen) route(seen);
      }
      if (config.check_invariants && h > estimate * (1.0 + 1e-9))
        throw std::logic_error("doubling invariant violated");
    } else if (j == 0) {
      fresh_layers();
    }

    auto placed = route(j);
    if (!placed) {
      // Greedy completion: smallest marginal aggregate increase.
      double best = kInf;
      Placement pick{-1, 0};
      for (int i = 0; i < inst.m; ++i)
        for (int k = 0; k < inst.r; ++k) {
          const double delta = sched.marginal(j, i, k);
          if (delta < best) {
            best = delta;
            pick = {i, k};
          }
        }
      if (pick.machine < 0)
        throw InfeasibleInstance("job has no finite placement");
      out.agent_cost_sum += best;
      placed = pick;
      ++leftovers;
    }
    out.assignment.place(j, *placed);
    sched.add(j, *placed);
  }

  for (Layer& layer : layers) {
    if (layer.agent) out.agent_cost_sum += layer.agent->aggregate_load();
  }
  out.phases = phase + 1;
  out.final_estimate = estimate;
  out.cost = sched.cost();
  if (config.measure_residuals) {
    out.layer_residuals.resize(layer_count);
    for (int k = 0; k < layer_count; ++k) {
      // Residual optimum after layer k = packing optimum of the arrivals
      // that reached layer k+1 (none recorded = 0).
      if (k + 1 < layer_count)
        out.layer_residuals[k] =
            layers[k + 1].arrivals.empty()
                ? 0.0
                : layer_opt(layers[k + 1].arrivals, estimate);
      else
        out.layer_residuals[k] = leftovers;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// OBCM agent and run_osc
// ---------------------------------------------------------------------------

namespace {

class ObcmAgent final : public OnlinePackSolver {
 public:
  ObcmAgent(std::vector<double> set_costs, double budget, double guess,
            std::unique_ptr<DrawSource> draws, int granularity)
      : costs_(std::move(set_costs)),
        draws_(std::move(draws)),
        keep_prefix_(draws_->coin(-1, kTagWrapperCoin)),
        engine_(costs_, budget, guess, *draws_, granularity) {}

  std::optional<Placement> offer(const Job& job) override {
    std::vector<int> containing;
    for (int i = 0; i < static_cast<int>(costs_.size()); ++i)
      if (job.loads[i] < kInf) containing.push_back(i);
    const auto d = engine_.observe(seen_++, containing);
    if (!d.covered) return std::nullopt;
    const bool violating = engine_.violator() && *engine_.violator() == d.set;
    const bool keep = violating ? !keep_prefix_ : keep_prefix_;
    if (!keep) return std::nullopt;
    if (!really_active_[d.set]) {
      really_active_[d.set] = true;
      real_cost_ += costs_[d.set];
    }
    ++scheduled_;
    return Placement{d.set, 0};
  }

  double aggregate_load() const override { return real_cost_; }
  int scheduled() const override { return scheduled_; }

 private:
  std::vector<double> costs_;
  std::unique_ptr<DrawSource> draws_;
  bool keep_prefix_;
  ObcmEngine engine_;
  std::vector<bool> really_active_ = std::vector<bool>(costs_.size(), false);
  double real_cost_ = 0.0;
  int scheduled_ = 0;
  int seen_ = 0;
};

}  // namespace

std::unique_ptr<OnlinePackSolver> make_obcm_agent(
    std::vector<double> set_costs, double budget, double guess,
    std::unique_ptr<DrawSource> draws, int granularity) {
  return std::make_unique<ObcmAgent>(std::move(set_costs), budget, guess,
                                     std::move(draws), granularity);
}

OscRunResult run_osc(const SetCoverInstance& sc, DrawSource& draws,
                     const OscConfig& config) {
  if (!sc.feasible())
    throw InfeasibleInstance("set cover element belongs to no set");
  const Instance encoded = osc_to_gensched(sc);

  const double alpha =
      config.alpha > 0.0
          ? std::min(config.alpha, 1.0)
          : std::min(1.0, 1.0 / (17.0 * clamped_log2(sc.m())));

  AgentFactory factory = [&sc, &config](double guess, double budget,
                                        std::unique_ptr<DrawSource> d) {
    return make_obcm_agent(sc.costs, budget, guess, std::move(d),
                           config.granularity);
  };
  PrefixCostFn hindsight = [&sc](int prefix_len) {
    SetCoverInstance prefix{sc.costs,
                            {sc.elements.begin(), sc.elements.begin() + prefix_len}};
    return opt_osc_cost(prefix);
  };
  SubsetOptFn layer_opt = [&sc](std::span<const int> ids, double budget) {
    return opt_obcm_subset(sc, budget, ids);
  };

  CascadeConfig cascade;
  cascade.alpha = alpha;
  cascade.subadditivity_p = 1.0;
  cascade.agent_budget_factor = 1.0;
  cascade.check_invariants = config.check_invariants;
  cascade.measure_residuals = config.measure_residuals;
  cascade.fixed_estimate = config.fixed_estimate;

  // Sum of per-agent costs is accounted through the layered runner's
  // assignment; agents also track their own cost for the per-agent bound.
  CoverRunResult run = run_gen_sched_norm(encoded, factory, hindsight,
                                          layer_opt, cascade, draws);

  OscRunResult out;
  out.cover.assign(sc.m(), 0);
  out.covered_by.assign(sc.n(), -1);
  out.all_covered = true;
  for (int j = 0; j < sc.n(); ++j) {
    const auto& p = run.assignment.placement(j);
    if (!p) {
      out.all_covered = false;
      continue;
    }
    out.covered_by[j] = p->machine;
    out.cover[p->machine] = 1;
  }
  for (int i = 0; i < sc.m(); ++i)
    if (out.cover[i]) out.cover_cost += sc.costs[i];
  out.agent_cost_sum = run.agent_cost_sum;
  out.agents_touched = run.agents_touched;
  out.phases = run.phases;
  out.layer_residuals = run.layer_residuals;
  out.final_estimate = run.final_estimate;
  return out;
}

// ---------------------------------------------------------------------------
// Martingale tail check
// ---------------------------------------------------------------------------

bool martingale_event(std::span<const std::pair<double, double>> run,
                      double beta, double lambda) {
  if (lambda < beta + 1.0)
    throw std::invalid_argument("martingale bound requires lambda >= beta + 1");
  double means = 0.0;
  double outcomes = 0.0;
  for (const auto& [mean, outcome] : run) {
    if (outcome < -1e-12 || outcome > 1.0 + 1e-12 || mean < -1e-12 ||
        mean > 1.0 + 1e-12)
      throw std::invalid_argument("martingale outcomes must lie in [0, 1]");
    means += mean;
    outcomes += outcome;
  }
  return outcomes <= beta && means >= beta + lambda;
}

MartingaleVerdict martingale_tail_check(
    const std::vector<std::vector<std::pair<double, double>>>& runs,
    double beta, double lambda) {
  MartingaleVerdict v;
  v.runs = static_cast<int>(runs.size());
  int hits = 0;
  for (const auto& run : runs)
    if (martingale_event(run, beta, lambda)) ++hits;
  v.empirical = v.runs > 0 ? static_cast<double>(hits) / v.runs : 0.0;
  v.bound = std::exp(-(3.0 / 14.0) * lambda);
  const double p = std::min(std::max(v.bound, 1e-12), 1.0 - 1e-12);
  v.slack = v.runs > 0 ? 3.0 * std::sqrt(p * (1.0 - p) / v.runs) : 0.0;
  v.within = v.empirical <= v.bound + v.slack;
  return v;
}

}  // namespace ogs
