#include "ogs/pack_reductions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ogs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamped_log2(int m) {
  return std::max(1.0, std::log2(static_cast<double>(std::max(m, 1))));
}

using OriginalInnerFactory = std::function<std::unique_ptr<InnerSolver>(
    int original_machine, int copy_index, double budget, double guess)>;
using OriginalActivationOpt =
    std::function<int(int original_machine, std::span<const PackItem>, double)>;

class InertSolver final : public OnlinePackSolver {
 public:
  std::optional<Placement> offer(const Job&) override { return std::nullopt; }
  double aggregate_load() const override { return 0.0; }
  int scheduled() const override { return 0; }
};

}  // namespace

PackShape shape_of(const Instance& inst) {
  return PackShape{inst.m, inst.r, inst.inner_norms, inst.aggregate,
                   inst.budget};
}

CopyPlan make_copy_plan(const AggregateSpec& aggregate, int m, double budget,
                        double cap_ceiling) {
  CopyPlan plan;
  plan.machines = m;
  // Levels 0..ceil(log2 m): the level-0 copy carries the full cap so any
  // feasible single-machine load has a hosting copy, and the smallest copy
  // is at most cap / m.
  plan.copies =
      std::max(1, static_cast<int>(
                      std::ceil(std::log2(static_cast<double>(m))))) +
      1;
  plan.original_of.resize(static_cast<std::size_t>(m) * plan.copies);
  plan.budgets.resize(plan.original_of.size());
  for (int i = 0; i < m; ++i) {
    double cap = unit_cap(aggregate, i, budget);
    if (cap > cap_ceiling) {
      cap = cap_ceiling;
      plan.clamped = true;
    }
    for (int l = 0; l < plan.copies; ++l) {
      const int t = plan.copy_index(i, l);
      plan.original_of[t] = i;
      plan.budgets[t] = cap * std::ldexp(1.0, -l);
    }
  }
  return plan;
}

Job expand_job_to_copies(const Job& job, const CopyPlan& plan, int r) {
  Job out;
  out.loads.resize(static_cast<std::size_t>(plan.total()) * r);
  for (int t = 0; t < plan.total(); ++t)
    for (int k = 0; k < r; ++k)
      out.loads[static_cast<std::size_t>(t) * r + k] =
          job.load(plan.original_of[t], k, r);
  return out;
}

Assignment map_back(const Assignment& on_copies, const CopyPlan& plan, int n,
                    int r) {
  (void)r;
  Assignment out(n, plan.machines);
  for (int j = 0; j < n; ++j) {
    const auto& p = on_copies.placement(j);
    if (p) out.place(j, Placement{plan.original_of[p->machine], p->way});
  }
  return out;
}

CopiesInstance reduce_to_copies(const Instance& inst, double p,
                                double cap_ceiling) {
  CopiesInstance out;
  out.plan = make_copy_plan(inst.aggregate, inst.m, inst.budget, cap_ceiling);
  BudgetedInstance& bi = out.instance;
  bi.m = out.plan.total();
  bi.r = inst.r;
  bi.inner_norms.reserve(bi.m);
  for (int t = 0; t < bi.m; ++t)
    bi.inner_norms.push_back(inst.inner_norms[out.plan.original_of[t]]);
  bi.machine_budgets = out.plan.budgets;
  bi.aggregate = std::make_shared<GroupedAggregate>(
      inst.aggregate, out.plan.original_of, inst.m);
  bi.budget = std::pow(3.0, p) * inst.budget;
  bi.jobs.reserve(inst.n());
  for (const Job& job : inst.jobs)
    bi.jobs.push_back(expand_job_to_copies(job, out.plan, inst.r));
  return out;
}

// ---------------------------------------------------------------------------
// Engine-backed streaming solver with the online budget wrapper: the coin is
// flipped up front; under "keep prefix" placements on the budget-violating
// machine are declined, under "keep last" only they are kept.
// ---------------------------------------------------------------------------
class EnginePackSolver final : public OnlinePackSolver {
 public:
  EnginePackSolver(PackShape original, BudgetedInstance budgeted, CopyPlan plan,
                   EngineParams params, OriginalInnerFactory factory,
                   std::unique_ptr<DrawSource> draws, bool account_leaf_loads)
      : original_(std::move(original)),
        budgeted_(std::make_unique<BudgetedInstance>(std::move(budgeted))),
        plan_(std::move(plan)),
        draws_(std::move(draws)),
        keep_prefix_(draws_->coin(-1, kTagWrapperCoin)),
        account_(account_leaf_loads),
        machine_loads_(original_.m) {
    InnerFactory engine_factory;
    if (factory) {
      engine_factory = [this, factory = std::move(factory)](
                           int copy, double budget, double guess) {
        return factory(plan_.original_of[copy], copy, budget, guess);
      };
    } else {
      engine_factory = [this](int copy, double budget, double guess) {
        return make_inner_solver(budgeted_->inner_norms[copy], budget, guess);
      };
    }
    engine_ = std::make_unique<BudgetedPackEngine>(
        *budgeted_, std::move(params), std::move(engine_factory), *draws_);
  }

  std::optional<Placement> offer(const Job& job) override {
    const int local = jobs_++;
    const Job expanded = expand_job_to_copies(job, plan_, original_.r);
    const auto sim = engine_->observe(expanded);
    if (!sim) return std::nullopt;
    const bool violating =
        engine_->violator() && *engine_->violator() == sim->machine;
    const bool keep = violating ? !keep_prefix_ : keep_prefix_;
    if (!keep) return std::nullopt;
    const int machine = plan_.original_of[sim->machine];
    if (account_)
      machine_loads_[machine].push_back(
          {static_cast<std::size_t>(local) * original_.r + sim->way,
           job.load(machine, sim->way, original_.r)});
    ++scheduled_;
    return Placement{machine, sim->way};
  }

  double aggregate_load() const override {
    if (!account_)
      throw std::logic_error("load accounting disabled for this solver");
    std::vector<double> loads(original_.m, 0.0);
    for (int i = 0; i < original_.m; ++i) {
      const int declared = original_.inner_norms[i].dimension();
      const std::size_t dim =
          declared > 0 ? declared : static_cast<std::size_t>(jobs_) * original_.r;
      std::vector<double> x(dim, 0.0);
      for (const auto& [pos, load] : machine_loads_[i]) x.at(pos) = load;
      loads[i] = original_.inner_norms[i].eval(x);
    }
    return original_.aggregate.eval(loads);
  }

  int scheduled() const override { return scheduled_; }

  const BudgetedPackEngine* engine() const { return engine_.get(); }
  bool keep_prefix() const { return keep_prefix_; }

 private:
  PackShape original_;
  std::unique_ptr<BudgetedInstance> budgeted_;
  CopyPlan plan_;
  std::unique_ptr<DrawSource> draws_;
  bool keep_prefix_;
  bool account_;
  std::unique_ptr<BudgetedPackEngine> engine_;
  std::vector<std::vector<std::pair<std::size_t, double>>> machine_loads_;
  int jobs_ = 0;
  int scheduled_ = 0;
};

const BudgetedPackEngine* solver_engine(const OnlinePackSolver& solver) {
  if (const auto* s = dynamic_cast<const EnginePackSolver*>(&solver))
    return s->engine();
  return nullptr;
}

namespace {

CopyPlan identity_plan(int m, std::vector<double> budgets) {
  CopyPlan plan;
  plan.machines = m;
  plan.copies = 1;
  plan.original_of.resize(m);
  std::iota(plan.original_of.begin(), plan.original_of.end(), 0);
  plan.budgets = std::move(budgets);
  return plan;
}

std::unique_ptr<OnlinePackSolver> build_engine_solver(
    const PackShape& shape, BudgetedInstance bi, CopyPlan plan,
    EngineParams params, OriginalInnerFactory factory,
    std::unique_ptr<DrawSource> draws, const SolverConfig& cfg,
    bool account = true) {
  params.record_trace = cfg.record_trace;
  params.oracle_limit = cfg.oracle_limit;
  return std::make_unique<EnginePackSolver>(shape, std::move(bi),
                                            std::move(plan), std::move(params),
                                            std::move(factory),
                                            std::move(draws), account);
}

BudgetedInstance copies_budgeted_shape(const PackShape& shape,
                                       const CopyPlan& plan) {
  BudgetedInstance bi;
  bi.m = plan.total();
  bi.r = shape.r;
  bi.inner_norms.reserve(bi.m);
  for (int t = 0; t < bi.m; ++t)
    bi.inner_norms.push_back(shape.inner_norms[plan.original_of[t]]);
  bi.machine_budgets = plan.budgets;
  return bi;
}

std::unique_ptr<OnlinePackSolver> make_pbounded_path(
    const PackShape& shape, double guess, std::unique_ptr<DrawSource> draws,
    const SolverConfig& cfg, OriginalInnerFactory factory,
    OriginalActivationOpt activation) {
  const double p = shape.aggregate.subadditivity_p();
  CopyPlan plan =
      make_copy_plan(shape.aggregate, shape.m, shape.budget, cfg.cap_ceiling);
  BudgetedInstance bi = copies_budgeted_shape(shape, plan);
  bi.aggregate = std::make_shared<GroupedAggregate>(shape.aggregate,
                                                    plan.original_of, shape.m);
  bi.budget = std::pow(3.0, p) * shape.budget;

  EngineParams params;
  params.opt_guess = std::ceil(guess);
  params.s = p;
  params.p = p;
  params.guess_mode = GuessMode::kDyadic;
  if (activation) {
    params.activation_opt = [plan, activation](int copy,
                                                std::span<const PackItem> items,
                                                double budget) {
      return activation(plan.original_of[copy], items, budget);
    };
  }
  return build_engine_solver(shape, std::move(bi), std::move(plan),
                             std::move(params), std::move(factory),
                             std::move(draws), cfg);
}

// Weighted-l1 engines over machine copies; `copy_weights` gives the
// activation weight of each copy (so copy t contributes
// copy_weights[t] * budgets[t] when active).
std::unique_ptr<OnlinePackSolver> make_wl1_engine(
    const PackShape& shape, CopyPlan plan, std::vector<double> copy_weights,
    double engine_budget, double guess, std::unique_ptr<DrawSource> draws,
    const SolverConfig& cfg, OriginalInnerFactory factory,
    OriginalActivationOpt activation) {
  BudgetedInstance bi = copies_budgeted_shape(shape, plan);
  bi.aggregate = std::make_shared<SpecAggregate>(
      AggregateSpec::norm_agg(NormSpec::weighted_l1(std::move(copy_weights))));
  bi.budget = engine_budget;

  EngineParams params;
  params.opt_guess = guess;
  params.s = 1.0;
  params.p = 1.0;
  params.guess_mode = GuessMode::kWeightedL1TwoPart;
  if (activation) {
    const auto& originals = plan.original_of;
    params.activation_opt = [originals, activation](
                                int copy, std::span<const PackItem> items,
                                double budget) {
      return activation(originals[copy], items, budget);
    };
  }
  return build_engine_solver(shape, std::move(bi), std::move(plan),
                             std::move(params), std::move(factory),
                             std::move(draws), cfg);
}

std::unique_ptr<OnlinePackSolver> make_wl1_path(
    const PackShape& shape, std::vector<double> machine_weights, double guess,
    std::unique_ptr<DrawSource> draws, const SolverConfig& cfg,
    OriginalInnerFactory factory, OriginalActivationOpt activation) {
  const AggregateSpec wl1 =
      AggregateSpec::norm_agg(NormSpec::weighted_l1(machine_weights));
  CopyPlan plan = make_copy_plan(wl1, shape.m, shape.budget, cfg.cap_ceiling);
  std::vector<double> copy_weights(plan.total());
  for (int t = 0; t < plan.total(); ++t)
    copy_weights[t] = machine_weights[plan.original_of[t]];
  return make_wl1_engine(shape, std::move(plan), std::move(copy_weights),
                         3.0 * shape.budget, guess, std::move(draws), cfg,
                         std::move(factory), std::move(activation));
}

std::unique_ptr<OnlinePackSolver> make_lp_path(
    const PackShape& shape, double p, double guess,
    std::unique_ptr<DrawSource> draws, const SolverConfig& cfg,
    OriginalInnerFactory factory, OriginalActivationOpt activation) {
  // Work with f = ||.||_p^p and budget B^p so the copy weights b^(p-1)
  // apply on the power scale; the user-facing budget stays on the norm
  // scale.
  const double pow_budget = std::pow(shape.budget, p);
  const AggregateSpec pow_agg = AggregateSpec::pnorm_power(p);
  CopyPlan plan = make_copy_plan(pow_agg, shape.m, pow_budget, cfg.cap_ceiling);
  std::vector<double> copy_weights(plan.total());
  for (int t = 0; t < plan.total(); ++t)
    copy_weights[t] = std::pow(plan.budgets[t], p - 1.0);
  return make_wl1_engine(shape, std::move(plan), std::move(copy_weights),
                         std::pow(3.0 * shape.budget, p), guess,
                         std::move(draws), cfg, std::move(factory),
                         std::move(activation));
}

std::unique_ptr<OnlinePackSolver> make_topk_path(
    const PackShape& shape, int k, double guess,
    std::unique_ptr<DrawSource> draws, const SolverConfig& cfg,
    OriginalInnerFactory factory, OriginalActivationOpt activation) {
  CopyPlan plan =
      make_copy_plan(shape.aggregate, shape.m, shape.budget, cfg.cap_ceiling);
  // Only copies whose budget exceeds 3B/k carry weight; small copies are
  // free to activate.
  std::vector<double> copy_weights(plan.total());
  for (int t = 0; t < plan.total(); ++t)
    copy_weights[t] = plan.budgets[t] > 3.0 * shape.budget / k ? 1.0 : 0.0;
  return make_wl1_engine(shape, std::move(plan), std::move(copy_weights),
                         3.0 * shape.budget, guess, std::move(draws), cfg,
                         std::move(factory), std::move(activation));
}

std::unique_ptr<OnlinePackSolver> make_symmetric_path(
    const PackShape& shape, const NormSpec& norm, double guess,
    std::unique_ptr<DrawSource> draws, const SolverConfig& cfg,
    OriginalInnerFactory factory, OriginalActivationOpt activation) {
  auto candidates = symmetric_budget_candidates(norm, shape.m, shape.budget);
  if (candidates.empty()) return std::make_unique<InertSolver>();
  const int pick =
      draws->pick(-1, kTagBudgetPick, static_cast<int>(candidates.size()));
  const double bar_b = candidates[pick];
  const int kappa = symmetric_activation_cap(norm, shape.m, bar_b, shape.budget);
  if (kappa == 0 || bar_b <= 0.0) return std::make_unique<InertSolver>();

  CopyPlan plan = identity_plan(shape.m, std::vector<double>(shape.m, bar_b));
  // Unit activation weights: each active machine contributes exactly one
  // toward the budget kappa.
  std::vector<double> copy_weights(shape.m, 1.0 / bar_b);
  return make_wl1_engine(shape, std::move(plan), std::move(copy_weights),
                         static_cast<double>(kappa), guess, std::move(draws),
                         cfg, std::move(factory), std::move(activation));
}

std::unique_ptr<OnlinePackSolver> make_solver_impl(
    const PackShape& shape, double guess, std::unique_ptr<DrawSource> draws,
    const SolverConfig& cfg, OriginalInnerFactory factory,
    OriginalActivationOpt activation);

// ---------------------------------------------------------------------------
// Nested composition: the outer norm schedules jobs across clusters, each
// cluster's admission control being a recursive schedule-packing solver for
// its block.
// ---------------------------------------------------------------------------

class ClusterAdapter final : public InnerSolver {
 public:
  ClusterAdapter(std::unique_ptr<OnlinePackSolver> sub, int block_m, int r)
      : sub_(std::move(sub)), block_m_(block_m), r_(r) {}

  std::optional<int> offer(const Offer& o) override {
    Job job;
    job.loads.assign(o.loads.begin(),
                     o.loads.begin() + static_cast<std::size_t>(block_m_) * r_);
    const auto p = sub_->offer(job);
    if (!p) return std::nullopt;
    ++accepted_;
    return p->machine * r_ + p->way;
  }

  double load() const override { return sub_->aggregate_load(); }
  int accepted() const override { return accepted_; }
  double violation_factor() const override { return 1.0; }

 private:
  std::unique_ptr<OnlinePackSolver> sub_;
  int block_m_;
  int r_;
  int accepted_ = 0;
};

class NestedPackSolver final : public OnlinePackSolver {
 public:
  NestedPackSolver(PackShape shape, double guess,
                   std::unique_ptr<DrawSource> draws, SolverConfig cfg)
      : shape_(std::move(shape)), cfg_(cfg) {
    const auto* agg = shape_.aggregate.get_if<AggregateSpec::NormAgg>();
    const auto* nested = agg->norm.get_if<NormSpec::Nested>();
    blocks_ = nested->blocks;
    outer_norm_ = nested->outer;
    inners_ = nested->inners;
    machine_loads_.resize(shape_.m);

    if (blocks_.size() == 1) {
      // Degenerate composition: a one-block outer norm is a scale factor.
      std::vector<double> one{1.0};
      const double scale = outer_norm_->eval(one);
      PackShape sub = block_shape(0, shape_.budget / scale);
      delegate_ = make_sched_pack_solver(sub, guess, std::move(draws), cfg_);
      return;
    }

    sub_ways_ = 0;
    for (const auto& blk : blocks_)
      sub_ways_ = std::max(sub_ways_,
                           static_cast<int>(blk.size()) * shape_.r);

    PackShape cluster;
    cluster.m = static_cast<int>(blocks_.size());
    cluster.r = sub_ways_;
    cluster.inner_norms.assign(cluster.m, NormSpec::linf());  // placeholder
    cluster.aggregate = AggregateSpec::norm_agg(*outer_norm_);
    cluster.budget = shape_.budget;

    draws_ = std::move(draws);
    OriginalInnerFactory factory = [this](int cluster_id, int copy,
                                          double budget, double guess_m) {
      PackShape sub = block_shape(cluster_id, budget);
      auto sub_solver = make_sched_pack_solver(
          sub, guess_m, draws_->child(0x9000 + copy), cfg_);
      return std::make_unique<ClusterAdapter>(
          std::move(sub_solver), static_cast<int>(blocks_[cluster_id].size()),
          shape_.r);
    };
    OriginalActivationOpt activation =
        [this](int cluster_id, std::span<const PackItem> items, double budget) {
          return cluster_pack_opt(cluster_id, items, budget);
        };
    outer_ = make_solver_impl(cluster, guess, draws_->child(0x8000), cfg_,
                              std::move(factory), std::move(activation));
  }

  std::optional<Placement> offer(const Job& job) override {
    const int local = jobs_++;
    if (delegate_) {
      Job sub_job = restrict_job(job, 0);
      const auto p = delegate_->offer(sub_job);
      if (!p) return std::nullopt;
      return record(local, blocks_[0][p->machine], p->way, job);
    }
    Job cluster_job;
    cluster_job.loads.assign(
        static_cast<std::size_t>(blocks_.size()) * sub_ways_, kInf);
    for (std::size_t l = 0; l < blocks_.size(); ++l)
      for (std::size_t t = 0; t < blocks_[l].size(); ++t)
        for (int k = 0; k < shape_.r; ++k)
          cluster_job.loads[l * sub_ways_ + t * shape_.r + k] =
              job.load(blocks_[l][t], k, shape_.r);
    const auto p = outer_->offer(cluster_job);
    if (!p) return std::nullopt;
    const int i_local = p->way / shape_.r;
    const int way = p->way % shape_.r;
    return record(local, blocks_[p->machine][i_local], way, job);
  }

  double aggregate_load() const override {
    std::vector<double> loads(shape_.m, 0.0);
    for (int i = 0; i < shape_.m; ++i) {
      const int declared = shape_.inner_norms[i].dimension();
      const std::size_t dim =
          declared > 0 ? declared : static_cast<std::size_t>(jobs_) * shape_.r;
      std::vector<double> x(dim, 0.0);
      for (const auto& [pos, load] : machine_loads_[i]) x.at(pos) = load;
      loads[i] = shape_.inner_norms[i].eval(x);
    }
    return shape_.aggregate.eval(loads);
  }

  int scheduled() const override { return scheduled_; }

 private:
  Placement record(int local, int machine, int way, const Job& job) {
    machine_loads_[machine].push_back(
        {static_cast<std::size_t>(local) * shape_.r + way,
         job.load(machine, way, shape_.r)});
    ++scheduled_;
    return Placement{machine, way};
  }

  Job restrict_job(const Job& job, int block) const {
    Job out;
    out.loads.reserve(blocks_[block].size() * shape_.r);
    for (int machine : blocks_[block])
      for (int k = 0; k < shape_.r; ++k)
        out.loads.push_back(job.load(machine, k, shape_.r));
    return out;
  }

  PackShape block_shape(int block, double budget) const {
    PackShape sub;
    sub.m = static_cast<int>(blocks_[block].size());
    sub.r = shape_.r;
    for (int machine : blocks_[block])
      sub.inner_norms.push_back(shape_.inner_norms[machine]);
    sub.aggregate = AggregateSpec::norm_agg(*inners_[block]);
    sub.budget = budget;
    return sub;
  }

  int cluster_pack_opt(int block, std::span<const PackItem> items,
                       double budget) const {
    const int block_m = static_cast<int>(blocks_[block].size());
    auto load_of =
        [&](std::span<const std::optional<int>> ways) -> double {
      std::vector<std::vector<double>> x(
          block_m, std::vector<double>(items.size() * shape_.r, 0.0));
      for (std::size_t t = 0; t < ways.size(); ++t) {
        if (!ways[t]) continue;
        const int i_local = *ways[t] / shape_.r;
        const int k = *ways[t] % shape_.r;
        const double load = items[t].way_loads[*ways[t]];
        if (load == kInf) return kInf;
        x[i_local][t * shape_.r + k] = load;
      }
      std::vector<double> loads(block_m);
      for (int i = 0; i < block_m; ++i)
        loads[i] = shape_.inner_norms[blocks_[block][i]].eval(x[i]);
      return inners_[block]->eval(loads);
    };
    return opt_norm_pack_general(load_of, items, budget, cfg_.oracle_limit)
        .count;
  }

  PackShape shape_;
  SolverConfig cfg_;
  std::vector<std::vector<int>> blocks_;
  NormSpecPtr outer_norm_;
  std::vector<NormSpecPtr> inners_;
  int sub_ways_ = 0;
  std::unique_ptr<DrawSource> draws_;
  std::unique_ptr<OnlinePackSolver> delegate_;  // single-block shortcut
  std::unique_ptr<OnlinePackSolver> outer_;
  std::vector<std::vector<std::pair<std::size_t, double>>> machine_loads_;
  int jobs_ = 0;
  int scheduled_ = 0;
};

std::unique_ptr<OnlinePackSolver> make_solver_impl(
    const PackShape& shape, double guess, std::unique_ptr<DrawSource> draws,
    const SolverConfig& cfg, OriginalInnerFactory factory,
    OriginalActivationOpt activation) {
  if (shape.aggregate.get_if<AggregateSpec::SumPowers>() ||
      shape.aggregate.get_if<AggregateSpec::PNormPower>()) {
    return make_pbounded_path(shape, guess, std::move(draws), cfg,
                              std::move(factory), std::move(activation));
  }
  const auto* agg = shape.aggregate.get_if<AggregateSpec::NormAgg>();
  const NormSpec& norm = agg->norm;
  if (const auto* w = norm.get_if<NormSpec::WeightedL1>())
    return make_wl1_path(shape, w->weights, guess, std::move(draws), cfg,
                         std::move(factory), std::move(activation));
  if (const auto* lp = norm.get_if<NormSpec::Lp>()) {
    if (lp->p == 1.0)
      return make_wl1_path(shape, std::vector<double>(shape.m, 1.0), guess,
                           std::move(draws), cfg, std::move(factory),
                           std::move(activation));
    return make_lp_path(shape, lp->p, guess, std::move(draws), cfg,
                        std::move(factory), std::move(activation));
  }
  if (const auto* tk = norm.get_if<NormSpec::TopK>())
    return make_topk_path(shape, tk->k, guess, std::move(draws), cfg,
                          std::move(factory), std::move(activation));
  if (norm.get_if<NormSpec::Nested>()) {
    if (factory || activation)
      throw std::invalid_argument(
          "nested aggregates cannot take machine overrides");
    return std::make_unique<NestedPackSolver>(shape, guess, std::move(draws),
                                              cfg);
  }
  if (norm.symmetric())
    return make_symmetric_path(shape, norm, guess, std::move(draws), cfg,
                               std::move(factory), std::move(activation));
  throw std::invalid_argument("no packing solver for aggregate norm kind " +
                              norm.kind_name());
}

}  // namespace

std::vector<double> symmetric_budget_candidates(const NormSpec& norm, int m,
                                                double budget) {
  if (!(budget > 0.0)) return {};
  const double unit = norm.unit_norm(0);
  if (!(unit > 0.0)) return {};
  const double base = budget / unit;
  const int count = std::max(
      1, static_cast<int>(std::ceil(std::log2(static_cast<double>(m)))));
  std::vector<double> out(count);
  for (int l = 0; l < count; ++l) out[l] = base * std::ldexp(1.0, -l);
  return out;
}

int symmetric_activation_cap(const NormSpec& norm, int m, double bar_b,
                             double budget) {
  int kappa = 0;
  std::vector<double> ones;
  for (int k = 1; k <= m; ++k) {
    ones.assign(k, bar_b);
    if (norm.eval(ones) <=
        2.0 * budget * (1.0 + kEngineTol) + kEngineTol)
      kappa = k;
    else
      break;
  }
  return kappa;
}

std::unique_ptr<OnlinePackSolver> make_sched_pack_solver(
    const PackShape& shape, double guess, std::unique_ptr<DrawSource> draws,
    SolverConfig config) {
  return make_solver_impl(shape, guess, std::move(draws), config, nullptr,
                          nullptr);
}

double solver_budget_factor(const PackShape& shape) {
  double c = 1.0;
  for (const auto& norm : shape.inner_norms) {
    if (norm.get_if<NormSpec::Nested>()) continue;
    c = std::max(c, inner_solver_guarantee(norm).violation);
  }
  if (shape.aggregate.get_if<AggregateSpec::SumPowers>() ||
      shape.aggregate.get_if<AggregateSpec::PNormPower>()) {
    const double p = shape.aggregate.subadditivity_p();
    return std::pow(3.0 * p * c, p);
  }
  const auto* agg = shape.aggregate.get_if<AggregateSpec::NormAgg>();
  const NormSpec& norm = agg->norm;
  if (norm.get_if<NormSpec::WeightedL1>()) return 3.0 * c;
  if (const auto* lp = norm.get_if<NormSpec::Lp>())
    return lp->p == 1.0 ? 3.0 * c : 9.0 * c;
  if (norm.get_if<NormSpec::TopK>()) return 9.0 * c;
  if (const auto* nested = norm.get_if<NormSpec::Nested>()) {
    // Outer path factor times the worst block factor.
    PackShape outer_shape;
    outer_shape.m = static_cast<int>(nested->blocks.size());
    outer_shape.r = shape.r;
    outer_shape.inner_norms.assign(outer_shape.m, NormSpec::linf());
    outer_shape.aggregate = AggregateSpec::norm_agg(*nested->outer);
    outer_shape.budget = shape.budget;
    double worst_block = 1.0;
    for (std::size_t l = 0; l < nested->blocks.size(); ++l) {
      PackShape sub;
      sub.m = static_cast<int>(nested->blocks[l].size());
      sub.r = shape.r;
      for (int machine : nested->blocks[l])
        sub.inner_norms.push_back(shape.inner_norms[machine]);
      sub.aggregate = AggregateSpec::norm_agg(*nested->inners[l]);
      sub.budget = shape.budget;
      worst_block = std::max(worst_block, solver_budget_factor(sub));
    }
    return solver_budget_factor(outer_shape) * worst_block;
  }
  if (norm.symmetric()) return 2.0 * c;
  throw std::invalid_argument("no packing solver for aggregate norm kind " +
                              norm.kind_name());
}

SolverGuarantee solver_guarantee(const PackShape& shape) {
  SolverGuarantee inner{1.0, 1.0};
  for (const auto& norm : shape.inner_norms) {
    if (norm.get_if<NormSpec::Nested>()) continue;
    const auto g = inner_solver_guarantee(norm);
    inner.alpha = std::min(inner.alpha, g.alpha);
    inner.violation = std::max(inner.violation, g.violation);
  }
  const double lm = clamped_log2(shape.m);
  SolverGuarantee out;
  out.violation = solver_budget_factor(shape);
  if (shape.aggregate.get_if<AggregateSpec::SumPowers>() ||
      shape.aggregate.get_if<AggregateSpec::PNormPower>()) {
    const double p = shape.aggregate.subadditivity_p();
    const double copies_m = shape.m * std::max(1.0, std::ceil(std::log2(
                                                   std::max(shape.m, 1))));
    const double lm2 = clamped_log2(static_cast<int>(copies_m));
    out.alpha = inner.alpha /
                (480.0 * std::pow(1.0 + 1.0 / p, p) * lm2 * lm2) / 2.0;
    return out;
  }
  const auto* agg = shape.aggregate.get_if<AggregateSpec::NormAgg>();
  const NormSpec& norm = agg->norm;
  if (norm.get_if<NormSpec::WeightedL1>() || norm.get_if<NormSpec::Lp>() ||
      norm.get_if<NormSpec::TopK>()) {
    out.alpha = inner.alpha / (320.0 * lm) / 2.0;
    return out;
  }
  if (const auto* nested = norm.get_if<NormSpec::Nested>()) {
    double worst_alpha = 1.0;
    for (std::size_t l = 0; l < nested->blocks.size(); ++l) {
      PackShape sub;
      sub.m = static_cast<int>(nested->blocks[l].size());
      sub.r = shape.r;
      for (int machine : nested->blocks[l])
        sub.inner_norms.push_back(shape.inner_norms[machine]);
      sub.aggregate = AggregateSpec::norm_agg(*nested->inners[l]);
      sub.budget = shape.budget;
      worst_alpha = std::min(worst_alpha, solver_guarantee(sub).alpha);
    }
    const double outer_lm = clamped_log2(static_cast<int>(nested->blocks.size()));
    out.alpha = worst_alpha / (320.0 * outer_lm * outer_lm) / 2.0;
    return out;
  }
  // Symmetric: extra log m from the uniform budget choice.
  out.alpha = inner.alpha / (320.0 * lm * lm) / 2.0;
  return out;
}

namespace {

PackRunResult drive_solver(const Instance& inst,
                           std::unique_ptr<OnlinePackSolver> solver) {
  PackRunResult out;
  out.assignment = Assignment(inst.n(), inst.m);
  for (int j = 0; j < inst.n(); ++j) {
    if (auto p = solver->offer(inst.jobs[j])) out.assignment.place(j, *p);
  }
  out.scheduled = out.assignment.placed_count();
  out.aggregate_load = solver->aggregate_load();
  return out;
}

}  // namespace

PackRunResult solve_sched_pack(const Instance& inst, double guess,
                               std::unique_ptr<DrawSource> draws,
                               SolverConfig config) {
  return drive_solver(
      inst, make_sched_pack_solver(shape_of(inst), guess, std::move(draws),
                                   config));
}

PackRunResult solve_sched_pack_pbounded(const Instance& inst, double guess,
                                        std::unique_ptr<DrawSource> draws,
                                        SolverConfig config) {
  if (!inst.aggregate.marginals_monotone())
    throw std::invalid_argument(
        "p-bounded path needs monotone discrete marginals");
  return drive_solver(inst,
                      make_pbounded_path(shape_of(inst), guess,
                                         std::move(draws), config, nullptr,
                                         nullptr));
}

PackRunResult solve_sched_pack_symmetric(const Instance& inst, double guess,
                                         std::unique_ptr<DrawSource> draws,
                                         SolverConfig config) {
  const auto* agg = inst.aggregate.get_if<AggregateSpec::NormAgg>();
  if (!agg || !agg->norm.symmetric())
    throw std::invalid_argument(
        "symmetric path needs a symmetric norm aggregate");
  return drive_solver(inst,
                      make_symmetric_path(shape_of(inst), agg->norm, guess,
                                          std::move(draws), config, nullptr,
                                          nullptr));
}

PackRunResult solve_sched_pack_lp(const Instance& inst, double guess,
                                  std::unique_ptr<DrawSource> draws,
                                  SolverConfig config) {
  const auto* agg = inst.aggregate.get_if<AggregateSpec::NormAgg>();
  if (!agg || !agg->norm.get_if<NormSpec::Lp>())
    throw std::invalid_argument("lp path needs an Lp norm aggregate");
  return solve_sched_pack(inst, guess, std::move(draws), config);
}

PackRunResult solve_sched_pack_topk(const Instance& inst, double guess,
                                    std::unique_ptr<DrawSource> draws,
                                    SolverConfig config) {
  const auto* agg = inst.aggregate.get_if<AggregateSpec::NormAgg>();
  if (!agg || !agg->norm.get_if<NormSpec::TopK>())
    throw std::invalid_argument("top-k path needs a TopK norm aggregate");
  return solve_sched_pack(inst, guess, std::move(draws), config);
}

PackRunResult solve_sched_pack_nested(const Instance& inst, double guess,
                                      std::unique_ptr<DrawSource> draws,
                                      SolverConfig config) {
  const auto* agg = inst.aggregate.get_if<AggregateSpec::NormAgg>();
  if (!agg || !agg->norm.get_if<NormSpec::Nested>())
    throw std::invalid_argument("nested path needs a Nested norm aggregate");
  return solve_sched_pack(inst, guess, std::move(draws), config);
}

}  // namespace ogs
