#include "ogs/budgeted_pack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ogs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rel_slack(double v) { return kEngineTol * std::max(1.0, std::abs(v)); }

double clamped_log2(int m) {
  return std::max(1.0, std::log2(static_cast<double>(std::max(m, 1))));
}

}  // namespace

// ---------------------------------------------------------------------------
// ObcmEngine
// ---------------------------------------------------------------------------

ObcmEngine::ObcmEngine(std::vector<double> set_costs, double budget,
                       double opt_guess, DrawSource& draws, int granularity,
                       bool record_trace)
    : costs_(std::move(set_costs)), budget_(budget), record_trace_(record_trace) {
  const int m = static_cast<int>(costs_.size());
  const int gran =
      granularity > 0 ? granularity
                      : static_cast<int>(std::ceil(2.0 * clamped_log2(m)));
  tau_bar_.resize(m);
  thresholds_.resize(m);
  eligible_.assign(m, 1);
  active_.assign(m, 0);
  covered_.resize(m);
  offered_.resize(m);
  for (int i = 0; i < m; ++i) {
    if (costs_[i] > budget_ + rel_slack(budget_)) {
      eligible_[i] = 0;
      continue;
    }
    tau_bar_[i] = draws.threshold(i, gran).tau_bar;
    thresholds_[i] = tau_bar_[i] * costs_[i] * opt_guess / (2.0 * budget_);
    if (budget_ == 0.0) thresholds_[i] = 0.0;
  }
}

ObcmEngine::Decision ObcmEngine::observe(int element_id,
                                         std::span<const int> containing) {
  // Already covered: attribute to the earliest activated containing set.
  int earliest = -1;
  for (int i : containing) {
    if (!active_[i]) continue;
    if (earliest < 0 ||
        std::find(active_order_.begin(), active_order_.end(), i) <
            std::find(active_order_.begin(), active_order_.end(), earliest))
      earliest = i;
  }
  if (earliest >= 0) {
    covered_[earliest].push_back(element_id);
    ++covered_count_;
    if (record_trace_)
      trace_.push_back({TraceEvent::kAccept, earliest, element_id});
    return {true, earliest, false};
  }

  // Offer to inactive containing sets in index order.
  std::vector<int> order(containing.begin(), containing.end());
  std::sort(order.begin(), order.end());
  for (int i : order) {
    if (!eligible_[i] || active_[i]) continue;
    offered_[i].push_back(element_id);
    if (record_trace_) trace_.push_back({TraceEvent::kOffer, i, element_id});
    const double count = static_cast<double>(offered_[i].size());
    if (count + rel_slack(thresholds_[i]) < thresholds_[i]) continue;
    if (active_cost_ > budget_ + rel_slack(budget_)) {
      if (record_trace_)
        trace_.push_back({TraceEvent::kGuardStop, i, element_id});
      continue;
    }
    active_[i] = 1;
    active_order_.push_back(i);
    active_cost_ += costs_[i];
    if (active_cost_ > budget_ + rel_slack(budget_)) violator_ = i;
    covered_[i].push_back(element_id);
    ++covered_count_;
    if (record_trace_)
      trace_.push_back({TraceEvent::kActivate, i, element_id});
    return {true, i, true};
  }
  if (record_trace_) trace_.push_back({TraceEvent::kReject, -1, element_id});
  return {false, -1, false};
}

ObcmResult run_obcm(const SetCoverInstance& sc, double budget, double opt_guess,
                    DrawSource& draws, int granularity, bool record_trace) {
  ObcmEngine engine(sc.costs, budget, opt_guess, draws, granularity,
                    record_trace);
  for (int j = 0; j < sc.n(); ++j) engine.observe(j, sc.elements[j]);
  ObcmResult out;
  out.active.assign(sc.m(), 0);
  for (int i : engine.active_order()) out.active[i] = 1;
  out.active_order = engine.active_order();
  out.covered_by = engine.covered_by();
  out.offered = engine.offered();
  out.active_cost = engine.active_cost();
  out.covered_count = engine.covered_count();
  out.violator = engine.violator();
  out.trace = engine.trace();
  return out;
}

// ---------------------------------------------------------------------------
// BudgetedPackEngine
// ---------------------------------------------------------------------------

BudgetedPackEngine::BudgetedPackEngine(const BudgetedInstance& inst,
                                       EngineParams params, InnerFactory factory,
                                       DrawSource& draws)
    : inst_(inst),
      params_(params),
      factory_(std::move(factory)),
      draws_(draws),
      machines_(inst.m),
      solvers_(inst.m),
      masked_budgets_(inst.m, 0.0) {
  log2m_ = clamped_log2(inst_.m);
  guess_count_ = std::max(1, static_cast<int>(std::floor(2.0 * log2m_)));
  const int gran =
      params_.granularity > 0
          ? params_.granularity
          : static_cast<int>(std::ceil(3.0 * log2m_));
  params_.granularity = gran;
  guard_budget_ = std::pow(params_.s, params_.p) * inst_.budget;
  aggregate_value_ = inst_.aggregate->eval(masked_budgets_);

  std::vector<double> probe(inst_.m, 0.0);
  for (int i = 0; i < inst_.m; ++i) {
    probe[i] = inst_.machine_budgets[i];
    const double solo = inst_.aggregate->eval(probe);
    probe[i] = 0.0;
    // A machine whose activation alone exceeds the budget never plays.
    if (solo > inst_.budget + rel_slack(inst_.budget)) {
      machines_[i].eligible = false;
      continue;
    }
    machines_[i].threshold_multiplier = draws.threshold(i, gran).tau_bar;
  }
}

Offer BudgetedPackEngine::make_offer(const Job& job, int i, int local_id) const {
  Offer o;
  o.loads = std::span<const double>(job.loads)
                .subspan(static_cast<std::size_t>(i) * inst_.r, inst_.r);
  if (const auto* act = inst_.inner_norms[i].get_if<NormSpec::ActivationPlus>()) {
    if (!act->weights.empty()) {
      const std::size_t begin = static_cast<std::size_t>(local_id) * inst_.r;
      if (begin + inst_.r > act->weights.size())
        throw std::invalid_argument(
            "positional activation weights exhausted by stream");
      o.weights = std::span<const double>(act->weights).subspan(begin, inst_.r);
    }
  }
  return o;
}

PackItem BudgetedPackEngine::make_item(const Job& job, int i,
                                       int local_id) const {
  PackItem item;
  item.job = local_id;
  item.way_loads.assign(
      job.loads.begin() + static_cast<std::size_t>(i) * inst_.r,
      job.loads.begin() + static_cast<std::size_t>(i) * inst_.r + inst_.r);
  return item;
}

double BudgetedPackEngine::marginal_of(int i) {
  masked_budgets_[i] = inst_.machine_budgets[i];
  const double with = inst_.aggregate->eval(masked_budgets_);
  masked_budgets_[i] = 0.0;
  return with - aggregate_value_;
}

double BudgetedPackEngine::current_threshold(int i, double marginal) const {
  const double numer =
      machines_[i].threshold_multiplier * params_.opt_guess * marginal;
  if (numer == 0.0) return 0.0;
  const double denom =
      10.0 * std::pow(params_.s + 1.0, params_.p) * inst_.budget;
  return denom > 0.0 ? numer / denom : kInf;
}

bool BudgetedPackEngine::crosses_threshold(int i, double marginal) const {
  const double tau = current_threshold(i, marginal);
  double value;
  if (params_.test == ActivationTest::kOfferCount) {
    value = static_cast<double>(machines_[i].offered_pre.size());
  } else if (params_.activation_opt) {
    value = params_.activation_opt(i, machines_[i].offered_pre,
                                   inst_.machine_budgets[i]);
  } else {
    value = opt_norm_pack(inst_.inner_norms[i], machines_[i].offered_pre,
                          inst_.machine_budgets[i], 0, params_.oracle_limit)
                .count;
  }
  return value + rel_slack(tau) >= tau;
}

double BudgetedPackEngine::draw_guess(int i, double frozen_marginal) {
  double guess;
  if (params_.guess_mode == GuessMode::kWeightedL1TwoPart &&
      draws_.coin(i, kTagGuessBranch)) {
    guess = params_.opt_guess * frozen_marginal /
            (60.0 * inst_.budget * log2m_);
  } else {
    const int idx = draws_.pick(i, kTagGuess, guess_count_);
    guess = params_.opt_guess * std::ldexp(1.0, -(idx + 1));
  }
  // Inner solvers need a positive guess; values below one round up to one
  // job anyway.
  return guess > 0.0 ? guess : 1.0;
}

std::optional<Placement> BudgetedPackEngine::observe(const Job& job) {
  const int j = job_index_++;
  seen_jobs_.push_back(job);
  placements_.push_back(std::nullopt);

  auto accept = [&](int i, int way) -> std::optional<Placement> {
    machines_[i].accepted.push_back(j);
    placements_.back() = Placement{i, way};
    ++scheduled_;
    if (params_.record_trace) trace_.push_back({TraceEvent::kAccept, i, j});
    return placements_.back();
  };

  // Active machines first, in activation order.
  for (int i : active_order_) {
    machines_[i].offered_post.push_back(j);
    if (params_.record_trace) trace_.push_back({TraceEvent::kOffer, i, j});
    if (auto way = solvers_[i]->offer(make_offer(job, i, j)))
      return accept(i, *way);
    if (params_.record_trace) trace_.push_back({TraceEvent::kReject, i, j});
  }

  // Then inactive machines in index order.
  for (int i = 0; i < inst_.m; ++i) {
    auto& st = machines_[i];
    if (!st.eligible || st.active) continue;
    st.offered_pre.push_back(make_item(job, i, j));
    if (params_.record_trace) trace_.push_back({TraceEvent::kOffer, i, j});

    const double marg = marginal_of(i);
    if (!crosses_threshold(i, marg)) continue;
    if (aggregate_value_ + rel_slack(guard_budget_) >= guard_budget_) {
      if (params_.record_trace) trace_.push_back({TraceEvent::kGuardStop, i, j});
      continue;
    }

    st.frozen_marginal = marg;
    st.active = true;
    st.activation_index = static_cast<int>(active_order_.size());
    active_order_.push_back(i);
    masked_budgets_[i] = inst_.machine_budgets[i];
    aggregate_value_ = inst_.aggregate->eval(masked_budgets_);
    if (aggregate_value_ > guard_budget_ + rel_slack(guard_budget_))
      violator_ = i;
    st.guess = draw_guess(i, marg);
    solvers_[i] = factory_(i, inst_.machine_budgets[i], st.guess);
    if (params_.record_trace) trace_.push_back({TraceEvent::kActivate, i, j});

    if (auto way = solvers_[i]->offer(make_offer(job, i, j)))
      return accept(i, *way);
    if (params_.record_trace) trace_.push_back({TraceEvent::kReject, i, j});
  }
  return std::nullopt;
}

std::vector<PackItem> BudgetedPackEngine::total_offered(int i) const {
  std::vector<PackItem> items = machines_[i].offered_pre;
  for (int j : machines_[i].offered_post)
    items.push_back(make_item(seen_jobs_[j], i, j));
  return items;
}

namespace {

BudgetedRunResult drive(const BudgetedInstance& inst, EngineParams params,
                        DrawSource& draws) {
  InnerFactory factory = [&inst](int i, double budget, double guess) {
    return make_inner_solver(inst.inner_norms[i], budget, guess);
  };
  BudgetedPackEngine engine(inst, params, std::move(factory), draws);
  for (const Job& job : inst.jobs) engine.observe(job);

  BudgetedRunResult out;
  out.assignment = Assignment(inst.n(), inst.m);
  for (int j = 0; j < inst.n(); ++j)
    if (auto p = engine.placements()[j]) out.assignment.place(j, *p);
  for (int i : engine.active_order()) out.assignment.set_active(i);
  out.scheduled = engine.scheduled();
  out.machines.reserve(inst.m);
  for (int i = 0; i < inst.m; ++i) out.machines.push_back(engine.machine(i));
  out.active_order = engine.active_order();
  out.aggregate_value = engine.aggregate_value();
  out.violator = engine.violator();
  out.trace = engine.trace();
  return out;
}

}  // namespace

BudgetedRunResult run_budgeted_pbounded(const BudgetedInstance& inst, double s,
                                        double opt_guess, DrawSource& draws,
                                        EngineParams params) {
  params.s = s;
  params.p = inst.aggregate->subadditivity_p();
  params.opt_guess = opt_guess;
  params.guess_mode = GuessMode::kDyadic;
  return drive(inst, params, draws);
}

BudgetedRunResult run_budgeted_wl1(const BudgetedInstance& inst,
                                   double opt_guess, DrawSource& draws,
                                   EngineParams params) {
  params.s = 1.0;
  params.p = 1.0;
  params.opt_guess = opt_guess;
  params.guess_mode = GuessMode::kWeightedL1TwoPart;
  return drive(inst, params, draws);
}

// ---------------------------------------------------------------------------
// Budget wrapper
// ---------------------------------------------------------------------------

Assignment budget_wrapper(const Assignment& full,
                          std::span<const int> active_order,
                          std::optional<int> violator, DrawSource& draws,
                          WrapperOutcome* outcome) {
  if (!violator) {
    if (outcome) *outcome = {false, true};
    return full;
  }
  const bool keep_prefix = draws.coin(-1, kTagWrapperCoin);
  if (outcome) *outcome = {true, keep_prefix};

  std::vector<char> keep(full.activations().size(), 0);
  if (keep_prefix) {
    for (int i : active_order) {
      if (i == *violator) break;
      keep[i] = 1;
    }
  } else {
    keep[*violator] = 1;
  }

  Assignment filtered(full.size(), static_cast<int>(full.activations().size()));
  for (int j = 0; j < full.size(); ++j) {
    const auto& p = full.placement(j);
    if (p && keep[p->machine]) filtered.place(j, *p);
  }
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (keep[i] && full.active(static_cast<int>(i)))
      filtered.set_active(static_cast<int>(i));
  return filtered;
}

ObcmResult budget_wrapper_obcm(const ObcmResult& run,
                               std::span<const double> set_costs,
                               DrawSource& draws, WrapperOutcome* outcome) {
  if (!run.violator) {
    if (outcome) *outcome = {false, true};
    return run;
  }
  const bool keep_prefix = draws.coin(-1, kTagWrapperCoin);
  if (outcome) *outcome = {true, keep_prefix};

  ObcmResult out;
  out.active.assign(run.active.size(), 0);
  out.offered = run.offered;
  out.covered_by.assign(run.covered_by.size(), {});
  out.trace = run.trace;
  for (int i : run.active_order) {
    const bool is_violator = i == *run.violator;
    const bool keep = keep_prefix ? !is_violator : is_violator;
    if (!keep) continue;
    out.active[i] = 1;
    out.active_order.push_back(i);
    out.covered_by[i] = run.covered_by[i];
    out.active_cost += set_costs[i];
    out.covered_count += static_cast<int>(run.covered_by[i].size());
  }
  return out;
}

}  // namespace ogs
