#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include "ogs/budgeted_pack.hpp"
#include "test_support.hpp"

using namespace ogs;
using namespace ogs::test;

TEST_CASE("threshold multiplier distribution") {
  const int K = 4;
  // Exact masses: 1/2, 1/4, 1/8, 1/16 on 1, 3/4, 1/2, 1/4 and 1/16 on 0.
  std::map<int, double> expected{{0, 0.5}, {1, 0.25}, {2, 0.125},
                                 {3, 0.0625}, {4, 0.0625}};
  double total = 0.0;
  for (auto& [k, p] : expected) total += p;
  CHECK(total == doctest::Approx(1.0));

  Rng rng(101);
  const int draws = 1'000'000;
  std::map<double, int> counts;
  for (int i = 0; i < draws; ++i) {
    const auto d = sample_threshold_multiplier(K, rng);
    // Support check: exactly the values (1 - k/K)^+.
    const double back = (1.0 - d.tau_bar) * K;
    CHECK(std::abs(back - std::round(back)) < 1e-9);
    counts[d.tau_bar]++;
  }
  for (const auto& [k, p] : expected) {
    const double value = k >= K ? 0.0 : 1.0 - static_cast<double>(k) / K;
    const double freq = static_cast<double>(counts[value]) / draws;
    const double sigma = std::sqrt(p * (1.0 - p) / draws);
    CHECK(std::abs(freq - p) <= 3.0 * sigma);
  }
  CHECK_THROWS_AS(sample_threshold_multiplier(0, rng), std::invalid_argument);
}

namespace {

SetCoverInstance single_set_instance(int n, double cost) {
  SetCoverInstance sc;
  sc.costs = {cost};
  sc.elements.assign(n, {0});
  return sc;
}

}  // namespace

TEST_CASE("obcm: zero thresholds activate on first offer") {
  SetCoverInstance sc;
  sc.costs = {2.0, 1.0};
  sc.elements = {{0, 1}, {1}};
  ConstThresholdSource draws(keyed(7), 0.0);
  const auto res = run_obcm(sc, /*budget=*/3.0, /*opt_guess=*/2.0, draws);
  // The first element activates its lowest-index containing set.
  REQUIRE(!res.active_order.empty());
  CHECK(res.active_order.front() == 0);
  CHECK(res.covered_by[0].front() == 0);
  CHECK(res.covered_count == 2);
}

TEST_CASE("obcm: single-set hand simulation per threshold value") {
  const int n = 10;
  const int K = 4;
  const SetCoverInstance sc = single_set_instance(n, /*cost=*/5.0);
  // budget = cost, guess = n: threshold is tau_bar * n / 2.
  for (int k = 0; k <= K; ++k) {
    const double tau_bar = k >= K ? 0.0 : 1.0 - static_cast<double>(k) / K;
    ConstThresholdSource draws(keyed(11), tau_bar);
    const auto res = run_obcm(sc, 5.0, n, draws, K);
    const int expected =
        tau_bar > 0.0
            ? n - static_cast<int>(std::ceil(tau_bar * n / 2.0)) + 1
            : n;
    CHECK(res.covered_count == expected);
  }
}

TEST_CASE("obcm: zero budget means no activations") {
  const SetCoverInstance sc = single_set_instance(4, 1.0);
  ConstThresholdSource draws(keyed(3), 0.0);
  const auto res = run_obcm(sc, 0.0, 4.0, draws);
  CHECK(res.active_order.empty());
  CHECK(res.covered_count == 0);
}

TEST_CASE("obcm: one overshoot, then wrapper restores feasibility") {
  SetCoverInstance sc;
  sc.costs = {2.0, 2.0, 2.0};
  sc.elements = {{0}, {1}, {2}};
  ConstThresholdSource draws(keyed(5), 0.0);
  const auto res = run_obcm(sc, /*budget=*/3.0, 3.0, draws);
  // Sets 0 and 1 activate (cost 4 > 3, so 1 is the violator); set 2 is
  // blocked by the budget guard.
  REQUIRE(res.violator.has_value());
  CHECK(*res.violator == 1);
  CHECK(res.active_cost == doctest::Approx(4.0));
  CHECK(res.covered_count == 2);

  int covered_sum = 0;
  for (bool prefix : {true, false}) {
    ScriptedSource coin({}, {}, prefix);
    const auto wrapped = budget_wrapper_obcm(res, sc.costs, coin);
    CHECK(wrapped.active_cost <= 3.0);
    covered_sum += wrapped.covered_count;
  }
  // Every covered element survives in exactly one branch.
  CHECK(covered_sum == res.covered_count);

  // No violation: the wrapper is the identity.
  const auto clean = run_obcm(sc, /*budget=*/10.0, 3.0, draws);
  CHECK_FALSE(clean.violator.has_value());
  ScriptedSource coin({}, {}, false);
  const auto wrapped = budget_wrapper_obcm(clean, sc.costs, coin);
  CHECK(wrapped.covered_count == clean.covered_count);
  CHECK(wrapped.active_cost == doctest::Approx(clean.active_cost));
}

namespace {

BudgetedInstance wl1_instance() {
  // Two linf machines with activation weights (1, 1), budgets (1, 1),
  // aggregate budget 1.5: the second activation violates.
  BudgetedInstance bi;
  bi.m = 2;
  bi.r = 1;
  bi.inner_norms = {NormSpec::linf(), NormSpec::linf()};
  bi.machine_budgets = {1.0, 1.0};
  bi.aggregate = std::make_shared<SpecAggregate>(
      AggregateSpec::norm_agg(NormSpec::weighted_l1({1.0, 1.0})));
  bi.budget = 1.5;
  bi.jobs = {Job{{0.5, 0.5}}, Job{{0.7, 0.7}}, Job{{0.9, 0.9}}};
  return bi;
}

}  // namespace

TEST_CASE("engine: single machine with zero threshold") {
  BudgetedInstance bi;
  bi.m = 1;
  bi.r = 1;
  bi.inner_norms = {NormSpec::linf()};
  bi.machine_budgets = {2.0};
  bi.aggregate = std::make_shared<SpecAggregate>(
      AggregateSpec::norm_agg(NormSpec::weighted_l1({3.0})));
  bi.budget = 10.0;
  bi.jobs = {Job{{1.0}}, Job{{1.5}}};

  ConstThresholdSource draws(keyed(21), 0.0);
  EngineParams params;
  params.record_trace = true;
  const auto res = run_budgeted_pbounded(bi, /*s=*/1.0, /*opt_guess=*/2.0,
                                         draws, params);
  REQUIRE(res.active_order.size() == 1);
  CHECK(res.machines[0].frozen_marginal == doctest::Approx(3.0 * 2.0));
  CHECK(res.scheduled == 2);
  CHECK(res.aggregate_value == doctest::Approx(6.0));
}

TEST_CASE("engine: guard stops activations at the stretched budget") {
  // Ten cheap machines, stretched budget reached after a few activations;
  // no activation may happen once f(y) >= s^p B.
  BudgetedInstance bi;
  bi.m = 10;
  bi.r = 1;
  bi.inner_norms.assign(10, NormSpec::linf());
  bi.machine_budgets.assign(10, 1.0);
  bi.aggregate = std::make_shared<SpecAggregate>(
      AggregateSpec::norm_agg(NormSpec::weighted_l1(std::vector<double>(10, 1.0))));
  bi.budget = 2.5;
  for (int j = 0; j < 10; ++j) {
    Job job;
    job.loads.assign(10, 10.0);  // nothing fits, machines reject everything
    job.loads[j % 10] = 10.0;
    bi.jobs.push_back(job);
  }
  ConstThresholdSource draws(keyed(22), 0.0);
  EngineParams params;
  params.record_trace = true;
  const auto res = run_budgeted_wl1(bi, /*opt_guess=*/10.0, draws, params);
  // Activations stop once the aggregate reaches the budget: 2 within, one
  // overshoot possible.
  CHECK(res.active_order.size() <= 3);
  double agg_before_last = 0.0;
  for (std::size_t t = 0; t + 1 < res.active_order.size(); ++t)
    agg_before_last += 1.0;
  CHECK(agg_before_last < 2.5);
  for (const auto& ev : res.trace) {
    if (ev.kind == TraceEvent::kActivate) {
      // fine: activations only happen while the guard held
    }
  }
}

TEST_CASE("coupled dyadic runs: p-bounded engine equals weighted-l1 engine") {
  const BudgetedInstance bi = wl1_instance();
  const std::uint64_t key = 90210;
  for (std::uint64_t variant = 0; variant < 24; ++variant) {
    EngineParams params;
    params.record_trace = true;
    KeyedDrawSource a(key + variant);
    const auto pb = run_budgeted_pbounded(bi, /*s=*/1.0, /*opt_guess=*/3.0, a,
                                          params);
    DyadicBranchSource b(keyed(key + variant));
    const auto wl = run_budgeted_wl1(bi, /*opt_guess=*/3.0, b, params);
    CHECK(pb.trace == wl.trace);
    CHECK(pb.active_order == wl.active_order);
    CHECK(pb.scheduled == wl.scheduled);
    CHECK(pb.aggregate_value == doctest::Approx(wl.aggregate_value));
    for (int i = 0; i < bi.m; ++i) {
      CHECK(pb.machines[i].guess == doctest::Approx(wl.machines[i].guess));
      CHECK(pb.machines[i].frozen_marginal ==
            doctest::Approx(wl.machines[i].frozen_marginal));
    }
  }
}

namespace {

// Independent straight-line simulation of the threshold engine on the tiny
// two-machine instance above, for exhaustive draw enumeration.
struct TinyReference {
  std::vector<int> active_order;
  std::vector<std::optional<int>> placed_on;  // machine per job
  std::vector<double> marginals{0.0, 0.0};
  std::optional<int> violator;
};

TinyReference simulate_tiny(const BudgetedInstance& bi, double tau0,
                            double tau1, int guess0, int guess1,
                            double opt_guess) {
  TinyReference ref;
  ref.placed_on.assign(bi.jobs.size(), std::nullopt);
  const double tau_bar[2] = {tau0, tau1};
  const int guess_idx[2] = {guess0, guess1};
  bool active[2] = {false, false};
  double inner_load[2] = {0.0, 0.0};
  double inner_cap[2] = {0.0, 0.0};
  double agg = 0.0;
  int offered[2] = {0, 0};
  const double B = bi.budget;

  auto offer_to_active = [&](int i, int j) {
    // LInf inner admission: accept when the way load fits the machine
    // budget (the guess does not matter for LInf).
    (void)inner_cap;
    const double p = bi.jobs[j].loads[i];
    if (p <= bi.machine_budgets[i]) {
      inner_load[i] = std::max(inner_load[i], p);
      ref.placed_on[j] = i;
      return true;
    }
    return false;
  };

  for (std::size_t j = 0; j < bi.jobs.size(); ++j) {
    bool placed = false;
    for (int i : ref.active_order) {
      if (offer_to_active(i, static_cast<int>(j))) {
        placed = true;
        break;
      }
    }
    if (placed) continue;
    for (int i = 0; i < 2 && !placed; ++i) {
      if (active[i]) continue;
      ++offered[i];
      // Offered-count optimum for LInf = count of fitting jobs; every job
      // here fits machine budgets, so it equals the offer count.
      const double marginal = 1.0;  // weights and budgets are all one
      const double tau = tau_bar[i] * opt_guess * marginal / (10.0 * 2.0 * B);
      if (offered[i] < tau - 1e-12) continue;
      if (agg >= B - 1e-12) continue;
      active[i] = true;
      ref.active_order.push_back(i);
      ref.marginals[i] = marginal;
      agg += 1.0;
      if (agg > B + 1e-12) ref.violator = i;
      (void)guess_idx;  // LInf admission ignores the guess
      if (offer_to_active(i, static_cast<int>(j))) placed = true;
    }
  }
  return ref;
}

}  // namespace

TEST_CASE("exhaustive joint draw support matches an independent simulation") {
  const BudgetedInstance bi = wl1_instance();
  const int K = 3;  // ceil(3 log2 2)
  const double opt_guess = 3.0;
  std::vector<double> support;
  for (int k = 0; k < K; ++k) support.push_back(1.0 - static_cast<double>(k) / K);
  support.push_back(0.0);

  for (double tau0 : support)
    for (double tau1 : support)
      for (int g0 = 0; g0 < 2; ++g0)
        for (int g1 = 0; g1 < 2; ++g1) {
          ScriptedSource draws({{0, tau0}, {1, tau1}}, {{0, g0}, {1, g1}});
          const auto run = run_budgeted_wl1(bi, opt_guess, draws);
          const auto ref =
              simulate_tiny(bi, tau0, tau1, g0, g1, opt_guess);
          CHECK(run.active_order == ref.active_order);
          CHECK(run.violator == ref.violator);
          for (std::size_t j = 0; j < bi.jobs.size(); ++j) {
            const auto& p = run.assignment.placement(static_cast<int>(j));
            if (ref.placed_on[j]) {
              REQUIRE(p.has_value());
              CHECK(p->machine == *ref.placed_on[j]);
            } else {
              CHECK_FALSE(p.has_value());
            }
          }
        }
}

TEST_CASE("budget wrapper on assignments") {
  const BudgetedInstance bi = wl1_instance();
  ConstThresholdSource draws(keyed(31), 0.0);
  EngineParams params;
  const auto run = run_budgeted_wl1(bi, 3.0, draws, params);

  if (run.violator) {
    for (bool prefix : {true, false}) {
      ScriptedSource coin({}, {}, prefix);
      WrapperOutcome outcome;
      const auto wrapped = budget_wrapper(run.assignment, run.active_order,
                                          run.violator, coin, &outcome);
      CHECK(outcome.violated);
      // Feasibility: total activation weight within the declared budget.
      double weight = 0.0;
      for (int i = 0; i < bi.m; ++i)
        if (wrapped.active(i)) weight += 1.0;
      CHECK(weight <= bi.budget + 1e-12);
    }
  }

  // Identity on violation-free runs.
  BudgetedInstance roomy = bi;
  roomy.budget = 10.0;
  ConstThresholdSource draws2(keyed(32), 0.0);
  const auto clean = run_budgeted_wl1(roomy, 3.0, draws2, params);
  CHECK_FALSE(clean.violator.has_value());
  ScriptedSource coin({}, {}, false);
  const auto wrapped = budget_wrapper(clean.assignment, clean.active_order,
                                      clean.violator, coin);
  CHECK(wrapped.placed_count() == clean.assignment.placed_count());
}

namespace {

// Forces the weighted-l1 guess distribution onto its first branch.
class FirstBranchSource final : public DrawSource {
 public:
  explicit FirstBranchSource(std::unique_ptr<DrawSource> base)
      : base_(std::move(base)) {}
  ThresholdDraw threshold(int machine, int granularity) override {
    return base_->threshold(machine, granularity);
  }
  int pick(int machine, std::uint64_t tag, int count) override {
    return base_->pick(machine, tag, count);
  }
  bool coin(int machine, std::uint64_t tag) override {
    if (tag == kTagGuessBranch) return true;
    return base_->coin(machine, tag);
  }
  std::unique_ptr<DrawSource> child(std::uint64_t tag) const override {
    return std::make_unique<FirstBranchSource>(base_->child(tag));
  }

 private:
  std::unique_ptr<DrawSource> base_;
};

}  // namespace

TEST_CASE("uniform weighted-l1 run activates at most the budget count") {
  // Unit weights and budgets with aggregate budget kappa: the guard allows
  // at most kappa activations (plus at most one overshoot).
  const int m = 6, kappa = 3;
  BudgetedInstance bi;
  bi.m = m;
  bi.r = 1;
  bi.inner_norms.assign(m, NormSpec::linf());
  bi.machine_budgets.assign(m, 1.0);
  bi.aggregate = std::make_shared<SpecAggregate>(
      AggregateSpec::norm_agg(NormSpec::weighted_l1(std::vector<double>(m, 1.0))));
  bi.budget = kappa;
  for (int j = 0; j < 12; ++j) {
    Job job;
    job.loads.assign(m, 5.0);  // rejected by every inner solver
    bi.jobs.push_back(job);
  }
  ConstThresholdSource draws(keyed(61), 0.0);
  const auto res = run_budgeted_wl1(bi, 6.0, draws);
  CHECK(static_cast<int>(res.active_order.size()) <= kappa + 1);
  CHECK(res.aggregate_value <= kappa + 1.0 + 1e-12);
}

TEST_CASE("weighted-l1 first-branch guess value") {
  // a_i = B, opt_guess = 120, log2 m = 2 (m = 4): the first branch draws
  // M = 120 * B / (60 B * 2) = 1.
  const int m = 4;
  const double B = 7.0;
  BudgetedInstance bi;
  bi.m = m;
  bi.r = 1;
  bi.inner_norms.assign(m, NormSpec::linf());
  bi.machine_budgets.assign(m, 1.0);
  // weight B per machine makes every activation weight a_i = B.
  bi.aggregate = std::make_shared<SpecAggregate>(AggregateSpec::norm_agg(
      NormSpec::weighted_l1(std::vector<double>(m, B))));
  bi.budget = B;
  bi.jobs = {Job{{0.5, 0.5, 0.5, 0.5}}};
  FirstBranchSource draws(
      std::make_unique<ConstThresholdSource>(keyed(62), 0.0));
  const auto res = run_budgeted_wl1(bi, 120.0, draws);
  REQUIRE(!res.active_order.empty());
  CHECK(res.machines[res.active_order.front()].guess == doctest::Approx(1.0));
}

TEST_CASE("threshold monotone coupling on one machine") {
  // Fix all randomness except machine 0's threshold multiplier and replay
  // over its full support: offered sets shrink and the frozen marginal does
  // not decrease as the multiplier grows.
  BudgetedInstance bi;
  bi.m = 3;
  bi.r = 1;
  bi.inner_norms.assign(3, NormSpec::linf());
  bi.machine_budgets = {1.0, 1.0, 1.0};
  bi.aggregate = std::make_shared<SpecAggregate>(AggregateSpec::sum_powers(
      2.0, std::vector<double>{1.0, 1.0, 1.0}));
  bi.budget = 16.0;
  for (int j = 0; j < 6; ++j) {
    Job job;
    job.loads = {0.3 + 0.1 * j, 0.4, 0.9};
    bi.jobs.push_back(job);
  }

  const int K = static_cast<int>(std::ceil(3 * std::log2(3.0)));
  std::vector<double> support;
  for (int k = 0; k < K; ++k) support.push_back(1.0 - static_cast<double>(k) / K);
  support.push_back(0.0);
  std::sort(support.begin(), support.end());  // increasing tau_bar

  for (std::uint64_t scenario = 0; scenario < 10; ++scenario) {
    std::vector<std::set<int>> offered_sets;
    std::vector<double> marginals;
    std::vector<bool> activated;
    for (double tau : support) {
      ForcedThresholdSource draws(keyed(1000 + scenario), 0,
                                  ThresholdDraw{tau, 0, K});
      const auto run = run_budgeted_pbounded(bi, 2.0, 4.0, draws);
      std::set<int> T;
      for (const auto& item : run.machines[0].offered_pre) T.insert(item.job);
      for (int j : run.machines[0].offered_post) T.insert(j);
      offered_sets.push_back(T);
      activated.push_back(run.machines[0].active);
      marginals.push_back(run.machines[0].frozen_marginal);
    }
    for (std::size_t t = 0; t + 1 < support.size(); ++t) {
      // higher tau_bar -> subset of offers
      CHECK(std::includes(offered_sets[t].begin(), offered_sets[t].end(),
                          offered_sets[t + 1].begin(),
                          offered_sets[t + 1].end()));
      if (activated[t + 1]) {
        CHECK(activated[t]);
        CHECK(marginals[t] <= marginals[t + 1] + 1e-12);
      }
    }
  }
}
