// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Tolerances and thresholds are pinned in code; statistical criteria carry
// three standard errors of slack, per-realization criteria allow zero
// violations.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ogs/budgeted_pack.hpp"
#include "ogs/cover_reduction.hpp"
#include "ogs/harness.hpp"
#include "ogs/json_io.hpp"
#include "ogs/oracle.hpp"
#include "ogs/pack_reductions.hpp"

using namespace ogs;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Criterion {
  std::string name;
  std::function<bool(std::string&)> run;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double var = 0.0;
  for (double x : v) var += (x - m) * (x - m);
  return std::sqrt(var / (v.size() - 1) / v.size());
}

// ---------------------------------------------------------------------------
// Shared suite pieces
// ---------------------------------------------------------------------------

struct ObcmTrial {
  double budget = 0.0;
  int opt_obcm = 0;
  ObcmResult raw;
  double wrapped_cost = 0.0;
};

ObcmTrial run_obcm_trial(std::uint64_t seed) {
  Rng root(seed);
  Rng gen = root.child(1);
  const SetCoverInstance sc = generate_set_cover(30, 8, 0.4, 1.0, 4.0, gen);
  ObcmTrial trial;
  trial.budget = opt_osc_cost(sc);
  trial.opt_obcm = opt_obcm(sc, trial.budget);
  KeyedDrawSource draws(root.child(2));
  trial.raw = run_obcm(sc, trial.budget, trial.opt_obcm, draws);
  KeyedDrawSource coin(root.child(3));
  trial.wrapped_cost =
      budget_wrapper_obcm(trial.raw, sc.costs, coin).active_cost;
  return trial;
}

// Budgeted schedule-packing instance family for the Algorithm-2 criteria:
// four machines (sometimes two originals with two budget copies, giving
// genuinely dynamic marginals), mixed inner norms.
BudgetedInstance make_bsp_instance(std::uint64_t seed, double p) {
  Rng r(seed);
  BudgetedInstance bi;
  bi.m = 4;
  bi.r = 1;
  bi.inner_norms = {NormSpec::linf(), NormSpec::ordered_sym({1.0, 0.5}),
                    NormSpec::top_k(2), NormSpec::lp(1.0)};
  bi.machine_budgets.resize(4);
  for (double& b : bi.machine_budgets) b = 0.5 + 1.5 * r.unit();

  const int flavor = static_cast<int>(r.below(3));
  if (flavor == 0) {
    std::vector<double> w(4);
    for (double& v : w) v = 0.5 + r.unit();
    bi.aggregate =
        std::make_shared<SpecAggregate>(AggregateSpec::sum_powers(p, w));
  } else if (flavor == 1) {
    bi.aggregate =
        std::make_shared<SpecAggregate>(AggregateSpec::pnorm_power(p));
  } else {
    // Two originals, two copies each: marginals grow as copies activate.
    std::vector<double> w(2);
    for (double& v : w) v = 0.5 + r.unit();
    bi.aggregate = std::make_shared<GroupedAggregate>(
        AggregateSpec::sum_powers(p, w), std::vector<int>{0, 0, 1, 1}, 2);
  }

  // Budget above the largest solo activation most of the time.
  double max_solo = 0.0;
  std::vector<double> probe(4, 0.0);
  for (int i = 0; i < 4; ++i) {
    probe[i] = bi.machine_budgets[i];
    max_solo = std::max(max_solo, bi.aggregate->eval(probe));
    probe[i] = 0.0;
  }
  bi.budget = max_solo * (0.8 + 1.4 * r.unit());

  const int n = 8;
  for (int j = 0; j < n; ++j) {
    Job job;
    for (int i = 0; i < 4; ++i) {
      const double v = 0.1 + 1.4 * r.unit();
      job.loads.push_back(r.unit() < 0.1 ? kInf : v);
    }
    bi.jobs.push_back(job);
  }
  return bi;
}

std::vector<PackItem> machine_items(const BudgetedInstance& bi,
                                    const MachineState& st, int machine) {
  std::vector<PackItem> items = st.offered_pre;
  for (int j : st.offered_post) {
    PackItem item;
    item.job = j;
    item.way_loads.assign(
        bi.jobs[j].loads.begin() + static_cast<std::size_t>(machine) * bi.r,
        bi.jobs[j].loads.begin() + static_cast<std::size_t>(machine) * bi.r +
            bi.r);
    items.push_back(std::move(item));
  }
  return items;
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

// Shared OBCM suite (criteria 1-3 reuse the same 2000 runs).
std::vector<ObcmTrial>& obcm_suite() {
  static std::vector<ObcmTrial> suite = [] {
    std::vector<ObcmTrial> trials;
    trials.reserve(2000);
    for (int t = 0; t < 2000; ++t)
      trials.push_back(run_obcm_trial(Rng(11000).child(t).key()));
    return trials;
  }();
  return suite;
}

bool criterion1(std::string& detail) {
  int violations = 0;
  int applicable = 0;
  for (const auto& trial : obcm_suite()) {
    if (trial.raw.active_cost < trial.budget) {
      ++applicable;
      if (2 * trial.raw.covered_count < trial.opt_obcm) ++violations;
    }
  }
  std::ostringstream os;
  os << "2000 runs, " << applicable << " with final cost < B, " << violations
     << " violations";
  detail = os.str();
  return violations == 0;
}

bool criterion2(std::string& detail) {
  // mean(covered - OPT_OBCM / (17 log2 m)) >= -3 SE, m = 8.
  const double denom = 17.0 * std::log2(8.0);
  std::vector<double> diffs;
  for (const auto& trial : obcm_suite())
    diffs.push_back(trial.raw.covered_count - trial.opt_obcm / denom);
  const double mean = mean_of(diffs);
  const double se = stderr_of(diffs);
  std::ostringstream os;
  os << "mean slack " << mean << " vs -3se " << -3.0 * se;
  detail = os.str();
  return mean >= -3.0 * se;
}

bool criterion3(std::string& detail) {
  int violations = 0;
  int runs = 0;

  // Wrapped coverage engine: cost within the declared budget.
  for (const auto& trial : obcm_suite()) {
    ++runs;
    if (trial.wrapped_cost > trial.budget * (1.0 + 1e-9)) ++violations;
  }

  // Wrapped budgeted packing engine: aggregate within s^p B.
  for (int t = 0; t < 400; ++t) {
    Rng root = Rng(12000).child(t);
    const double p = t % 2 == 0 ? 1.0 : 2.0;
    const BudgetedInstance bi = make_bsp_instance(root.key(), p);
    const int opt = opt_budgeted_sched_pack(bi).count;
    KeyedDrawSource draws(root.child(1));
    const auto run = run_budgeted_pbounded(bi, p, opt, draws);
    KeyedDrawSource coin(root.child(2));
    const auto wrapped =
        budget_wrapper(run.assignment, run.active_order, run.violator, coin);
    const double guard = std::pow(p, p) * bi.budget;
    ++runs;
    if (bi.activation_cost(wrapped.activations()) > guard * (1.0 + 1e-9))
      ++violations;
  }

  // Wrapped reduction paths: original aggregate within the path factor.
  Rng rng(13000);
  for (int t = 0; t < 300; ++t) {
    Rng r = rng.child(t);
    const int m = 2 + static_cast<int>(r.below(2));
    Instance inst;
    inst.m = m;
    inst.r = 1;
    inst.inner_norms.assign(m, NormSpec::linf());
    inst.budget = 1.0 + 2.0 * r.unit();
    switch (t % 5) {
      case 0:
        inst.aggregate = AggregateSpec::pnorm_power(2.0);
        break;
      case 1:
        inst.aggregate = AggregateSpec::norm_agg(
            NormSpec::weighted_l1(std::vector<double>(m, 0.5 + r.unit())));
        break;
      case 2:
        inst.aggregate = AggregateSpec::norm_agg(NormSpec::lp(2.0));
        break;
      case 3:
        inst.aggregate = AggregateSpec::norm_agg(NormSpec::top_k(2));
        break;
      default:
        inst.aggregate = AggregateSpec::norm_agg(NormSpec::linf());
        break;
    }
    for (int j = 0; j < 6; ++j) {
      Job job;
      for (int i = 0; i < m; ++i) job.loads.push_back(0.2 + r.unit());
      inst.jobs.push_back(job);
    }
    const double factor = solver_budget_factor(shape_of(inst));
    const auto run = solve_sched_pack(
        inst, 2.0, std::make_unique<KeyedDrawSource>(r.child(1)));
    ++runs;
    if (run.aggregate_load > factor * inst.budget * (1.0 + 1e-9))
      ++violations;
  }

  std::ostringstream os;
  os << runs << " wrapped runs, " << violations << " budget violations";
  detail = os.str();
  return violations == 0;
}

bool criterion4(std::string& detail) {
  int violations = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    Rng root = Rng(14000).child(t);
    const double p = t % 2 == 0 ? 1.0 : 2.0;
    const BudgetedInstance bi = make_bsp_instance(root.key(), p);
    const double opt = opt_budgeted_sched_pack(bi).count;
    KeyedDrawSource draws(root.child(1));
    const auto run = run_budgeted_pbounded(bi, /*s=*/p, opt, draws);

    const double guard = std::pow(p, p) * bi.budget;
    double rhs = run.scheduled;
    for (int i : run.active_order) {
      const auto items = machine_items(bi, run.machines[i], i);
      const int opt_i =
          opt_norm_pack(bi.inner_norms[i], items, bi.machine_budgets[i])
              .count;
      const double first =
          guard > 0.0 ? opt * run.machines[i].frozen_marginal / guard : 0.0;
      rhs += std::max(first, static_cast<double>(opt_i));
    }
    if (0.9 * opt > rhs * (1.0 + 1e-9) + 1e-9) ++violations;
    // At most one overshoot, and only as the final activation.
    if (run.violator && *run.violator != run.active_order.back()) ++violations;
    // Inner-solver contract: realized machine load within c * b_i.
    for (int i = 0; i < bi.m; ++i) {
      std::vector<double> x(static_cast<std::size_t>(bi.n()) * bi.r, 0.0);
      for (int j = 0; j < bi.n(); ++j) {
        const auto& pl = run.assignment.placement(j);
        if (pl && pl->machine == i)
          x[static_cast<std::size_t>(j) * bi.r + pl->way] =
              bi.jobs[j].load(i, pl->way, bi.r);
      }
      const double load = bi.inner_norms[i].eval(x);
      const double c = inner_solver_guarantee(bi.inner_norms[i]).violation;
      if (load > c * bi.machine_budgets[i] * (1.0 + 1e-9)) ++violations;
    }
  }
  std::ostringstream os;
  os << trials << " runs (p in {1,2}, s = p), " << violations << " violations";
  detail = os.str();
  return violations == 0;
}

bool criterion5(std::string& detail) {
  int violations = 0;
  const int scenarios = 200;
  for (int sc = 0; sc < scenarios; ++sc) {
    Rng root = Rng(15000).child(sc);
    const double p = sc % 2 == 0 ? 1.0 : 2.0;
    const BudgetedInstance bi = make_bsp_instance(root.key(), p);
    const int machine = static_cast<int>(root.below(bi.m));
    const int granularity =
        static_cast<int>(std::ceil(3.0 * std::log2(bi.m)));

    std::vector<double> support;
    for (int k = 0; k < granularity; ++k)
      support.push_back(1.0 - static_cast<double>(k) / granularity);
    support.push_back(0.0);
    std::sort(support.begin(), support.end());

    std::vector<std::set<int>> offered;
    std::vector<bool> active;
    std::vector<double> marginals;
    for (double tau : support) {
      ForcedThresholdSource draws(
          std::make_unique<KeyedDrawSource>(root.child(1)), machine,
          ThresholdDraw{tau, 0, granularity});
      const auto run = run_budgeted_pbounded(bi, p, /*opt_guess=*/4.0, draws);
      std::set<int> T;
      for (const auto& item : run.machines[machine].offered_pre)
        T.insert(item.job);
      for (int j : run.machines[machine].offered_post) T.insert(j);
      offered.push_back(std::move(T));
      active.push_back(run.machines[machine].active);
      marginals.push_back(run.machines[machine].frozen_marginal);
    }
    for (std::size_t i = 0; i + 1 < support.size(); ++i) {
      if (!std::includes(offered[i].begin(), offered[i].end(),
                         offered[i + 1].begin(), offered[i + 1].end()))
        ++violations;
      if (active[i + 1] && !active[i]) ++violations;
      if (active[i + 1] && active[i] &&
          marginals[i] > marginals[i + 1] + 1e-12)
        ++violations;
    }
  }
  std::ostringstream os;
  os << scenarios << " scenarios, full threshold support, " << violations
     << " violations";
  detail = os.str();
  return violations == 0;
}

bool criterion6(std::string& detail) {
  int violations = 0;
  const int per_solver = 5000;
  Rng rng(16000);

  // LInf: exact match with the offline optimum.
  for (int t = 0; t < per_solver; ++t) {
    Rng r = rng.child(t);
    const int n = 1 + static_cast<int>(r.below(10));
    const double budget = 2.0 * r.unit();
    auto solver = make_linf_solver(budget);
    std::vector<PackItem> items;
    for (int j = 0; j < n; ++j) {
      std::vector<double> ways{2.0 * r.unit(), 2.0 * r.unit()};
      Offer offer{ways, {}};
      solver->offer(offer);
      items.push_back(PackItem{j, ways});
    }
    if (solver->accepted() !=
        opt_norm_pack(NormSpec::linf(), items, budget).count)
      ++violations;
  }

  // Symmetric: accepted >= ceil(M)/3 and load <= B, deterministically.
  const NormSpec sym_norms[] = {NormSpec::lp(1.0), NormSpec::lp(2.0),
                                NormSpec::top_k(2),
                                NormSpec::ordered_sym({1.0, 0.6, 0.3, 0.1})};
  Rng rng2(16500);
  for (int t = 0; t < per_solver; ++t) {
    Rng r = rng2.child(t);
    const NormSpec& norm = sym_norms[r.below(4)];
    const int n = 2 + static_cast<int>(r.below(9));
    const double budget = 1.0 + 4.0 * r.unit();
    std::vector<PackItem> items;
    for (int j = 0; j < n; ++j) items.push_back(PackItem{j, {2.5 * r.unit()}});
    const int opt = opt_norm_pack(norm, items, budget).count;
    if (opt == 0) continue;
    const double guess = opt * (0.25 + 0.75 * r.unit());  // M <= OPT
    auto solver = make_symmetric_solver(norm, budget, guess);
    for (const auto& item : items) {
      Offer offer{item.way_loads, {}};
      solver->offer(offer);
    }
    if (solver->load() > budget * (1.0 + 1e-12)) ++violations;
    if (solver->accepted() < std::ceil(guess) / 3.0 - 1e-9) ++violations;
  }

  // Activation norm: accepted >= ceil(M)/3 and load <= 2B.
  Rng rng3(16900);
  for (int t = 0; t < per_solver; ++t) {
    Rng r = rng3.child(t);
    const double c = 0.5 + r.unit();
    const int n = 2 + static_cast<int>(r.below(8));
    const double budget = 1.0 + 4.0 * r.unit();
    std::vector<double> loads(n), weights(n);
    for (int j = 0; j < n; ++j) {
      loads[j] = 2.0 * r.unit();
      weights[j] = r.unit();
    }
    std::vector<PackItem> items;
    for (int j = 0; j < n; ++j) items.push_back(PackItem{j, {loads[j]}});
    const int opt =
        opt_norm_pack(NormSpec::activation_plus(c, weights), items, budget, n)
            .count;
    if (opt == 0) continue;
    const double guess = opt * (0.25 + 0.75 * r.unit());
    auto solver = make_activation_solver(c, budget, guess);
    for (int j = 0; j < n; ++j) {
      std::vector<double> l{loads[j]}, w{weights[j]};
      Offer offer{l, w};
      solver->offer(offer);
    }
    if (solver->load() > 2.0 * budget * (1.0 + 1e-12)) ++violations;
    if (solver->accepted() < std::ceil(guess) / 3.0 - 1e-9) ++violations;
  }

  std::ostringstream os;
  os << 3 * per_solver << " instances, " << violations << " violations";
  detail = os.str();
  return violations == 0;
}

bool criterion7(std::string& detail) {
  int violations = 0;
  int cases = 0;
  for (int pi = 1; pi <= 3; ++pi) {
    for (int k = 1; k <= 3; ++k) {
      Rng rng(17000 + 10 * pi + k);
      for (int t = 0; t < 10000; ++t) {
        Rng r = rng.child(t);
        const double p = pi;
        const int m = 2 + static_cast<int>(r.below(3));
        const int copies = 3;
        const double budget = 0.5 + 4.0 * r.unit();
        std::vector<double> sums(m, 0.0);
        double big = 0.0;
        bool ok = true;
        for (int i = 0; i < m; ++i) {
          const double cap = budget * (0.25 + 2.0 * r.unit());
          double lin = 0.0, pow_sum = 0.0;
          for (int l = 0; l < copies; ++l) {
            const double b = cap * std::ldexp(1.0, -(l + 1));
            if (!r.coin()) continue;
            lin += b;
            pow_sum += std::pow(b, p);
            sums[i] += b;
            if (b > 3.0 * budget / k) big += b;
          }
          const double mid = std::pow(lin, p);
          if (pow_sum > mid + 1e-9 * std::max(1.0, mid)) ok = false;
          if (mid > std::pow(2.0, p) * pow_sum + 1e-9 * std::max(1.0, pow_sum))
            ok = false;
        }
        const double topk = NormSpec::top_k(k).eval(sums);
        if (std::min(big, 3.0 * budget) > topk + 1e-9 * std::max(1.0, topk))
          ok = false;
        if (topk > big + 6.0 * budget + 1e-9) ok = false;
        ++cases;
        if (!ok) ++violations;
      }
    }
  }
  std::ostringstream os;
  os << cases << " random activation vectors, " << violations << " violations";
  detail = os.str();
  return violations == 0;
}

namespace orderings {

struct Family {
  Instance inst;
  std::string label;
};

// Orderings checked for one schedule-packing instance; returns violations.
int check_orderings(const Instance& base, Rng& r) {
  int violations = 0;
  const int m = base.m;
  const double budget = base.budget;

  // (a) Lp outer on the power scale: OPT(copies) >= OPT(SP) and
  //     OPT(l1-relaxed copies) >= OPT(copies).
  {
    const double p = 2.0;
    Instance lp_inst = base;
    lp_inst.aggregate = AggregateSpec::norm_agg(NormSpec::lp(p));
    const int sp = opt_sched_pack(lp_inst).count;
    Instance pow_inst = lp_inst;
    pow_inst.aggregate = AggregateSpec::pnorm_power(p);
    pow_inst.budget = std::pow(budget, p);
    const auto copies = reduce_to_copies(pow_inst, p);
    const int bsp = opt_budgeted_sched_pack(copies.instance).count;
    if (bsp < sp) ++violations;

    BudgetedInstance relaxed = copies.instance;
    std::vector<double> w(copies.plan.total());
    for (int t = 0; t < copies.plan.total(); ++t)
      w[t] = std::pow(copies.plan.budgets[t], p - 1.0);
    relaxed.aggregate = std::make_shared<SpecAggregate>(
        AggregateSpec::norm_agg(NormSpec::weighted_l1(w)));
    relaxed.budget = std::pow(3.0 * budget, p);
    if (opt_budgeted_sched_pack(relaxed).count < bsp) ++violations;
  }

  // (b) Top-k outer: OPT(copies) >= OPT(SP), OPT(l1-relaxed) >= OPT(copies).
  {
    const int k = 2;
    Instance tk_inst = base;
    tk_inst.aggregate = AggregateSpec::norm_agg(NormSpec::top_k(k));
    const int sp = opt_sched_pack(tk_inst).count;
    const auto copies = reduce_to_copies(tk_inst, 1.0);
    const int bsp = opt_budgeted_sched_pack(copies.instance).count;
    if (bsp < sp) ++violations;

    BudgetedInstance relaxed = copies.instance;
    std::vector<double> w(copies.plan.total());
    for (int t = 0; t < copies.plan.total(); ++t)
      w[t] = copies.plan.budgets[t] > 3.0 * budget / k ? 1.0 : 0.0;
    relaxed.aggregate = std::make_shared<SpecAggregate>(
        AggregateSpec::norm_agg(NormSpec::weighted_l1(w)));
    relaxed.budget = 3.0 * budget;
    if (opt_budgeted_sched_pack(relaxed).count < bsp) ++violations;
  }

  // (c) Symmetric uniform-budget family dominates the optimum.
  {
    Instance sym_inst = base;
    sym_inst.aggregate = AggregateSpec::norm_agg(NormSpec::top_k(2));
    const int sp = opt_sched_pack(sym_inst).count;
    int family_total = 0;
    for (double bar_b :
         symmetric_budget_candidates(NormSpec::top_k(2), m, budget)) {
      BudgetedInstance bi;
      bi.m = m;
      bi.r = base.r;
      bi.inner_norms = base.inner_norms;
      bi.machine_budgets.assign(m, bar_b);
      bi.aggregate = std::make_shared<SpecAggregate>(
          AggregateSpec::norm_agg(NormSpec::top_k(2)));
      bi.budget = 2.0 * budget;
      bi.jobs = base.jobs;
      family_total += opt_budgeted_sched_pack(bi).count;
    }
    if (family_total < sp) ++violations;
  }
  (void)r;
  return violations;
}

}  // namespace orderings

bool criterion8(std::string& detail) {
  int violations = 0;
  int instances = 0;
  Rng rng(18000);

  // Exhaustive small family: every (n, m, r) cell with a deterministic
  // load pattern plus a seeded one.
  for (int n = 1; n <= 4; ++n)
    for (int m = 1; m <= 3; ++m)
      for (int r = 1; r <= 2; ++r)
        for (int variant = 0; variant < 2; ++variant) {
          Instance inst;
          inst.m = m;
          inst.r = r;
          inst.inner_norms.assign(m, NormSpec::linf());
          inst.budget = 1.0 + 0.5 * variant + 0.25 * n;
          for (int j = 0; j < n; ++j) {
            Job job;
            for (int i = 0; i < m * r; ++i)
              job.loads.push_back(0.2 +
                                  0.37 * ((j * 7 + i * 3 + variant) % 5));
            inst.jobs.push_back(job);
          }
          Rng r2 = rng.child(instances);
          violations += orderings::check_orderings(inst, r2);
          ++instances;
        }

  // 500 random instances.
  for (int t = 0; t < 500; ++t) {
    Rng r = rng.child(100000 + t);
    Instance inst;
    inst.m = 2 + static_cast<int>(r.below(2));
    inst.r = 1 + static_cast<int>(r.below(2));
    inst.inner_norms.assign(inst.m,
                            r.coin() ? NormSpec::linf() : NormSpec::lp(1.0));
    inst.budget = 0.8 + 2.0 * r.unit();
    const int n = 1 + static_cast<int>(r.below(4));
    for (int j = 0; j < n; ++j) {
      Job job;
      for (int i = 0; i < inst.m * inst.r; ++i)
        job.loads.push_back(0.2 + r.unit());
      inst.jobs.push_back(job);
    }
    violations += orderings::check_orderings(inst, r);
    ++instances;
  }

  std::ostringstream os;
  os << instances << " instances x 6 orderings, " << violations
     << " violations";
  detail = os.str();
  return violations == 0;
}

bool criterion9(std::string& detail) {
  const int trials = 1000;
  int covered_failures = 0;
  int placed_failures = 0;
  std::vector<double> taus;
  int tau_over_8 = 0;

  // run_osc: layered machinery, completeness.
  for (int t = 0; t < trials; ++t) {
    Rng root = Rng(19000).child(t);
    Rng gen = root.child(1);
    const SetCoverInstance sc = generate_set_cover(12, 6, 0.4, 1.0, 4.0, gen);
    KeyedDrawSource draws(root.child(2));
    const auto res = run_osc(sc, draws);
    if (!res.all_covered) ++covered_failures;
  }

  // run_gen_sched: the agent cascade, completeness and the tau tail.
  for (int t = 0; t < trials; ++t) {
    Rng root = Rng(19500).child(t);
    Rng gen = root.child(1);
    const SetCoverInstance sc = generate_set_cover(12, 6, 0.4, 1.0, 4.0, gen);
    const Instance encoded = osc_to_gensched(sc);
    AgentFactory factory = [&sc](double guess, double budget,
                                 std::unique_ptr<DrawSource> d) {
      return make_obcm_agent(sc.costs, budget, guess, std::move(d));
    };
    PrefixCostFn hindsight = [&sc](int prefix_len) {
      SetCoverInstance prefix{
          sc.costs, {sc.elements.begin(), sc.elements.begin() + prefix_len}};
      return opt_osc_cost(prefix);
    };
    CascadeConfig config;
    config.alpha = std::min(1.0, 1.0 / (17.0 * std::log2(6.0)));
    KeyedDrawSource draws(root.child(2));
    const auto res =
        run_gen_sched(encoded, factory, hindsight, config, draws);
    if (res.assignment.placed_count() != encoded.n()) ++placed_failures;
    taus.push_back(res.tau);
    if (res.tau > 8) ++tau_over_8;
  }

  const double tau_mean = mean_of(taus);
  const double tail = static_cast<double>(tau_over_8) / trials;
  const double bound = std::exp(-3.0 * 8.0 / 28.0);
  const double slack = 3.0 * std::sqrt(bound * (1.0 - bound) / trials);

  std::ostringstream os;
  os << "uncovered=" << covered_failures << " unplaced=" << placed_failures
     << " tau mean=" << tau_mean << " P(tau>8)=" << tail << " bound "
     << bound + slack;
  detail = os.str();
  return covered_failures == 0 && placed_failures == 0 && tau_mean <= 4.0 &&
         tail <= bound + slack;
}

bool criterion10(std::string& detail) {
  const int trials = 1000;
  const int n = 10, m = 5;
  const double alpha = std::min(1.0, 1.0 / (17.0 * std::log2(5.0)));
  const double shrink = 1.0 - alpha / 4.0;

  std::vector<std::vector<double>> residuals;  // residuals[k][trial]
  for (int t = 0; t < trials; ++t) {
    Rng root = Rng(20000).child(t);
    Rng gen = root.child(1);
    const SetCoverInstance sc = generate_set_cover(n, m, 0.4, 1.0, 4.0, gen);
    OscConfig config;
    config.fixed_estimate = opt_osc_cost(sc);
    config.measure_residuals = true;
    KeyedDrawSource draws(root.child(2));
    const auto res = run_osc(sc, draws, config);
    if (residuals.empty()) residuals.resize(res.layer_residuals.size());
    for (std::size_t k = 0; k < res.layer_residuals.size(); ++k)
      residuals[k].push_back(res.layer_residuals[k]);
  }

  int violations = 0;
  double worst_gap = -1e9;
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    const double target = n * std::pow(shrink, static_cast<double>(k));
    const double bound = shrink * target + 3.0 * stderr_of(residuals[k]);
    const double mean = mean_of(residuals[k]);
    if (mean > bound) ++violations;
    worst_gap = std::max(worst_gap, mean - bound);
  }
  std::ostringstream os;
  os << residuals.size() << " layers x " << trials << " trials, "
     << violations << " layer violations (worst slack " << worst_gap << ")";
  detail = os.str();
  return violations == 0;
}

bool criterion11(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const auto result = run_property_suite(10000, 21000);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::ostringstream os;
  os << result.checked << " checks, " << result.failures << " failures, "
     << secs << "s";
  detail = os.str();
  return result.failures == 0 && secs <= 30.0;
}

bool criterion12(std::string& detail) {
  ExperimentConfig config;
  config.scenario = Scenario::kSetCover;
  config.n = 10;
  config.m = 5;
  config.trials = 40;
  config.seed = 20260810;

  const RunReport a = run_experiment(config);
  const RunReport b = run_experiment(config);
  const bool same_json = report_to_json(a, false) == report_to_json(b, false);
  const bool same_csv = report_to_csv(a) == report_to_csv(b);

  ExperimentConfig parallel = config;
  parallel.threads = 4;
  const RunReport c = run_experiment(parallel);
  bool parallel_same = c.trials.size() == a.trials.size();
  for (std::size_t t = 0; parallel_same && t < a.trials.size(); ++t)
    parallel_same = a.trials[t].seed == c.trials[t].seed &&
                    a.trials[t].cost == c.trials[t].cost &&
                    a.trials[t].scheduled == c.trials[t].scheduled;

  detail = std::string("json ") + (same_json ? "identical" : "DIFFERS") +
           ", csv " + (same_csv ? "identical" : "DIFFERS") + ", parallel " +
           (parallel_same ? "identical" : "DIFFERS");
  return same_json && same_csv && parallel_same;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"C1 coverage engine per-realization lower bound", criterion1},
      {"C2 coverage engine statistical lower bound", criterion2},
      {"C3 budget wrapper feasibility", criterion3},
      {"C4 activation-run optimum upper bound", criterion4},
      {"C5 threshold monotone coupling", criterion5},
      {"C6 single-machine solver guarantees", criterion6},
      {"C7 power/top-k relaxation sandwiches", criterion7},
      {"C8 relaxation optimum orderings", criterion8},
      {"C9 covering completeness and cascade length", criterion9},
      {"C10 layered residual contraction", criterion10},
      {"C11 norm and aggregate property suite", criterion11},
      {"C12 bit-exact reproducibility", criterion12},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL",
                criterion.name.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
