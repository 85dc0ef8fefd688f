#include "ogs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "ogs/json_io.hpp"
#include "ogs/oracle.hpp"

namespace ogs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.unit();
}

}  // namespace

SetCoverInstance generate_set_cover(int n, int m, double density,
                                    double cost_lo, double cost_hi, Rng& rng) {
  if (n < 1 || m < 1) throw std::invalid_argument("need n >= 1 and m >= 1");
  if (!(density > 0.0 && density <= 1.0))
    throw std::invalid_argument("density must be in (0, 1]");
  SetCoverInstance sc;
  sc.costs.resize(m);
  for (int i = 0; i < m; ++i) sc.costs[i] = uniform_in(rng, cost_lo, cost_hi);
  sc.elements.resize(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i)
      if (rng.unit() < density) sc.elements[j].push_back(i);
    if (sc.elements[j].empty())
      sc.elements[j].push_back(static_cast<int>(rng.below(m)));
  }
  return sc;
}

Instance generate_load_balancing(int n, int m, double load_lo, double load_hi,
                                 NormSpec inner, AggregateSpec aggregate,
                                 Rng& rng) {
  Instance inst;
  inst.m = m;
  inst.r = 1;
  inst.inner_norms.assign(m, std::move(inner));
  inst.aggregate = std::move(aggregate);
  inst.jobs.resize(n);
  for (int j = 0; j < n; ++j) {
    inst.jobs[j].loads.resize(m);
    for (int i = 0; i < m; ++i)
      inst.jobs[j].loads[i] = uniform_in(rng, load_lo, load_hi);
  }
  return inst;
}

Instance generate_facility_location(int n_clients, int m_facilities,
                                    double open_lo, double open_hi,
                                    double dist_lo, double dist_hi, Rng& rng) {
  Instance inst;
  inst.m = m_facilities;
  inst.r = 1;
  for (int i = 0; i < m_facilities; ++i)
    inst.inner_norms.push_back(
        NormSpec::activation_plus(uniform_in(rng, open_lo, open_hi)));
  inst.aggregate = AggregateSpec::norm_agg(NormSpec::lp(1.0));
  inst.jobs.resize(n_clients);
  for (int j = 0; j < n_clients; ++j) {
    inst.jobs[j].loads.resize(m_facilities);
    for (int i = 0; i < m_facilities; ++i)
      inst.jobs[j].loads[i] = uniform_in(rng, dist_lo, dist_hi);
  }
  return inst;
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kSetCover: return "set-cover";
    case Scenario::kLoadBalancing: return "load-balancing";
    case Scenario::kFacilityLocation: return "facility-location";
    case Scenario::kNestedNorm: return "nested-norm";
    case Scenario::kCustomFile: return "custom-file";
  }
  return "unknown";
}

Scenario scenario_from_name(const std::string& name) {
  if (name == "set-cover") return Scenario::kSetCover;
  if (name == "load-balancing") return Scenario::kLoadBalancing;
  if (name == "facility-location") return Scenario::kFacilityLocation;
  if (name == "nested-norm") return Scenario::kNestedNorm;
  if (name == "custom-file") return Scenario::kCustomFile;
  throw std::invalid_argument("unknown scenario: " + name);
}

StatSummary summarize(const std::vector<double>& values) {
  StatSummary s;
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  var = values.size() > 1 ? var / (values.size() - 1) : 0.0;
  s.stddev = std::sqrt(var);
  s.stderr_mean = s.stddev / std::sqrt(static_cast<double>(values.size()));
  return s;
}

namespace {

NormSpec parse_norm_name(const std::string& name) {
  if (name == "linf") return NormSpec::linf();
  if (name == "l1") return NormSpec::lp(1.0);
  if (name == "l2") return NormSpec::lp(2.0);
  if (name == "top2") return NormSpec::top_k(2);
  throw std::invalid_argument("unknown norm name: " + name);
}

AggregateSpec parse_aggregate_name(const std::string& name, int m) {
  if (name == "sumpow2")
    return AggregateSpec::sum_powers(2.0, std::vector<double>(m, 1.0));
  if (name == "pnormpow2") return AggregateSpec::pnorm_power(2.0);
  return AggregateSpec::norm_agg(parse_norm_name(name));
}

Instance build_nested_instance(const ExperimentConfig& config, Rng& rng) {
  const int m = config.m;
  const int blocks = std::max(1, std::min(config.blocks, m));
  Instance inst = generate_load_balancing(
      config.n, m, config.load_lo, config.load_hi,
      parse_norm_name(config.inner), AggregateSpec::norm_agg(NormSpec::linf()),
      rng);
  std::vector<std::pair<std::vector<int>, NormSpec>> block_specs;
  const int base = m / blocks;
  int extra = m % blocks;
  int at = 0;
  for (int l = 0; l < blocks; ++l) {
    const int size = base + (l < extra ? 1 : 0);
    std::vector<int> idx(size);
    std::iota(idx.begin(), idx.end(), at);
    at += size;
    block_specs.emplace_back(std::move(idx),
                             NormSpec::top_k(std::min(2, size)));
  }
  inst.aggregate = AggregateSpec::norm_agg(NormSpec::nested(
      parse_norm_name(config.aggregate), std::move(block_specs)));
  return inst;
}

TrialRecord run_set_cover_trial(const ExperimentConfig& config,
                                std::uint64_t trial_seed) {
  Rng root(trial_seed);
  Rng gen = root.child(1);
  const SetCoverInstance sc = generate_set_cover(
      config.n, config.m, config.density, config.cost_lo, config.cost_hi, gen);
  OracleLimit lim{config.oracle_limit};
  const double opt = opt_osc_cost(sc, lim);

  KeyedDrawSource draws(root.child(2));
  OscConfig oc;
  oc.alpha = config.alpha;
  oc.check_invariants = config.assert_level > 0;
  const OscRunResult res = run_osc(sc, draws, oc);

  TrialRecord rec;
  rec.seed = trial_seed;
  rec.scheduled = sc.n();
  rec.cost = res.agent_cost_sum;
  rec.opt = opt;
  rec.tau = res.agents_touched;
  rec.assertions_ok = res.all_covered;
  if (!res.all_covered) {
    rec.note = "uncovered element";
    if (config.assert_level > 0)
      throw AssertionFailure(trial_seed, "run_osc left an element uncovered");
  }
  return rec;
}

TrialRecord run_covering_trial(const ExperimentConfig& config,
                               std::uint64_t trial_seed, Instance inst) {
  OracleLimit lim{config.oracle_limit};
  Rng root(trial_seed);
  KeyedDrawSource draws(root.child(2));

  PackShape base = shape_of(inst);
  SolverConfig solver_cfg;
  solver_cfg.oracle_limit = lim;
  AgentFactory factory = [base, solver_cfg](double guess, double budget,
                                            std::unique_ptr<DrawSource> d) {
    PackShape shape = base;
    shape.budget = budget;
    return make_sched_pack_solver(shape, guess, std::move(d), solver_cfg);
  };
  PrefixCostFn hindsight = [&inst, lim](int prefix_len) {
    Instance prefix = inst;
    prefix.jobs.assign(inst.jobs.begin(), inst.jobs.begin() + prefix_len);
    return opt_gen_sched(prefix, lim).cost;
  };

  CascadeConfig cascade;
  cascade.alpha = config.alpha > 0.0 ? config.alpha : 0.25;
  cascade.subadditivity_p = inst.aggregate.subadditivity_p();
  cascade.agent_budget_factor = solver_budget_factor(base);
  cascade.check_invariants = config.assert_level > 0;

  CoverRunResult res;
  const bool norm_aggregate =
      inst.aggregate.get_if<AggregateSpec::NormAgg>() != nullptr;
  if (norm_aggregate) {
    SubsetOptFn layer_opt = [&inst, lim](std::span<const int> ids,
                                         double budget) {
      Instance sub = inst;
      sub.budget = budget;
      sub.jobs.clear();
      for (int id : ids) sub.jobs.push_back(inst.jobs[id]);
      return opt_sched_pack(sub, lim).count;
    };
    res = run_gen_sched_norm(inst, factory, hindsight, layer_opt, cascade,
                             draws);
  } else {
    res = run_gen_sched(inst, factory, hindsight, cascade, draws);
  }

  TrialRecord rec;
  rec.seed = trial_seed;
  rec.scheduled = res.assignment.placed_count();
  rec.cost = res.cost;
  rec.opt = opt_gen_sched(inst, lim).cost;
  rec.tau = norm_aggregate ? res.agents_touched : res.tau;
  rec.assertions_ok = rec.scheduled == inst.n();
  if (!rec.assertions_ok) {
    rec.note = "unscheduled job";
    if (config.assert_level > 0)
      throw AssertionFailure(trial_seed, "covering run left a job unplaced");
  }
  return rec;
}

}  // namespace

std::uint64_t trial_seed_of(std::uint64_t master_seed, int trial) {
  return Rng(master_seed).child(0x7E5700 + trial).key();
}

TrialRecord run_trial(const ExperimentConfig& config, std::uint64_t trial_seed) {
  switch (config.scenario) {
    case Scenario::kSetCover:
      return run_set_cover_trial(config, trial_seed);
    case Scenario::kLoadBalancing: {
      Rng gen = Rng(trial_seed).child(1);
      Instance inst = generate_load_balancing(
          config.n, config.m, config.load_lo, config.load_hi,
          parse_norm_name(config.inner),
          parse_aggregate_name(config.aggregate, config.m), gen);
      return run_covering_trial(config, trial_seed, std::move(inst));
    }
    case Scenario::kFacilityLocation: {
      Rng gen = Rng(trial_seed).child(1);
      Instance inst = generate_facility_location(
          config.n, config.m, config.cost_lo, config.cost_hi, config.load_lo,
          config.load_hi, gen);
      return run_covering_trial(config, trial_seed, std::move(inst));
    }
    case Scenario::kNestedNorm: {
      Rng gen = Rng(trial_seed).child(1);
      Instance inst = build_nested_instance(config, gen);
      return run_covering_trial(config, trial_seed, std::move(inst));
    }
    case Scenario::kCustomFile: {
      Instance inst = instance_from_json(read_file(config.custom_file));
      return run_covering_trial(config, trial_seed, std::move(inst));
    }
  }
  throw std::logic_error("unreachable scenario");
}

RunReport run_experiment(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  RunReport report;
  report.config = config;
  report.trials.resize(config.trials);

  const int threads = std::max(1, config.threads);
  if (threads == 1) {
    for (int t = 0; t < config.trials; ++t)
      report.trials[t] = run_trial(config, trial_seed_of(config.seed, t));
  } else {
    std::vector<std::future<void>> futures;
    std::atomic<int> next{0};
    for (int w = 0; w < threads; ++w) {
      futures.push_back(std::async(std::launch::async, [&]() {
        for (int t = next.fetch_add(1); t < config.trials;
             t = next.fetch_add(1))
          report.trials[t] = run_trial(config, trial_seed_of(config.seed, t));
      }));
    }
    for (auto& f : futures) f.get();
  }

  std::vector<double> scheduled, ratio, tau;
  for (const auto& rec : report.trials) {
    scheduled.push_back(rec.scheduled);
    tau.push_back(rec.tau);
    if (rec.opt > 0.0) ratio.push_back(rec.cost / rec.opt);
  }
  report.scheduled = summarize(scheduled);
  report.cost_ratio = summarize(ratio);
  report.tau = summarize(tau);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

namespace {

using nlohmann::json;

json config_json(const ExperimentConfig& c) {
  return json{{"scenario", scenario_name(c.scenario)},
              {"n", c.n},
              {"m", c.m},
              {"r", c.r},
              {"blocks", c.blocks},
              {"density", c.density},
              {"cost_lo", c.cost_lo},
              {"cost_hi", c.cost_hi},
              {"load_lo", c.load_lo},
              {"load_hi", c.load_hi},
              {"aggregate", c.aggregate},
              {"inner", c.inner},
              {"alpha", c.alpha},
              {"trials", c.trials},
              {"seed", c.seed},
              {"oracle_limit", c.oracle_limit},
              {"assert_level", c.assert_level},
              {"custom_file", c.custom_file}};
}

json stats_json(const StatSummary& s) {
  return json{{"mean", s.mean},
              {"stddev", s.stddev},
              {"stderr", s.stderr_mean},
              {"min", s.min},
              {"max", s.max}};
}

}  // namespace

std::string report_to_json(const RunReport& report, bool include_meta) {
  json trials = json::array();
  for (const auto& rec : report.trials) {
    trials.push_back(json{{"seed", rec.seed},
                          {"scheduled", rec.scheduled},
                          {"cost", rec.cost},
                          {"opt", rec.opt},
                          {"tau", rec.tau},
                          {"assertions_ok", rec.assertions_ok},
                          {"note", rec.note}});
  }
  json j{{"config", config_json(report.config)},
         {"trials", trials},
         {"summary",
          {{"scheduled", stats_json(report.scheduled)},
           {"cost_ratio", stats_json(report.cost_ratio)},
           {"tau", stats_json(report.tau)}}}};
  if (include_meta) j["meta"] = {{"wall_seconds", report.wall_seconds}};
  return j.dump(2);
}

std::string report_to_csv(const RunReport& report) {
  std::ostringstream out;
  out << "seed,scheduled,cost,opt,tau,assertions_ok\n";
  for (const auto& rec : report.trials) {
    out << rec.seed << ',' << rec.scheduled << ',' << rec.cost << ','
        << rec.opt << ',' << rec.tau << ',' << (rec.assertions_ok ? 1 : 0)
        << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Property suite
// ---------------------------------------------------------------------------

namespace {

std::vector<double> random_vector(Rng& rng, int size, double scale) {
  std::vector<double> x(size);
  for (double& v : x) v = scale * rng.unit();
  return x;
}

struct PropertyCheck {
  PropertySuiteResult* out;
  void fail(const std::string& msg) {
    ++out->failures;
    if (out->messages.size() < 20) out->messages.push_back(msg);
  }
  void count() { ++out->checked; }
};

std::vector<NormSpec> property_norms(Rng& rng, int dim) {
  std::vector<NormSpec> norms;
  norms.push_back(NormSpec::linf());
  norms.push_back(NormSpec::lp(1.0));
  norms.push_back(NormSpec::lp(1.0 + 2.0 * rng.unit()));
  norms.push_back(NormSpec::top_k(1 + static_cast<int>(rng.below(dim))));
  norms.push_back(NormSpec::weighted_l1(random_vector(rng, dim, 2.0)));
  {
    auto w = random_vector(rng, dim, 1.0);
    std::sort(w.begin(), w.end(), std::greater<>());
    w[0] += 0.1;
    norms.push_back(NormSpec::ordered_sym(std::move(w)));
  }
  norms.push_back(
      NormSpec::activation_plus(0.5 + rng.unit(), random_vector(rng, dim, 1.0)));
  if (dim >= 4) {
    std::vector<int> first{0, 1}, second;
    for (int i = 2; i < dim; ++i) second.push_back(i);
    norms.push_back(NormSpec::nested(
        NormSpec::lp(2.0), {{first, NormSpec::top_k(1)},
                            {second, NormSpec::lp(1.0)}}));
  }
  return norms;
}

}  // namespace

PropertySuiteResult run_property_suite(int cases_per_property,
                                       std::uint64_t seed) {
  PropertySuiteResult out;
  PropertyCheck check{&out};
  Rng rng(seed);
  const int dim = 6;

  for (int c = 0; c < cases_per_property; ++c) {
    Rng case_rng = rng.child(c);
    const auto norms = property_norms(case_rng, dim);
    const auto x = random_vector(case_rng, dim, 3.0);
    const auto y = random_vector(case_rng, dim, 3.0);
    const double lambda = 2.0 * case_rng.unit();

    for (const auto& norm : norms) {
      check.count();
      std::vector<double> sum(dim);
      for (int i = 0; i < dim; ++i) sum[i] = x[i] + y[i];
      const double nx = norm.eval(x), ny = norm.eval(y);
      if (norm.eval(sum) > nx + ny + 1e-9 * std::max(1.0, nx + ny))
        check.fail("triangle inequality failed: " + norm.kind_name());

      std::vector<double> scaled(dim);
      for (int i = 0; i < dim; ++i) scaled[i] = lambda * x[i];
      if (std::abs(norm.eval(scaled) - lambda * nx) >
          1e-9 * std::max(1.0, lambda * nx))
        check.fail("homogeneity failed: " + norm.kind_name());

      std::vector<double> dominated(dim);
      for (int i = 0; i < dim; ++i) dominated[i] = x[i] * case_rng.unit();
      if (norm.eval(dominated) > nx + 1e-9 * std::max(1.0, nx))
        check.fail("monotonicity failed: " + norm.kind_name());

      if (norm.symmetric()) {
        std::vector<double> perm = x;
        for (int i = dim - 1; i > 0; --i)
          std::swap(perm[i], perm[case_rng.below(i + 1)]);
        if (std::abs(norm.eval(perm) - nx) > 1e-12 * std::max(1.0, nx))
          check.fail("symmetry failed: " + norm.kind_name());
      }
    }

    std::vector<AggregateSpec> aggregates;
    aggregates.push_back(AggregateSpec::norm_agg(norms[2]));
    aggregates.push_back(AggregateSpec::norm_agg(norms[4]));
    aggregates.push_back(AggregateSpec::sum_powers(2.0, [&] {
      auto w = random_vector(case_rng, dim, 1.0);
      for (double& v : w) v += 0.05;
      return w;
    }()));
    aggregates.push_back(AggregateSpec::pnorm_power(3.0));

    for (const auto& agg : aggregates) {
      check.count();
      const double p = agg.subadditivity_p();
      std::vector<double> sum(dim);
      for (int i = 0; i < dim; ++i) sum[i] = x[i] + y[i];
      const double lhs = std::pow(agg.eval(sum), 1.0 / p);
      const double rhs =
          std::pow(agg.eval(x), 1.0 / p) + std::pow(agg.eval(y), 1.0 / p);
      if (lhs > rhs + 1e-9 * std::max(1.0, rhs))
        check.fail("p-subadditivity failed: " + agg.kind_name());

      if (agg.marginals_monotone()) {
        std::vector<std::uint8_t> small(dim, 0), large(dim, 0);
        for (int i = 1; i < dim; ++i) {
          large[i] = case_rng.coin() ? 1 : 0;
          small[i] = large[i] && case_rng.coin() ? 1 : 0;
        }
        const auto b = random_vector(case_rng, dim, 2.0);
        const double lo = marginal(agg, small, 0, b);
        const double hi = marginal(agg, large, 0, b);
        if (lo > hi + 1e-12 * std::max(1.0, std::abs(hi)))
          check.fail("marginal monotonicity failed: " + agg.kind_name());
      }

      check.count();
      const double budget = 0.5 + 5.0 * case_rng.unit();
      const int i = static_cast<int>(case_rng.below(dim));
      const double cap = unit_cap(agg, i, budget);
      if (cap != kInf) {
        std::vector<double> e(dim, 0.0);
        e[i] = cap;
        const double back = agg.eval(e);
        if (back < budget * (1.0 - 1e-8) || back > budget * (1.0 + 1e-8))
          check.fail("unit cap inconsistent: " + agg.kind_name());
      }
    }
  }
  return out;
}

}  // namespace ogs
