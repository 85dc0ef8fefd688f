#include "ogs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ogs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int cheapest_way(const PackItem& item) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(item.way_loads.size()); ++k)
    if (item.way_loads[k] < item.way_loads[best]) best = k;
  return best;
}

bool symmetric_fast_path(const NormSpec& norm) {
  // ActivationPlus can be symmetric but keeps the enumeration path: its
  // max/sum interplay is not covered by the sorted-prefix argument we rely
  // on for plain symmetric norms.
  if (norm.get_if<NormSpec::ActivationPlus>()) return false;
  return norm.symmetric();
}

void check_limit(double candidates, const OracleLimit& lim) {
  if (candidates > static_cast<double>(lim.max_enumeration))
    throw OracleLimitExceeded("oracle enumeration limit exceeded");
}

// Odometer over per-job options; option 0 is "skip".
template <typename Feasible>
int enumerate_best(std::span<const int> option_counts, const Feasible& feasible,
                   const OracleLimit& lim, std::vector<int>* best_choice) {
  double total = 1.0;
  for (int c : option_counts) total *= c;
  check_limit(total, lim);

  std::vector<int> choice(option_counts.size(), 0);
  int best = -1;
  while (true) {
    int count = 0;
    for (int v : choice) count += v != 0;
    if (count > best && feasible(choice)) {
      best = count;
      if (best_choice) *best_choice = choice;
    }
    int pos = 0;
    while (pos < static_cast<int>(choice.size())) {
      if (++choice[pos] < option_counts[pos]) break;
      choice[pos] = 0;
      ++pos;
    }
    if (pos == static_cast<int>(choice.size())) break;
  }
  return best;
}

}  // namespace

NormPackOpt opt_norm_pack(const NormSpec& norm, std::span<const PackItem> items,
                          double budget, int nr_dim, OracleLimit lim) {
  NormPackOpt out;
  out.ways.assign(items.size(), std::nullopt);
  if (items.empty()) return out;

  if (norm.get_if<NormSpec::LInf>()) {
    for (std::size_t t = 0; t < items.size(); ++t) {
      const int k = cheapest_way(items[t]);
      if (items[t].way_loads[k] <= budget) {
        out.ways[t] = k;
        ++out.count;
      }
    }
    return out;
  }

  if (symmetric_fast_path(norm)) {
    // Longest feasible prefix of items sorted by cheapest way. Optimal for
    // monotone symmetric norms: any feasible size-s set is dominated
    // coordinatewise (after sorting) by the s cheapest items.
    std::vector<int> order(items.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const double la = items[a].way_loads[cheapest_way(items[a])];
      const double lb = items[b].way_loads[cheapest_way(items[b])];
      if (la != lb) return la < lb;
      return items[a].job < items[b].job;
    });
    std::vector<double> loads;
    for (int t : order) {
      const int k = cheapest_way(items[t]);
      loads.push_back(items[t].way_loads[k]);
      if (norm.eval(loads) <= budget) {
        out.ways[t] = k;
        ++out.count;
      } else {
        break;
      }
    }
    return out;
  }

  // General norms: enumerate subsets and ways, positioning loads by the
  // items' original job indices.
  int max_job = 0;
  int max_ways = 1;
  for (const auto& it : items) {
    max_job = std::max(max_job, it.job);
    max_ways = std::max(max_ways, static_cast<int>(it.way_loads.size()));
  }
  const int r = max_ways;
  const int dim = nr_dim > 0 ? nr_dim : (max_job + 1) * r;

  std::vector<int> option_counts(items.size());
  for (std::size_t t = 0; t < items.size(); ++t)
    option_counts[t] = static_cast<int>(items[t].way_loads.size()) + 1;

  std::vector<double> x(dim);
  auto feasible = [&](const std::vector<int>& choice) {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t t = 0; t < choice.size(); ++t) {
      if (choice[t] == 0) continue;
      const double load = items[t].way_loads[choice[t] - 1];
      if (load == kInf) return false;
      x[static_cast<std::size_t>(items[t].job) * r + (choice[t] - 1)] = load;
    }
    return norm.eval(x) <= budget;
  };

  std::vector<int> best_choice(items.size(), 0);
  out.count = std::max(0, enumerate_best(option_counts, feasible, lim, &best_choice));
  for (std::size_t t = 0; t < items.size(); ++t)
    if (best_choice[t] != 0) out.ways[t] = best_choice[t] - 1;
  return out;
}

NormPackOpt opt_norm_pack_general(
    const std::function<double(std::span<const std::optional<int>>)>& load_of,
    std::span<const PackItem> items, double budget, OracleLimit lim) {
  NormPackOpt out;
  out.ways.assign(items.size(), std::nullopt);
  if (items.empty()) return out;

  std::vector<int> option_counts(items.size());
  for (std::size_t t = 0; t < items.size(); ++t)
    option_counts[t] = static_cast<int>(items[t].way_loads.size()) + 1;

  std::vector<std::optional<int>> ways(items.size());
  auto feasible = [&](const std::vector<int>& choice) {
    for (std::size_t t = 0; t < choice.size(); ++t)
      ways[t] = choice[t] == 0 ? std::nullopt
                               : std::optional<int>(choice[t] - 1);
    return load_of(ways) <= budget;
  };

  std::vector<int> best_choice(items.size(), 0);
  out.count = std::max(0, enumerate_best(option_counts, feasible, lim, &best_choice));
  for (std::size_t t = 0; t < items.size(); ++t)
    if (best_choice[t] != 0) out.ways[t] = best_choice[t] - 1;
  return out;
}

SchedPackResult opt_sched_pack(const Instance& inst, OracleLimit lim) {
  const int n = inst.n();
  SchedPackResult out;
  out.witness = Assignment(n, inst.m);
  if (n == 0) return out;

  // Options per job: skip, or any finite (machine, way).
  std::vector<std::vector<Placement>> finite(n);
  std::vector<int> option_counts(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < inst.m; ++i)
      for (int k = 0; k < inst.r; ++k)
        if (inst.jobs[j].load(i, k, inst.r) < kInf)
          finite[j].push_back({i, k});
    option_counts[j] = static_cast<int>(finite[j].size()) + 1;
  }

  std::vector<std::vector<double>> x(
      inst.m, std::vector<double>(static_cast<std::size_t>(n) * inst.r));
  std::vector<double> loads(inst.m);
  auto feasible = [&](const std::vector<int>& choice) {
    for (auto& xi : x) std::fill(xi.begin(), xi.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      if (choice[j] == 0) continue;
      const Placement p = finite[j][choice[j] - 1];
      x[p.machine][static_cast<std::size_t>(j) * inst.r + p.way] =
          inst.jobs[j].load(p.machine, p.way, inst.r);
    }
    for (int i = 0; i < inst.m; ++i) loads[i] = inst.inner_norms[i].eval(x[i]);
    return inst.aggregate.eval(loads) <= inst.budget;
  };

  std::vector<int> best(n, 0);
  out.count = std::max(0, enumerate_best(option_counts, feasible, lim, &best));
  for (int j = 0; j < n; ++j)
    if (best[j] != 0) out.witness.place(j, finite[j][best[j] - 1]);
  return out;
}

GenSchedResult opt_gen_sched(const Instance& inst, OracleLimit lim) {
  const int n = inst.n();
  GenSchedResult out;
  out.witness = Assignment(n, inst.m);
  if (n == 0) return out;

  std::vector<std::vector<Placement>> finite(n);
  double total = 1.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < inst.m; ++i)
      for (int k = 0; k < inst.r; ++k)
        if (inst.jobs[j].load(i, k, inst.r) < kInf)
          finite[j].push_back({i, k});
    if (finite[j].empty())
      throw InfeasibleInstance("job has no finite placement");
    total *= static_cast<double>(finite[j].size());
  }
  check_limit(total, lim);

  std::vector<int> choice(n, 0);
  std::vector<int> best_choice;
  double best = kInf;
  std::vector<std::vector<double>> x(
      inst.m, std::vector<double>(static_cast<std::size_t>(n) * inst.r));
  std::vector<double> loads(inst.m);
  while (true) {
    for (auto& xi : x) std::fill(xi.begin(), xi.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      const Placement p = finite[j][choice[j]];
      x[p.machine][static_cast<std::size_t>(j) * inst.r + p.way] =
          inst.jobs[j].load(p.machine, p.way, inst.r);
    }
    for (int i = 0; i < inst.m; ++i) loads[i] = inst.inner_norms[i].eval(x[i]);
    const double cost = inst.aggregate.eval(loads);
    if (cost < best) {
      best = cost;
      best_choice = choice;
    }
    int pos = 0;
    while (pos < n) {
      if (++choice[pos] < static_cast<int>(finite[pos].size())) break;
      choice[pos] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  out.cost = best;
  for (int j = 0; j < n; ++j) out.witness.place(j, finite[j][best_choice[j]]);
  return out;
}

SchedPackResult opt_budgeted_sched_pack(const BudgetedInstance& inst,
                                        OracleLimit lim) {
  const int n = inst.n();
  SchedPackResult out;
  out.witness = Assignment(n, inst.m);
  if (n == 0) return out;

  std::vector<std::vector<Placement>> finite(n);
  std::vector<int> option_counts(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < inst.m; ++i)
      for (int k = 0; k < inst.r; ++k)
        if (inst.jobs[j].load(i, k, inst.r) < kInf)
          finite[j].push_back({i, k});
    option_counts[j] = static_cast<int>(finite[j].size()) + 1;
  }

  std::vector<std::vector<double>> x(
      inst.m, std::vector<double>(static_cast<std::size_t>(n) * inst.r));
  std::vector<std::uint8_t> used(inst.m);
  auto feasible = [&](const std::vector<int>& choice) {
    for (auto& xi : x) std::fill(xi.begin(), xi.end(), 0.0);
    std::fill(used.begin(), used.end(), 0);
    for (int j = 0; j < n; ++j) {
      if (choice[j] == 0) continue;
      const Placement p = finite[j][choice[j] - 1];
      x[p.machine][static_cast<std::size_t>(j) * inst.r + p.way] =
          inst.jobs[j].load(p.machine, p.way, inst.r);
      used[p.machine] = 1;
    }
    // Activating exactly the used machines is optimal: f is monotone.
    for (int i = 0; i < inst.m; ++i) {
      if (!used[i]) continue;
      if (inst.inner_norms[i].eval(x[i]) > inst.machine_budgets[i]) return false;
    }
    return inst.activation_cost(used) <= inst.budget;
  };

  std::vector<int> best(n, 0);
  out.count = std::max(0, enumerate_best(option_counts, feasible, lim, &best));
  for (int j = 0; j < n; ++j)
    if (best[j] != 0) out.witness.place(j, finite[j][best[j] - 1]);
  return out;
}

int PrefixOptTracker::observe() {
  if (seen_ >= inst_.n()) throw std::logic_error("prefix tracker exhausted");
  ++seen_;
  Instance prefix = inst_;
  prefix.jobs.assign(inst_.jobs.begin(), inst_.jobs.begin() + seen_);
  const int opt = opt_sched_pack(prefix, lim_).count;
  if (opt < last_ || opt > last_ + 1)
    throw std::logic_error("prefix optimum must grow by 0 or 1 per arrival");
  last_ = opt;
  return opt;
}

namespace {

// Per-set element bitmasks; limited to 64 elements, which is far above the
// desk scale these oracles run at.
std::vector<std::uint64_t> set_masks(const SetCoverInstance& sc,
                                     std::span<const int> element_ids) {
  if (element_ids.size() > 64)
    throw OracleLimitExceeded("set-cover oracle supports up to 64 elements");
  std::vector<std::uint64_t> mask(sc.m(), 0);
  for (std::size_t t = 0; t < element_ids.size(); ++t)
    for (int i : sc.elements.at(element_ids[t])) mask[i] |= 1ull << t;
  return mask;
}

}  // namespace

double opt_osc_cost(const SetCoverInstance& sc, OracleLimit lim) {
  const int m = sc.m();
  check_limit(std::ldexp(1.0, m), lim);
  std::vector<int> all(sc.n());
  std::iota(all.begin(), all.end(), 0);
  const auto masks = set_masks(sc, all);
  const std::uint64_t want = sc.n() == 64 ? ~0ull : (1ull << sc.n()) - 1;
  double best = kInf;
  for (std::uint64_t fam = 0; fam < (1ull << m); ++fam) {
    std::uint64_t cov = 0;
    double cost = 0.0;
    for (int i = 0; i < m; ++i)
      if (fam >> i & 1) {
        cov |= masks[i];
        cost += sc.costs[i];
      }
    if ((cov & want) == want) best = std::min(best, cost);
  }
  if (best == kInf) throw InfeasibleInstance("set cover instance infeasible");
  return best;
}

int opt_obcm_subset(const SetCoverInstance& sc, double budget,
                    std::span<const int> element_ids, OracleLimit lim) {
  const int m = sc.m();
  check_limit(std::ldexp(1.0, m), lim);
  const auto masks = set_masks(sc, element_ids);
  int best = 0;
  for (std::uint64_t fam = 0; fam < (1ull << m); ++fam) {
    std::uint64_t cov = 0;
    double cost = 0.0;
    for (int i = 0; i < m; ++i)
      if (fam >> i & 1) {
        cov |= masks[i];
        cost += sc.costs[i];
      }
    if (cost <= budget) best = std::max(best, std::popcount(cov));
  }
  return best;
}

int opt_obcm(const SetCoverInstance& sc, double budget, OracleLimit lim) {
  std::vector<int> all(sc.n());
  std::iota(all.begin(), all.end(), 0);
  return opt_obcm_subset(sc, budget, all, lim);
}

}  // namespace ogs
