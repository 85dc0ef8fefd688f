#include "ogs/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ogs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Weighted product with the 0 * inf = 0 convention.
double wmul(double w, double v) {
  if (w == 0.0 || v == 0.0) return 0.0;
  return w * v;
}

std::vector<double> sorted_desc(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

bool uniform(const std::vector<double>& w) {
  for (double v : w)
    if (v != w.front()) return false;
  return true;
}

[[noreturn]] void dim_error(const char* what) {
  throw std::invalid_argument(std::string("dimension mismatch: ") + what);
}

}  // namespace

NormSpec NormSpec::linf() { return NormSpec(LInf{}); }

NormSpec NormSpec::lp(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("Lp requires p >= 1");
  return NormSpec(Lp{p});
}

NormSpec NormSpec::top_k(int k) {
  if (k < 1) throw std::invalid_argument("TopK requires k >= 1");
  return NormSpec(TopK{k});
}

NormSpec NormSpec::weighted_l1(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("WeightedL1 needs weights");
  for (double w : weights)
    if (!(w >= 0.0)) throw std::invalid_argument("WeightedL1 weights must be >= 0");
  return NormSpec(WeightedL1{std::move(weights)});
}

NormSpec NormSpec::ordered_sym(std::vector<double> w) {
  if (w.empty() || !(w.front() > 0.0))
    throw std::invalid_argument("OrderedSym requires w[0] > 0");
  for (std::size_t t = 0; t < w.size(); ++t) {
    if (!(w[t] >= 0.0))
      throw std::invalid_argument("OrderedSym weights must be >= 0");
    if (t > 0 && w[t] > w[t - 1])
      throw std::invalid_argument("OrderedSym weights must be nonincreasing");
  }
  return NormSpec(OrderedSym{std::move(w)});
}

NormSpec NormSpec::activation_plus(double activation_cost,
                                   std::vector<double> weights) {
  if (!(activation_cost >= 0.0))
    throw std::invalid_argument("activation cost must be >= 0");
  for (double w : weights)
    if (!(w >= 0.0))
      throw std::invalid_argument("ActivationPlus weights must be >= 0");
  return NormSpec(ActivationPlus{activation_cost, std::move(weights)});
}

NormSpec NormSpec::nested(
    NormSpec outer, std::vector<std::pair<std::vector<int>, NormSpec>> blocks) {
  if (blocks.empty()) throw std::invalid_argument("Nested needs blocks");
  Nested n;
  n.outer = std::make_shared<const NormSpec>(std::move(outer));
  int dim = 0;
  for (auto& [idx, inner] : blocks) {
    dim += static_cast<int>(idx.size());
    n.blocks.push_back(idx);
    n.inners.push_back(std::make_shared<const NormSpec>(std::move(inner)));
  }
  // Blocks must partition [0, dim): disjoint and jointly covering.
  std::vector<char> seen(dim, 0);
  for (const auto& idx : n.blocks) {
    for (int i : idx) {
      if (i < 0 || i >= dim || seen[i])
        throw std::invalid_argument("Nested blocks must partition coordinates");
      seen[i] = 1;
    }
  }
  n.dimension = dim;
  if (n.outer->dimension() >= 0 &&
      n.outer->dimension() != static_cast<int>(n.blocks.size()))
    throw std::invalid_argument("Nested outer norm dimension mismatch");
  return NormSpec(std::move(n));
}

double NormSpec::eval(std::span<const double> x) const {
  for (double v : x)
    if (std::isnan(v) || v < 0.0)
      throw std::invalid_argument("norm input must be nonnegative");
  if (dimension() >= 0 && static_cast<int>(x.size()) != dimension())
    dim_error("norm eval");

  struct Visitor {
    std::span<const double> x;

    double operator()(const LInf&) const {
      double m = 0.0;
      for (double v : x) m = std::max(m, v);
      return m;
    }
    double operator()(const Lp& s) const {
      // Sum in sorted order so the result depends only on the multiset of
      // entries, not on caller ordering.
      auto vals = sorted_desc(x);
      double acc = 0.0;
      for (auto it = vals.rbegin(); it != vals.rend(); ++it) {
        if (*it == kInf) return kInf;
        acc += std::pow(*it, s.p);
      }
      return std::pow(acc, 1.0 / s.p);
    }
    double operator()(const TopK& s) const {
      auto vals = sorted_desc(x);
      double acc = 0.0;
      const int k = std::min<int>(s.k, static_cast<int>(vals.size()));
      for (int t = 0; t < k; ++t) acc += vals[t];
      return acc;
    }
    double operator()(const WeightedL1& s) const {
      double acc = 0.0;
      for (std::size_t t = 0; t < x.size(); ++t) acc += wmul(s.weights[t], x[t]);
      return acc;
    }
    double operator()(const OrderedSym& s) const {
      auto vals = sorted_desc(x);
      double acc = 0.0;
      const std::size_t lim = std::min(vals.size(), s.w.size());
      for (std::size_t t = 0; t < lim; ++t) acc += wmul(s.w[t], vals[t]);
      return acc;
    }
    double operator()(const ActivationPlus& s) const {
      double mx = 0.0, acc = 0.0;
      for (std::size_t t = 0; t < x.size(); ++t) {
        mx = std::max(mx, x[t]);
        const double w = s.weights.empty() ? 1.0 : s.weights[t];
        acc += wmul(w, x[t]);
      }
      return wmul(s.activation_cost, mx) + acc;
    }
    double operator()(const Nested& s) const {
      std::vector<double> block_vals(s.blocks.size());
      std::vector<double> buf;
      for (std::size_t l = 0; l < s.blocks.size(); ++l) {
        buf.clear();
        for (int i : s.blocks[l]) buf.push_back(x[i]);
        block_vals[l] = s.inners[l]->eval(buf);
      }
      return s.outer->eval(block_vals);
    }
  };
  return std::visit(Visitor{x}, rep_);
}

bool NormSpec::symmetric() const {
  struct Visitor {
    bool operator()(const LInf&) const { return true; }
    bool operator()(const Lp&) const { return true; }
    bool operator()(const TopK&) const { return true; }
    bool operator()(const WeightedL1& s) const { return uniform(s.weights); }
    bool operator()(const OrderedSym&) const { return true; }
    bool operator()(const ActivationPlus& s) const {
      return s.weights.empty() || uniform(s.weights);
    }
    bool operator()(const Nested&) const { return false; }
  };
  return std::visit(Visitor{}, rep_);
}

int NormSpec::dimension() const {
  struct Visitor {
    int operator()(const LInf&) const { return -1; }
    int operator()(const Lp&) const { return -1; }
    int operator()(const TopK&) const { return -1; }
    int operator()(const WeightedL1& s) const {
      return static_cast<int>(s.weights.size());
    }
    int operator()(const OrderedSym&) const { return -1; }
    int operator()(const ActivationPlus& s) const {
      return s.weights.empty() ? -1 : static_cast<int>(s.weights.size());
    }
    int operator()(const Nested& s) const { return s.dimension; }
  };
  return std::visit(Visitor{}, rep_);
}

double NormSpec::unit_norm(int i) const {
  if (const auto* w = get_if<WeightedL1>()) return w->weights[i];
  if (const auto* a = get_if<ActivationPlus>()) {
    const double wi = a->weights.empty() ? 1.0 : a->weights[i];
    return a->activation_cost + wi;
  }
  if (const auto* n = get_if<Nested>()) {
    for (std::size_t l = 0; l < n->blocks.size(); ++l) {
      for (std::size_t t = 0; t < n->blocks[l].size(); ++t) {
        if (n->blocks[l][t] == i) {
          std::vector<double> outer_unit(n->blocks.size(), 0.0);
          outer_unit[l] = n->inners[l]->unit_norm(static_cast<int>(t));
          return n->outer->eval(outer_unit);
        }
      }
    }
    throw std::invalid_argument("unit_norm: coordinate out of range");
  }
  if (const auto* o = get_if<OrderedSym>()) return o->w.front();
  return 1.0;  // LInf, Lp, TopK
}

std::string NormSpec::kind_name() const {
  struct Visitor {
    std::string operator()(const LInf&) const { return "LInf"; }
    std::string operator()(const Lp&) const { return "Lp"; }
    std::string operator()(const TopK&) const { return "TopK"; }
    std::string operator()(const WeightedL1&) const { return "WeightedL1"; }
    std::string operator()(const OrderedSym&) const { return "OrderedSym"; }
    std::string operator()(const ActivationPlus&) const {
      return "ActivationPlus";
    }
    std::string operator()(const Nested&) const { return "Nested"; }
  };
  return std::visit(Visitor{}, rep_);
}

AggregateSpec AggregateSpec::norm_agg(NormSpec norm) {
  return AggregateSpec(NormAgg{std::move(norm)});
}

AggregateSpec AggregateSpec::sum_powers(double p, std::vector<double> weights) {
  if (!(p >= 1.0)) throw std::invalid_argument("SumPowers requires p >= 1");
  if (weights.empty()) throw std::invalid_argument("SumPowers needs weights");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("SumPowers weights must be > 0");
  return AggregateSpec(SumPowers{p, std::move(weights)});
}

AggregateSpec AggregateSpec::pnorm_power(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("PNormPower requires p >= 1");
  return AggregateSpec(PNormPower{p});
}

double AggregateSpec::eval(std::span<const double> y) const {
  for (double v : y)
    if (std::isnan(v) || v < 0.0)
      throw std::invalid_argument("aggregate input must be nonnegative");
  if (dimension() >= 0 && static_cast<int>(y.size()) != dimension())
    dim_error("aggregate eval");

  struct Visitor {
    std::span<const double> y;
    double operator()(const NormAgg& s) const { return s.norm.eval(y); }
    double operator()(const SumPowers& s) const {
      double acc = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i)
        acc += wmul(s.weights[i], std::pow(y[i], s.p));
      return acc;
    }
    double operator()(const PNormPower& s) const {
      double acc = 0.0;
      for (double v : y) acc += std::pow(v, s.p);
      return acc;
    }
  };
  return std::visit(Visitor{y}, rep_);
}

double AggregateSpec::subadditivity_p() const {
  struct Visitor {
    double operator()(const NormAgg&) const { return 1.0; }
    double operator()(const SumPowers& s) const { return s.p; }
    double operator()(const PNormPower& s) const { return s.p; }
  };
  return std::visit(Visitor{}, rep_);
}

int AggregateSpec::dimension() const {
  struct Visitor {
    int operator()(const NormAgg& s) const { return s.norm.dimension(); }
    int operator()(const SumPowers& s) const {
      return static_cast<int>(s.weights.size());
    }
    int operator()(const PNormPower&) const { return -1; }
  };
  return std::visit(Visitor{}, rep_);
}

bool AggregateSpec::marginals_monotone() const {
  if (get_if<SumPowers>() || get_if<PNormPower>()) return true;
  // Weighted l1 marginals are constant, hence trivially nondecreasing.
  if (const auto* n = get_if<NormAgg>())
    return n->norm.get_if<NormSpec::WeightedL1>() != nullptr;
  return false;
}

std::string AggregateSpec::kind_name() const {
  struct Visitor {
    std::string operator()(const NormAgg&) const { return "NormAgg"; }
    std::string operator()(const SumPowers&) const { return "SumPowers"; }
    std::string operator()(const PNormPower&) const { return "PNormPower"; }
  };
  return std::visit(Visitor{}, rep_);
}

double eval_norm(const NormSpec& spec, std::span<const double> x) {
  return spec.eval(x);
}

double eval_aggregate(const AggregateSpec& spec, std::span<const double> y) {
  return spec.eval(y);
}

double marginal(const AggregateSpec& spec, std::span<const std::uint8_t> y,
                int i, std::span<const double> b) {
  if (y.size() != b.size()) dim_error("marginal");
  if (i < 0 || i >= static_cast<int>(y.size()))
    throw std::invalid_argument("marginal: machine index out of range");
  if (y[i] != 0) throw std::invalid_argument("marginal: coordinate already active");
  std::vector<double> z(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) z[j] = y[j] ? b[j] : 0.0;
  const double before = spec.eval(z);
  z[i] = b[i];
  return spec.eval(z) - before;
}

double unit_cap(const AggregateSpec& spec, int i, double budget) {
  if (!(budget >= 0.0)) throw std::invalid_argument("unit_cap: budget < 0");
  const int dim = spec.dimension();
  const int size = dim >= 0 ? dim : i + 1;
  std::vector<double> e(size, 0.0);
  e[i] = 1.0;
  const double f1 = spec.eval(e);
  if (f1 == 0.0) return kInf;
  // All representable aggregates are positively homogeneous of a fixed
  // degree along coordinate axes, so the cap has a closed form.
  return std::pow(budget / f1, 1.0 / spec.homogeneity_degree());
}

}  // namespace ogs
