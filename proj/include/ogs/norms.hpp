#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ogs {

class NormSpec;
using NormSpecPtr = std::shared_ptr<const NormSpec>;

// Declarative description of a monotone norm on the nonnegative orthant.
// Instances are immutable after construction and safe to share across
// threads. Entries of evaluated vectors may be +inf; the convention
// 0 * inf = 0 applies to all weighted sums.
class NormSpec {
 public:
  struct LInf {};
  struct Lp {
    double p;
  };
  // Sum of the k largest coordinates.
  struct TopK {
    int k;
  };
  // Positional weighted l1; dimension is fixed by the weight vector.
  struct WeightedL1 {
    std::vector<double> weights;
  };
  // Ordered weighted l1: sum_t w[t] * (t-th largest coordinate), with w
  // nonincreasing and w[0] > 0. Coordinates beyond w.size() get weight 0.
  struct OrderedSym {
    std::vector<double> w;
  };
  // activation_cost * max(x) + sum_t weights[t] * x[t]. Empty weights mean
  // uniform weight 1. Models a machine with an opening cost plus additive
  // assignment costs.
  struct ActivationPlus {
    double activation_cost;
    std::vector<double> weights;
  };
  // Outer norm over per-block inner norm values; blocks partition the
  // coordinate range.
  struct Nested {
    NormSpecPtr outer;
    std::vector<std::vector<int>> blocks;
    std::vector<NormSpecPtr> inners;
    int dimension;
  };

  static NormSpec linf();
  static NormSpec lp(double p);
  static NormSpec top_k(int k);
  static NormSpec weighted_l1(std::vector<double> weights);
  static NormSpec ordered_sym(std::vector<double> w);
  static NormSpec activation_plus(double activation_cost,
                                  std::vector<double> weights = {});
  static NormSpec nested(NormSpec outer,
                         std::vector<std::pair<std::vector<int>, NormSpec>> blocks);

  double eval(std::span<const double> x) const;

  // True for permutation-invariant specs (LInf, Lp, TopK, OrderedSym, and
  // WeightedL1/ActivationPlus with uniform weights).
  bool symmetric() const;

  // Fixed-dimension specs return it; -1 means any dimension.
  int dimension() const;

  // Norm of a canonical unit vector e_i (position matters only for
  // positional specs).
  double unit_norm(int i) const;

  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&rep_);
  }

  const std::variant<LInf, Lp, TopK, WeightedL1, OrderedSym, ActivationPlus,
                     Nested>&
  rep() const {
    return rep_;
  }

  std::string kind_name() const;

 private:
  template <typename T>
  explicit NormSpec(T rep) : rep_(std::move(rep)) {}

  std::variant<LInf, Lp, TopK, WeightedL1, OrderedSym, ActivationPlus, Nested>
      rep_{LInf{}};
};

// Monotone convex aggregation function together with its subadditivity
// degree p (f(x+y)^{1/p} <= f(x)^{1/p} + f(y)^{1/p}).
class AggregateSpec {
 public:
  struct NormAgg {
    NormSpec norm;
  };
  // f(y) = sum_i weights[i] * y_i^p
  struct SumPowers {
    double p;
    std::vector<double> weights;
  };
  // f(y) = sum_i y_i^p
  struct PNormPower {
    double p;
  };

  AggregateSpec() : rep_(NormAgg{NormSpec::linf()}) {}

  static AggregateSpec norm_agg(NormSpec norm);
  static AggregateSpec sum_powers(double p, std::vector<double> weights);
  static AggregateSpec pnorm_power(double p);

  double eval(std::span<const double> y) const;
  double subadditivity_p() const;
  // Degree of positive homogeneity along any coordinate axis.
  double homogeneity_degree() const { return subadditivity_p(); }
  int dimension() const;

  // Discrete marginals are coordinatewise nondecreasing for SumPowers and
  // PNormPower (and for every 1-homogeneous NormAgg used by the engines).
  bool marginals_monotone() const;

  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&rep_);
  }
  const std::variant<NormAgg, SumPowers, PNormPower>& rep() const {
    return rep_;
  }
  std::string kind_name() const;

 private:
  template <typename T>
  explicit AggregateSpec(T rep) : rep_(std::move(rep)) {}

  std::variant<NormAgg, SumPowers, PNormPower> rep_;
};

double eval_norm(const NormSpec& spec, std::span<const double> x);
double eval_aggregate(const AggregateSpec& spec, std::span<const double> y);

// f((b_j y_j)_j + b_i e_i) - f((b_j y_j)_j); requires y[i] == 0.
double marginal(const AggregateSpec& spec, std::span<const std::uint8_t> y,
                int i, std::span<const double> b);

// Largest b with f(b * e_i) <= budget. Returns +inf when f(b * e_i) is
// identically 0 (coordinate i carries no weight).
double unit_cap(const AggregateSpec& spec, int i, double budget);

}  // namespace ogs
