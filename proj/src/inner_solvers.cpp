#include "ogs/inner_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ogs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class LInfSolver final : public InnerSolver {
 public:
  explicit LInfSolver(double budget) : budget_(budget) {}

  std::optional<int> offer(const Offer& o) override {
    for (int k = 0; k < static_cast<int>(o.loads.size()); ++k) {
      if (o.loads[k] <= budget_) {
        load_ = std::max(load_, o.loads[k]);
        ++accepted_;
        return k;
      }
    }
    return std::nullopt;
  }

  double load() const override { return load_; }
  int accepted() const override { return accepted_; }
  double violation_factor() const override { return 1.0; }

 private:
  double budget_;
  double load_ = 0.0;
  int accepted_ = 0;
};

class SymmetricSolver final : public InnerSolver {
 public:
  SymmetricSolver(NormSpec norm, double budget, double guess)
      : norm_(std::move(norm)), budget_(budget) {
    if (!(guess > 0.0)) throw std::invalid_argument("solver guess must be > 0");
    const int m_int = static_cast<int>(std::ceil(guess));
    if (m_int <= 2) {
      single_job_mode_ = true;
      return;
    }
    const int ones = m_int / 2;
    const std::vector<double> unit(ones, 1.0);
    per_job_cap_ = budget_ / norm_.eval(unit);
  }

  std::optional<int> offer(const Offer& o) override {
    if (single_job_mode_) {
      if (accepted_ > 0) return std::nullopt;
      for (int k = 0; k < static_cast<int>(o.loads.size()); ++k) {
        std::vector<double> one{o.loads[k]};
        if (o.loads[k] < kInf && norm_.eval(one) <= budget_) {
          taken_.push_back(o.loads[k]);
          load_ = norm_.eval(taken_);
          ++accepted_;
          return k;
        }
      }
      return std::nullopt;
    }
    for (int k = 0; k < static_cast<int>(o.loads.size()); ++k) {
      if (!(o.loads[k] <= per_job_cap_)) continue;
      taken_.push_back(o.loads[k]);
      const double with = norm_.eval(taken_);
      if (with <= budget_) {
        load_ = with;
        ++accepted_;
        return k;
      }
      taken_.pop_back();
    }
    return std::nullopt;
  }

  double load() const override { return load_; }
  int accepted() const override { return accepted_; }
  double violation_factor() const override { return 1.0; }

 private:
  NormSpec norm_;
  double budget_;
  double per_job_cap_ = 0.0;
  bool single_job_mode_ = false;
  std::vector<double> taken_;
  double load_ = 0.0;
  int accepted_ = 0;
};

class ActivationSolver final : public InnerSolver {
 public:
  ActivationSolver(double activation_cost, double budget, double guess)
      : c_(activation_cost), budget_(budget) {
    if (!(guess > 0.0)) throw std::invalid_argument("solver guess must be > 0");
    const int m_int = static_cast<int>(std::ceil(guess));
    if (m_int <= 2) {
      single_job_mode_ = true;
      per_job_weighted_cap_ = budget_;
    } else {
      per_job_weighted_cap_ = 2.0 * budget_ / m_int;
    }
  }

  std::optional<int> offer(const Offer& o) override {
    if (single_job_mode_ && accepted_ > 0) return std::nullopt;
    for (int k = 0; k < static_cast<int>(o.loads.size()); ++k) {
      const double p = o.loads[k];
      const double w = o.weights.empty() ? 1.0 : o.weights[k];
      if (p == kInf) continue;
      const double wp = (w == 0.0 || p == 0.0) ? 0.0 : w * p;
      const double cp = (c_ == 0.0 || p == 0.0) ? 0.0 : c_ * p;
      if (!(cp <= budget_)) continue;
      if (!(wp <= per_job_weighted_cap_)) continue;
      // The additive part is the binding constraint; keeping it within the
      // budget bounds the whole norm by 2B.
      if (!(weighted_sum_ + wp <= budget_)) continue;
      weighted_sum_ += wp;
      max_load_ = std::max(max_load_, p);
      ++accepted_;
      return k;
    }
    return std::nullopt;
  }

  double load() const override {
    return (c_ == 0.0 || max_load_ == 0.0 ? 0.0 : c_ * max_load_) +
           weighted_sum_;
  }
  int accepted() const override { return accepted_; }
  double violation_factor() const override { return 2.0; }

 private:
  double c_;
  double budget_;
  double per_job_weighted_cap_;
  bool single_job_mode_ = false;
  double weighted_sum_ = 0.0;
  double max_load_ = 0.0;
  int accepted_ = 0;
};

}  // namespace

std::unique_ptr<InnerSolver> make_linf_solver(double budget) {
  return std::make_unique<LInfSolver>(budget);
}

std::unique_ptr<InnerSolver> make_symmetric_solver(NormSpec norm, double budget,
                                                   double guess) {
  return std::make_unique<SymmetricSolver>(std::move(norm), budget, guess);
}

std::unique_ptr<InnerSolver> make_activation_solver(double activation_cost,
                                                    double budget,
                                                    double guess) {
  return std::make_unique<ActivationSolver>(activation_cost, budget, guess);
}

std::unique_ptr<InnerSolver> make_inner_solver(const NormSpec& norm,
                                               double budget, double guess) {
  if (norm.get_if<NormSpec::LInf>()) return make_linf_solver(budget);
  if (const auto* a = norm.get_if<NormSpec::ActivationPlus>())
    return make_activation_solver(a->activation_cost, budget, guess);
  if (norm.symmetric()) return make_symmetric_solver(norm, budget, guess);
  throw std::invalid_argument("no single-machine solver for norm kind " +
                              norm.kind_name());
}

bool has_inner_solver(const NormSpec& norm) {
  return norm.get_if<NormSpec::LInf>() != nullptr ||
         norm.get_if<NormSpec::ActivationPlus>() != nullptr || norm.symmetric();
}

SolverGuarantee inner_solver_guarantee(const NormSpec& norm) {
  if (norm.get_if<NormSpec::LInf>()) return {1.0, 1.0};
  if (norm.get_if<NormSpec::ActivationPlus>()) return {1.0 / 3.0, 2.0};
  if (norm.symmetric()) return {1.0 / 3.0, 1.0};
  throw std::invalid_argument("no single-machine solver for norm kind " +
                              norm.kind_name());
}

}  // namespace ogs
