#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>

#include "ogs/instance.hpp"

namespace ogs {

// One job offered to a single machine: loads per way, and for machines with
// an activation-plus-assignment norm the per-way weights, revealed only at
// offer time.
struct Offer {
  std::span<const double> loads;
  std::span<const double> weights;  // empty unless the norm carries weights
};

// Online admission control for a single machine under a norm budget. An
// accepted job is irrevocable; the running load never exceeds the solver's
// declared violation factor times the budget.
class InnerSolver {
 public:
  virtual ~InnerSolver() = default;
  virtual std::optional<int> offer(const Offer& offer) = 0;
  virtual double load() const = 0;
  virtual int accepted() const = 0;
  // Declared budget violation factor (1 or 2).
  virtual double violation_factor() const = 0;
};

// Exact solver for LInf: accept any job with some way within budget.
std::unique_ptr<InnerSolver> make_linf_solver(double budget);

// Greedy solver for symmetric norms given a lower-bound guess M on the
// offline optimum: accepts ways with load at most B / ||(1,...,1)|| (with
// floor(ceil(M)/2) ones) as long as the running load stays within budget.
std::unique_ptr<InnerSolver> make_symmetric_solver(NormSpec norm, double budget,
                                                   double guess);

// Solver for c*||x||_inf + sum w*x norms; weights arrive with each offer.
std::unique_ptr<InnerSolver> make_activation_solver(double activation_cost,
                                                    double budget, double guess);

// Dispatch on the machine norm. Throws for norms with no single-machine
// solver (non-uniform weighted l1, nested); composite norms are handled by
// the recursive schedule-packing solvers instead.
std::unique_ptr<InnerSolver> make_inner_solver(const NormSpec& norm,
                                               double budget, double guess);

bool has_inner_solver(const NormSpec& norm);

// (alpha, c) guarantee of the solver that make_inner_solver would pick.
struct SolverGuarantee {
  double alpha = 0.0;
  double violation = 1.0;
};
SolverGuarantee inner_solver_guarantee(const NormSpec& norm);

using InnerFactory = std::function<std::unique_ptr<InnerSolver>(
    int machine, double budget, double guess)>;

}  // namespace ogs
