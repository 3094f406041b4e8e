#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "twincast/config.hpp"
#include "twincast/reservation.hpp"
#include "twincast/rng.hpp"
#include "twincast/utility.hpp"

namespace twincast {

enum class ResourceKind { Bandwidth, Vm };

// One group's convexified objective for one resource:
//   f(x) = sat_weight * conv(x) + rec_cost * [x - prev]+ + op_cost * x
// where conv(x) is the negative satisfaction sigmoid for x at or above the
// demand threshold and its tangent (anchored at the threshold) below it.
// Valid only for x > b, the tangent's x-intercept.
struct ConvexTerm {
  ResourceKind kind = ResourceKind::Bandwidth;
  double xi = 1.0;            // sensitivity
  double cap_per_unit = 1.0;  // B*log2(1+ell) or omega
  double demand = 0.0;        // R or O
  double kappa = 0.0;         // tangent slope, always < 0
  double b = 0.0;             // tangent x-intercept, always < threshold
  double sat_weight = 1.0;    // 1 for bandwidth, delta1 for VM
  double op_cost = 0.0;       // delta2 * varpi_op
  double rec_cost = 0.0;      // delta3 * varpi_rec
  int prev = 0;

  double threshold() const { return demand / cap_per_unit; }

  static ConvexTerm make(ResourceKind kind, double xi, double cap_per_unit,
                         double demand, double sat_weight, double op_cost,
                         double rec_cost, int prev);
};

// kappa = -xi * cap / 4 (the sigmoid slope at its midpoint);
// b = (xi * demand - 2) / (xi * cap), where the tangent crosses zero.
std::pair<double, double> tangent_params(double xi, double cap_per_unit,
                                         double demand);

// The negative satisfaction sigmoid, -sigmoid(xi * (x * cap - demand)).
double negative_satisfaction(const ConvexTerm& term, double x);

// Piecewise convex surrogate; throws std::domain_error for x <= b.
double convexified_term(const ConvexTerm& term, double x);

// Full per-group objective contribution.
double group_objective(const ConvexTerm& term, double x);

// Smallest integer strictly above b, floored at 0.
int integral_lower_bound(const ConvexTerm& term);

struct Instance {
  std::vector<ConvexTerm> bw;  // per group
  std::vector<ConvexTerm> vm;  // per group, same order
  int budget_m = 0;
  int budget_n = 0;

  int groups() const { return static_cast<int>(bw.size()); }
};

struct SolveResult {
  bool feasible = true;
  ReservationDecision decision;
  double objective_bw = 0.0;
  double objective_vm = 0.0;
  int deficit_m = 0;  // shortfall of budget below the lower bounds
  int deficit_n = 0;
  long long evals = 0;  // objective evaluations, the runtime driver
};

// Greedy marginal allocation: start every group at its integral lower
// bound, then hand out one unit at a time to the group with the most
// negative objective change until no change is negative or the budget runs
// out. Bandwidth and VM run independently.
SolveResult fs_schedule(const Instance& instance);

// Exact minimizer by full enumeration in lexicographic order (ties keep the
// lexicographically smallest vector). Throws std::invalid_argument when the
// enumeration would exceed 10^7 states.
SolveResult exhaustive_oracle(const Instance& instance);

// Exact branch-and-bound. Lower bounds come from the Lagrangian dual of the
// continuous relaxation, solved by bisection on the common marginal value.
// The incumbent starts from fs_schedule and is replaced only on strict
// improvement, so ties resolve identically to FS.
SolveResult branch_and_bound(const Instance& instance, double tol = 1e-9);

// Builds the solver instance from group contexts and config weights.
Instance build_instance(std::span<const GroupContext> groups,
                        const SystemConfig& cfg);

// Random feasible instance (thresholds in a range where the tangent branch
// matters); used by verification commands and tests.
Instance random_instance(Rng& rng, int max_groups, int budget_m,
                         int budget_n);

// Instance files: key = value scalars plus one "group = xi vartheta ell R O
// m_prev n_prev" line per group.
struct InstanceParse {
  Instance instance;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};
InstanceParse parse_instance(std::string_view text, const SystemConfig& base);
std::string format_solution(const SolveResult& result);

}  // namespace twincast
