#include "twincast/solver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace twincast {

std::pair<double, double> tangent_params(double xi, double cap_per_unit,
                                         double demand) {
  if (!(xi > 0.0) || !(cap_per_unit > 0.0))
    throw std::invalid_argument("tangent_params: xi and capacity must be > 0");
  const double kappa = -0.25 * xi * cap_per_unit;
  const double b = (xi * demand - 2.0) / (xi * cap_per_unit);
  return {kappa, b};
}

ConvexTerm ConvexTerm::make(ResourceKind kind, double xi, double cap_per_unit,
                            double demand, double sat_weight, double op_cost,
                            double rec_cost, int prev) {
  ConvexTerm t;
  t.kind = kind;
  t.xi = xi;
  t.cap_per_unit = cap_per_unit;
  t.demand = demand;
  auto [kappa, b] = tangent_params(xi, cap_per_unit, demand);
  t.kappa = kappa;
  t.b = b;
  t.sat_weight = sat_weight;
  t.op_cost = op_cost;
  t.rec_cost = rec_cost;
  t.prev = prev;
  return t;
}

double negative_satisfaction(const ConvexTerm& term, double x) {
  return -sigmoid(term.xi * (x * term.cap_per_unit - term.demand));
}

double convexified_term(const ConvexTerm& term, double x) {
  if (!(x > term.b))
    throw std::domain_error("convexified_term: x must exceed the tangent intercept");
  if (x >= term.threshold()) return negative_satisfaction(term, x);
  // Tangent branch: passes through (b, 0) and meets the sigmoid branch with
  // matching value (-0.5) and slope (kappa) at the threshold.
  return term.kappa * (x - term.b);
}

double group_objective(const ConvexTerm& term, double x) {
  return term.sat_weight * convexified_term(term, x) +
         term.rec_cost * std::max(0.0, x - term.prev) + term.op_cost * x;
}

int integral_lower_bound(const ConvexTerm& term) {
  return std::max(0, static_cast<int>(std::floor(term.b)) + 1);
}

namespace {

struct SideResult {
  bool feasible = true;
  std::vector<int> x;
  double objective = 0.0;
  int deficit = 0;
  long long evals = 0;
};

SideResult greedy_side(std::span<const ConvexTerm> terms, int budget) {
  SideResult res;
  const int n = static_cast<int>(terms.size());
  std::vector<int> x(static_cast<std::size_t>(n), 0);
  long long lower_total = 0;
  for (int g = 0; g < n; ++g) {
    x[static_cast<std::size_t>(g)] = integral_lower_bound(terms[static_cast<std::size_t>(g)]);
    lower_total += x[static_cast<std::size_t>(g)];
  }
  if (lower_total > budget) {
    res.feasible = false;
    res.x = std::move(x);
    res.deficit = static_cast<int>(lower_total - budget);
    return res;
  }
  auto eval = [&](int g, int v) {
    ++res.evals;
    return group_objective(terms[static_cast<std::size_t>(g)], v);
  };
  std::vector<double> cur(static_cast<std::size_t>(n), 0.0);
  for (int g = 0; g < n; ++g) cur[static_cast<std::size_t>(g)] = eval(g, x[static_cast<std::size_t>(g)]);
  int remaining = budget - static_cast<int>(lower_total);
  while (remaining > 0 && n > 0) {
    int best_g = -1;
    double best_delta = 0.0;
    for (int g = 0; g < n; ++g) {
      const double delta = eval(g, x[static_cast<std::size_t>(g)] + 1) -
                           cur[static_cast<std::size_t>(g)];
      if (delta < best_delta) {
        best_delta = delta;
        best_g = g;
      }
    }
    if (best_g < 0) break;  // no marginal improvement left
    x[static_cast<std::size_t>(best_g)] += 1;
    cur[static_cast<std::size_t>(best_g)] =
        eval(best_g, x[static_cast<std::size_t>(best_g)]);
    --remaining;
  }
  res.x = std::move(x);
  for (int g = 0; g < n; ++g) res.objective += cur[static_cast<std::size_t>(g)];
  return res;
}

SideResult oracle_side(std::span<const ConvexTerm> terms, int budget,
                       long long state_cap) {
  SideResult res;
  const int n = static_cast<int>(terms.size());
  std::vector<int> lower(static_cast<std::size_t>(n), 0);
  long long lower_total = 0;
  for (int g = 0; g < n; ++g) {
    lower[static_cast<std::size_t>(g)] = integral_lower_bound(terms[static_cast<std::size_t>(g)]);
    lower_total += lower[static_cast<std::size_t>(g)];
  }
  if (lower_total > budget) {
    res.feasible = false;
    res.x = lower;
    res.deficit = static_cast<int>(lower_total - budget);
    return res;
  }
  if (n == 0) return res;

  std::vector<int> current(static_cast<std::size_t>(n), 0);
  std::vector<int> best;
  double best_obj = std::numeric_limits<double>::infinity();
  long long visited = 0;

  // Depth-first in lexicographic order; the first optimum found is the
  // lexicographically smallest because replacements require strict
  // improvement.
  auto recurse = [&](auto&& self, int g, int used, double partial) -> void {
    if (++visited > state_cap)
      throw std::invalid_argument("exhaustive_oracle: search space too large");
    if (g == n) {
      if (partial < best_obj) {
        best_obj = partial;
        best = current;
      }
      return;
    }
    long long tail_min = 0;
    for (int h = g + 1; h < n; ++h) tail_min += lower[static_cast<std::size_t>(h)];
    const int hi = budget - used - static_cast<int>(tail_min);
    for (int v = lower[static_cast<std::size_t>(g)]; v <= hi; ++v) {
      ++res.evals;
      const double obj = group_objective(terms[static_cast<std::size_t>(g)], v);
      current[static_cast<std::size_t>(g)] = v;
      self(self, g + 1, used + v, partial + obj);
    }
  };
  recurse(recurse, 0, 0, 0.0);
  res.x = best;
  res.objective = best_obj;
  return res;
}

// Continuous minimizer of f(x) + nu*x over [lo, hi] by ternary search.
double argmin_1d(const ConvexTerm& term, double nu, double lo, double hi,
                 long long& evals) {
  auto f = [&](double x) {
    ++evals;
    return group_objective(term, x) + nu * x;
  };
  double a = lo, b = hi;
  for (int it = 0; it < 100 && b - a > 1e-10; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (f(m1) <= f(m2))
      b = m2;
    else
      a = m1;
  }
  return 0.5 * (a + b);
}

struct Relaxation {
  double dual_bound = -std::numeric_limits<double>::infinity();
  std::vector<double> x;
};

// Lagrangian dual of: min sum f_g(x_g) s.t. sum x_g <= budget, x in boxes.
// x_g(nu) is nonincreasing in nu, so bisection on the budget residual finds
// the multiplier; every evaluated nu yields a valid lower bound.
Relaxation relax_side(std::span<const ConvexTerm> terms,
                      std::span<const int> lo, std::span<const int> hi,
                      int budget, double tol, long long& evals) {
  const int n = static_cast<int>(terms.size());
  Relaxation rel;
  rel.x.assign(static_cast<std::size_t>(n), 0.0);

  auto solve_at = [&](double nu, std::vector<double>& x) {
    double value = -nu * budget;
    double total = 0.0;
    for (int g = 0; g < n; ++g) {
      const double xg = argmin_1d(terms[static_cast<std::size_t>(g)], nu,
                                  lo[static_cast<std::size_t>(g)],
                                  hi[static_cast<std::size_t>(g)], evals);
      x[static_cast<std::size_t>(g)] = xg;
      ++evals;
      value += group_objective(terms[static_cast<std::size_t>(g)], xg) + nu * xg;
      total += xg;
    }
    return std::pair<double, double>{value, total};
  };

  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  auto [v0, total0] = solve_at(0.0, x);
  rel.dual_bound = v0;
  rel.x = x;
  if (total0 <= budget + tol) return rel;  // capacity slack: nu* = 0

  double nu_lo = 0.0, nu_hi = 1.0;
  for (int it = 0; it < 70; ++it) {
    auto [v, total] = solve_at(nu_hi, x);
    if (v > rel.dual_bound) {
      rel.dual_bound = v;
      rel.x = x;
    }
    if (total <= budget + tol) break;
    nu_lo = nu_hi;
    nu_hi *= 2.0;
  }
  for (int it = 0; it < 60; ++it) {
    const double nu = 0.5 * (nu_lo + nu_hi);
    auto [v, total] = solve_at(nu, x);
    if (v > rel.dual_bound) {
      rel.dual_bound = v;
      rel.x = x;
    }
    if (total > budget) nu_lo = nu; else nu_hi = nu;
  }
  return rel;
}

SideResult bnb_side(std::span<const ConvexTerm> terms, int budget,
                    double tol) {
  const int n = static_cast<int>(terms.size());
  SideResult incumbent = greedy_side(terms, budget);
  if (!incumbent.feasible || n == 0) return incumbent;
  long long evals = incumbent.evals;

  std::vector<int> lower(static_cast<std::size_t>(n), 0);
  for (int g = 0; g < n; ++g)
    lower[static_cast<std::size_t>(g)] = integral_lower_bound(terms[static_cast<std::size_t>(g)]);

  auto exact_value = [&](std::span<const int> x) {
    double v = 0.0;
    for (int g = 0; g < n; ++g) {
      ++evals;
      v += group_objective(terms[static_cast<std::size_t>(g)],
                           x[static_cast<std::size_t>(g)]);
    }
    return v;
  };

  struct Node {
    std::vector<int> lo, hi;
  };
  std::vector<Node> stack;
  {
    Node root;
    root.lo = lower;
    root.hi.assign(static_cast<std::size_t>(n), budget);
    stack.push_back(std::move(root));
  }

  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    long long lo_sum = 0;
    bool empty_box = false;
    for (int g = 0; g < n; ++g) {
      lo_sum += node.lo[static_cast<std::size_t>(g)];
      if (node.lo[static_cast<std::size_t>(g)] > node.hi[static_cast<std::size_t>(g)])
        empty_box = true;
    }
    if (empty_box || lo_sum > budget) continue;

    const Relaxation rel =
        relax_side(terms, node.lo, node.hi, budget, tol, evals);
    if (rel.dual_bound >= incumbent.objective - 1e-12) continue;

    // Fully pinned node: evaluate directly.
    bool pinned = true;
    for (int g = 0; g < n; ++g)
      if (node.lo[static_cast<std::size_t>(g)] != node.hi[static_cast<std::size_t>(g)])
        pinned = false;
    if (pinned) {
      const double v = exact_value(node.lo);
      if (v < incumbent.objective - 1e-12) {
        incumbent.objective = v;
        incumbent.x = node.lo;
      }
      continue;
    }

    // Integral relaxation solution: candidate incumbent.
    bool integral = true;
    double max_frac = -1.0;
    int branch_g = 0;
    long long round_sum = 0;
    std::vector<int> rounded(static_cast<std::size_t>(n), 0);
    for (int g = 0; g < n; ++g) {
      const double xg = rel.x[static_cast<std::size_t>(g)];
      const double r = std::round(xg);
      const double frac = std::abs(xg - r);
      rounded[static_cast<std::size_t>(g)] = std::clamp(
          static_cast<int>(r), node.lo[static_cast<std::size_t>(g)],
          node.hi[static_cast<std::size_t>(g)]);
      round_sum += rounded[static_cast<std::size_t>(g)];
      if (frac > 1e-6) integral = false;
      if (frac > max_frac) {
        max_frac = frac;
        branch_g = g;
      }
    }
    if (round_sum <= budget) {
      const double v = exact_value(rounded);
      if (v < incumbent.objective - 1e-12) {
        incumbent.objective = v;
        incumbent.x = rounded;
      }
    }
    if (integral && round_sum <= budget) {
      // The relaxation optimum is feasible and integral; node is solved.
      continue;
    }

    // Branch on the most fractional variable (or the widest box when the
    // relaxation came back integral but infeasible after rounding).
    if (integral) {
      int widest = -1, wg = 0;
      for (int g = 0; g < n; ++g) {
        const int w = node.hi[static_cast<std::size_t>(g)] -
                      node.lo[static_cast<std::size_t>(g)];
        if (w > widest) {
          widest = w;
          wg = g;
        }
      }
      branch_g = wg;
      if (widest == 0) continue;
    }
    const double split = rel.x[static_cast<std::size_t>(branch_g)];
    int mid = static_cast<int>(std::floor(split));
    mid = std::clamp(mid, node.lo[static_cast<std::size_t>(branch_g)],
                     node.hi[static_cast<std::size_t>(branch_g)] - 1);
    Node left = node, right = std::move(node);
    left.hi[static_cast<std::size_t>(branch_g)] = mid;
    right.lo[static_cast<std::size_t>(branch_g)] = mid + 1;
    stack.push_back(std::move(left));
    stack.push_back(std::move(right));
  }

  incumbent.evals = evals;
  return incumbent;
}

}  // namespace

SolveResult fs_schedule(const Instance& instance) {
  SolveResult out;
  SideResult bw = greedy_side(instance.bw, instance.budget_m);
  SideResult vm = greedy_side(instance.vm, instance.budget_n);
  out.feasible = bw.feasible && vm.feasible;
  out.decision.m = std::move(bw.x);
  out.decision.n = std::move(vm.x);
  out.objective_bw = bw.objective;
  out.objective_vm = vm.objective;
  out.deficit_m = bw.deficit;
  out.deficit_n = vm.deficit;
  out.evals = bw.evals + vm.evals;
  return out;
}

SolveResult exhaustive_oracle(const Instance& instance) {
  constexpr long long kStateCap = 10'000'000;
  SolveResult out;
  SideResult bw = oracle_side(instance.bw, instance.budget_m, kStateCap);
  SideResult vm = oracle_side(instance.vm, instance.budget_n, kStateCap);
  out.feasible = bw.feasible && vm.feasible;
  out.decision.m = std::move(bw.x);
  out.decision.n = std::move(vm.x);
  out.objective_bw = bw.objective;
  out.objective_vm = vm.objective;
  out.deficit_m = bw.deficit;
  out.deficit_n = vm.deficit;
  out.evals = bw.evals + vm.evals;
  return out;
}

SolveResult branch_and_bound(const Instance& instance, double tol) {
  SolveResult out;
  SideResult bw = bnb_side(instance.bw, instance.budget_m, tol);
  SideResult vm = bnb_side(instance.vm, instance.budget_n, tol);
  out.feasible = bw.feasible && vm.feasible;
  out.decision.m = std::move(bw.x);
  out.decision.n = std::move(vm.x);
  out.objective_bw = bw.objective;
  out.objective_vm = vm.objective;
  out.deficit_m = bw.deficit;
  out.deficit_n = vm.deficit;
  out.evals = bw.evals + vm.evals;
  return out;
}

Instance build_instance(std::span<const GroupContext> groups,
                        const SystemConfig& cfg) {
  Instance inst;
  inst.budget_m = cfg.M;
  inst.budget_n = cfg.N;
  for (const GroupContext& g : groups) {
    const double cap = cfg.B * std::log2(1.0 + g.ell);
    inst.bw.push_back(ConvexTerm::make(
        ResourceKind::Bandwidth, g.xi, cap, g.R, 1.0,
        cfg.delta2 * cfg.varpi1, cfg.delta3 * cfg.varpi3, g.m_prev));
    inst.vm.push_back(ConvexTerm::make(
        ResourceKind::Vm, g.vartheta, cfg.omega, g.O, cfg.delta1,
        cfg.delta2 * cfg.varpi2, cfg.delta3 * cfg.varpi4, g.n_prev));
  }
  return inst;
}

Instance random_instance(Rng& rng, int max_groups, int budget_m,
                         int budget_n) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const int groups = rng.uniform_int(1, max_groups);
    Instance inst;
    inst.budget_m = budget_m;
    inst.budget_n = budget_n;
    for (int g = 0; g < groups; ++g) {
      const double xi = rng.uniform(0.5, 3.0);
      const double cap = rng.uniform(0.5, 3.0);
      const double r = cap * rng.uniform(0.2, 2.5);
      inst.bw.push_back(ConvexTerm::make(
          ResourceKind::Bandwidth, xi, cap, r, 1.0, rng.uniform(0.0, 0.3),
          rng.uniform(0.0, 0.3), rng.uniform_int(0, 2)));
      const double vt = rng.uniform(0.5, 3.0);
      const double omega = rng.uniform(0.5, 3.0);
      const double o = omega * rng.uniform(0.2, 2.5);
      inst.vm.push_back(ConvexTerm::make(
          ResourceKind::Vm, vt, omega, o, 1.5, rng.uniform(0.0, 0.3),
          rng.uniform(0.0, 0.3), rng.uniform_int(0, 2)));
    }
    long long lower_m = 0, lower_n = 0;
    for (const auto& t : inst.bw) lower_m += integral_lower_bound(t);
    for (const auto& t : inst.vm) lower_n += integral_lower_bound(t);
    if (lower_m <= budget_m && lower_n <= budget_n) return inst;
  }
  throw std::runtime_error("random_instance: could not draw a feasible instance");
}

InstanceParse parse_instance(std::string_view text, const SystemConfig& base) {
  InstanceParse out;
  SystemConfig cfg = base;
  std::vector<GroupContext> groups;
  std::istringstream is{std::string(text)};
  std::string line;
  int line_no = 0;
  int budget_m = cfg.M, budget_n = cfg.N;
  while (std::getline(is, line)) {
    ++line_no;
    std::string stripped;
    {
      std::size_t a = line.find_first_not_of(" \t\r");
      if (a == std::string::npos) continue;
      std::size_t b = line.find_last_not_of(" \t\r");
      stripped = line.substr(a, b - a + 1);
    }
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      out.errors.push_back("line " + std::to_string(line_no) +
                           ": expected key = value");
      continue;
    }
    std::string key = stripped.substr(0, eq);
    std::string value = stripped.substr(eq + 1);
    auto trim = [](std::string& s) {
      const std::size_t a = s.find_first_not_of(" \t");
      const std::size_t b = s.find_last_not_of(" \t");
      s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
    };
    trim(key);
    trim(value);
    try {
      if (key == "group") {
        std::istringstream gs(value);
        GroupContext g;
        if (!(gs >> g.xi >> g.vartheta >> g.ell >> g.R >> g.O >> g.m_prev >>
              g.n_prev))
          throw std::invalid_argument(
              "group line needs: xi vartheta ell R O m_prev n_prev");
        std::string extra;
        if (gs >> extra) throw std::invalid_argument("trailing fields");
        groups.push_back(g);
      } else if (key == "M") {
        budget_m = std::stoi(value);
      } else if (key == "N") {
        budget_n = std::stoi(value);
      } else if (key == "B") {
        cfg.B = std::stod(value);
      } else if (key == "omega") {
        cfg.omega = std::stod(value);
      } else if (key == "delta1") {
        cfg.delta1 = std::stod(value);
      } else if (key == "delta2") {
        cfg.delta2 = std::stod(value);
      } else if (key == "delta3") {
        cfg.delta3 = std::stod(value);
      } else if (key == "varpi1") {
        cfg.varpi1 = std::stod(value);
      } else if (key == "varpi2") {
        cfg.varpi2 = std::stod(value);
      } else if (key == "varpi3") {
        cfg.varpi3 = std::stod(value);
      } else if (key == "varpi4") {
        cfg.varpi4 = std::stod(value);
      } else {
        out.errors.push_back("unknown key '" + key + "'");
      }
    } catch (const std::exception& e) {
      out.errors.push_back("line " + std::to_string(line_no) + " ('" + key +
                           "'): " + e.what());
    }
  }
  if (groups.empty()) out.errors.push_back("no group lines");
  if (!out.errors.empty()) return out;
  cfg.M = budget_m;
  cfg.N = budget_n;
  out.instance = build_instance(groups, cfg);
  return out;
}

std::string format_solution(const SolveResult& result) {
  std::ostringstream os;
  os << "feasible = " << (result.feasible ? "yes" : "no") << "\n";
  if (!result.feasible) {
    os << "deficit_m = " << result.deficit_m << "\n";
    os << "deficit_n = " << result.deficit_n << "\n";
  }
  os << "m =";
  for (int v : result.decision.m) os << ' ' << v;
  os << "\n";
  os << "n =";
  for (int v : result.decision.n) os << ' ' << v;
  os << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", result.objective_bw);
  os << "objective_bw = " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.12g", result.objective_vm);
  os << "objective_vm = " << buf << "\n";
  return os.str();
}

}  // namespace twincast
