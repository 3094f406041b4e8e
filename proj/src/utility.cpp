#include "twincast/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twincast {

double sigmoid(double x) {
  x = std::clamp(x, -700.0, 700.0);
  double r;
  if (x >= 0.0) {
    r = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    r = e / (1.0 + e);
  }
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(r, std::numeric_limits<double>::min(), hi);
}

double bandwidth_satisfaction(int m, double B, double ell, double xi,
                              double R) {
  if (m < 0) throw std::invalid_argument("bandwidth_satisfaction: m < 0");
  const double capacity = m * B * std::log2(1.0 + ell);
  return sigmoid(xi * (capacity - R));
}

double vm_satisfaction(int n, double omega, double vartheta, double O) {
  if (n < 0) throw std::invalid_argument("vm_satisfaction: n < 0");
  return sigmoid(vartheta * (n * omega - O));
}

double operation_cost(std::span<const int> m, std::span<const int> n,
                      double varpi1, double varpi2) {
  double sm = 0.0, sn = 0.0;
  for (int v : m) sm += v;
  for (int v : n) sn += v;
  return varpi1 * sm + varpi2 * sn;
}

namespace {

double increase_cost(std::span<const int> cur, std::span<const int> prev,
                     double unit) {
  double total = 0.0;
  for (std::size_t g = 0; g < cur.size(); ++g) {
    const int before = g < prev.size() ? prev[g] : 0;
    total += unit * std::max(0, cur[g] - before);
  }
  return total;
}

}  // namespace

double bandwidth_reconfig_cost(std::span<const int> m,
                               std::span<const int> m_prev, double varpi3) {
  return increase_cost(m, m_prev, varpi3);
}

double vm_reconfig_cost(std::span<const int> n, std::span<const int> n_prev,
                        double varpi4) {
  return increase_cost(n, n_prev, varpi4);
}

double reconfiguration_cost(std::span<const int> m, std::span<const int> n,
                            std::span<const int> m_prev,
                            std::span<const int> n_prev, double varpi3,
                            double varpi4) {
  return bandwidth_reconfig_cost(m, m_prev, varpi3) +
         vm_reconfig_cost(n, n_prev, varpi4);
}

double system_utility(std::span<const double> u_b, std::span<const double> u_v,
                      double delta1, double u_o, double u_r, double delta2,
                      double delta3) {
  if (u_b.empty() || u_b.size() != u_v.size())
    throw std::invalid_argument("system_utility: need matching per-group terms");
  double sat = 0.0;
  for (std::size_t g = 0; g < u_b.size(); ++g)
    sat += u_b[g] + delta1 * u_v[g];
  return sat / static_cast<double>(u_b.size()) - delta2 * u_o - delta3 * u_r;
}

UtilityReport score_reservation(std::span<const GroupContext> groups,
                                const ReservationDecision& decision,
                                const SystemConfig& cfg) {
  if (groups.size() != decision.m.size() || groups.size() != decision.n.size())
    throw std::invalid_argument("score_reservation: group count mismatch");
  UtilityReport rep;
  std::vector<int> m_prev, n_prev;
  for (const GroupContext& g : groups) {
    m_prev.push_back(g.m_prev);
    n_prev.push_back(g.n_prev);
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const GroupContext& g = groups[i];
    rep.u_b.push_back(
        bandwidth_satisfaction(decision.m[i], cfg.B, g.ell, g.xi, g.R));
    rep.u_v.push_back(
        vm_satisfaction(decision.n[i], cfg.omega, g.vartheta, g.O));
  }
  rep.u_o = operation_cost(decision.m, decision.n, cfg.varpi1, cfg.varpi2);
  rep.u_r = reconfiguration_cost(decision.m, decision.n, m_prev, n_prev,
                                 cfg.varpi3, cfg.varpi4);
  rep.u = system_utility(rep.u_b, rep.u_v, cfg.delta1, rep.u_o, rep.u_r,
                         cfg.delta2, cfg.delta3);
  return rep;
}

}  // namespace twincast
