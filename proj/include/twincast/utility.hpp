#pragma once

#include <span>
#include <vector>

#include "twincast/config.hpp"
#include "twincast/reservation.hpp"

namespace twincast {

// Logistic function with the exponent clamped to |x| <= 700; the result is
// kept strictly inside (0, 1) even where the quotient would round to 1.
double sigmoid(double x);

// Everything a group contributes to satisfaction scoring: average SINR
// (linear), sensitivities, demands, and last window's reservation (0 for
// groups that did not exist then).
struct GroupContext {
  double ell = 1.0;       // average SINR, linear
  double xi = 1.0;        // bandwidth sensitivity (per bits/s)
  double vartheta = 1.0;  // compute sensitivity (per cycles/s)
  double R = 0.0;         // bandwidth demand
  double O = 0.0;         // compute demand
  int m_prev = 0;
  int n_prev = 0;
};

// U_B = sigmoid(xi * (m * B * log2(1 + ell) - R)), strictly increasing in m.
double bandwidth_satisfaction(int m, double B, double ell, double xi,
                              double R);

// U_V = sigmoid(vartheta * (n * omega - O)).
double vm_satisfaction(int n, double omega, double vartheta, double O);

// U_O = varpi1 * sum(m) + varpi2 * sum(n).
double operation_cost(std::span<const int> m, std::span<const int> n,
                      double varpi1, double varpi2);

// Only increases are charged; previous vectors shorter than the current
// group count are padded with zeros, extra entries are released for free.
double bandwidth_reconfig_cost(std::span<const int> m,
                               std::span<const int> m_prev, double varpi3);
double vm_reconfig_cost(std::span<const int> n, std::span<const int> n_prev,
                        double varpi4);
double reconfiguration_cost(std::span<const int> m, std::span<const int> n,
                            std::span<const int> m_prev,
                            std::span<const int> n_prev, double varpi3,
                            double varpi4);

// U = (1 / groups) * sum(U_B + delta1 * U_V) - delta2 * U_O - delta3 * U_R.
double system_utility(std::span<const double> u_b, std::span<const double> u_v,
                      double delta1, double u_o, double u_r, double delta2,
                      double delta3);

struct UtilityReport {
  std::vector<double> u_b;  // per group, in (0, 1)
  std::vector<double> u_v;
  double u_o = 0.0;
  double u_r = 0.0;
  double u = 0.0;
};

UtilityReport score_reservation(std::span<const GroupContext> groups,
                                const ReservationDecision& decision,
                                const SystemConfig& cfg);

}  // namespace twincast
