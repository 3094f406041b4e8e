#pragma once

#include <vector>

namespace twincast {

// Per-group integer reservation for one window. Sum(m) <= M and
// Sum(n) <= N are the capacity constraints checked by the solver.
struct ReservationDecision {
  std::vector<int> m;  // bandwidth units per group
  std::vector<int> n;  // VM instances per group

  bool operator==(const ReservationDecision&) const = default;
};

}  // namespace twincast
