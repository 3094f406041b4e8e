#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace twincast {

// How per-group demand is derived from engagement time and traffic.
// Dimensional keeps rates in bits/s and cycles/s; Literal reproduces the
// printed quotients (useful for comparison, units do not line up).
enum class DemandMode { Literal, Dimensional };

// Group swipe distribution: mean of member distributions (default) or the
// accumulated sum clamped to [0, 1].
enum class GroupSwipeMode { Mean, LiteralClamped };

struct SystemConfig {
  int M = 15;              // total bandwidth units
  double B = 2.0e6;        // bandwidth per unit (Hz)
  int N = 10;              // total VM instances
  double omega = 2.0e9;    // VM computing capacity (cycles/s)
  double mu = 2000.0;      // transcoding density (cycles/bit)
  double T = 300.0;        // reservation window (s)
  int K = 60;              // users
  int V = 1000;            // catalog size
  int C = 8;               // video types
  int rho = 50;            // recommended-list length
  int F1 = 150;            // channel/location samples per window
  int F2 = 5;              // swipe/preference samples per window
  double lambda = 0.4;        // swipe-distribution update weight
  double lambda_tilde = 0.3;  // group-preference update weight
  double varpi1 = 0.5;  // unit cost: bandwidth operation
  double varpi2 = 0.5;  // unit cost: VM operation
  double varpi3 = 0.7;  // unit cost: bandwidth reconfiguration
  double varpi4 = 1.0;  // unit cost: VM reconfiguration
  double delta1 = 1.5;  // weight on VM satisfaction
  double delta2 = 0.3;  // weight on operation cost
  double delta3 = 0.3;  // weight on reconfiguration cost
  DemandMode demand_mode = DemandMode::Dimensional;
  int max_clusters = 10;
  GroupSwipeMode group_swipe_mode = GroupSwipeMode::Mean;
};

// Returns one message per violated invariant; empty means valid.
std::vector<std::string> validate_config(const SystemConfig& cfg);

// Flat key = value text, every key present, round-trips losslessly.
std::string serialize_config(const SystemConfig& cfg);

struct ConfigParse {
  SystemConfig config;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

// Parses key = value text. Unknown keys are rejected; the full core key set
// must be present; demand_mode / max_clusters / group_swipe_mode default
// when absent. Validation errors are included in the result.
ConfigParse parse_config(std::string_view text);
ConfigParse load_config_file(const std::string& path);

const char* demand_mode_name(DemandMode mode);
const char* group_swipe_mode_name(GroupSwipeMode mode);

}  // namespace twincast
