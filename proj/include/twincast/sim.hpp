#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twincast/abstraction.hpp"
#include "twincast/catalog.hpp"
#include "twincast/clustering.hpp"
#include "twincast/config.hpp"
#include "twincast/qlearn.hpp"
#include "twincast/reservation.hpp"
#include "twincast/solver.hpp"
#include "twincast/udt.hpp"
#include "twincast/utility.hpp"

namespace twincast {

enum class Scheme { Proposed, Wdt, DbscanFs, DtBbs };

const char* scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

// Two-base-station campus with log-distance path loss and lognormal
// shadowing; users follow random waypoints at walking speed.
struct Scenario {
  double arena_w = 1000.0;  // m
  double arena_h = 1000.0;
  std::vector<std::array<double, 2>> bs = {{250.0, 500.0}, {750.0, 500.0}};
  double placement_radius = 300.0;  // initial user spread around a BS
  double tx_power_dbm = 27.0;
  double noise_dbm_hz = -174.0;
  double pl_ref_db = 38.0;       // loss at 1 m
  double pl_exponent_x10 = 30.0; // dB per decade of distance
  double shadow_sigma_db = 4.0;
  double speed_min_kmh = 2.0;
  double speed_max_kmh = 5.0;
  int windows = 90;
  Scheme scheme = Scheme::Proposed;
  std::uint64_t seed = 1;
  // DBSCAN radius sits high in the pairwise-distance distribution: multicast
  // grouping wants coarse cores with true outliers split off, and smaller
  // radii shatter the population into singletons.
  double dbscan_eps_quantile = 0.95;
  int dbscan_min_pts = 3;
};

// One row of the metrics stream. runtime_ms is modeled from the window's
// operation counts (a deterministic cost model), not wall-clock time.
struct WindowMetrics {
  int window = 0;
  Scheme scheme = Scheme::Proposed;
  int lambda_star = 1;
  double brs = 0.0;   // mean bandwidth satisfaction
  double vmrs = 0.0;  // mean VM satisfaction
  double boc = 0.0;   // bandwidth operation cost
  double vmoc = 0.0;  // VM operation cost
  double brc = 0.0;   // bandwidth reconfiguration cost
  double vmrc = 0.0;  // VM reconfiguration cost
  double utility = 0.0;
  double runtime_ms = 0.0;
};

// Ground truth the twins try to estimate.
struct LatentUser {
  std::array<double, 2> pos{0.0, 0.0};
  std::array<double, 2> waypoint{0.0, 0.0};
  double speed_mps = 1.0;
  std::vector<double> swipe_hazard;  // per type, geometric per-second rate
  std::vector<double> pref;          // [0,1]^C, drifts across windows
  int serving_bs = 0;
};

struct GroupState {
  std::vector<int> members;
  std::vector<double> pref;   // carried preference matrix
  std::vector<int> rec_list;  // last recommended list
};

struct SimState {
  SystemConfig cfg;
  Scenario scen;
  VideoCatalog catalog;
  std::vector<UserTwin> twins;
  std::vector<LatentUser> latents;
  std::vector<double> user_sinr;  // mean linear SINR, current window
  std::vector<GroupState> groups;  // previous window's groups
  std::vector<int> user_group;     // previous window's assignment (-1 none)
  ReservationDecision prev_decision;
  std::vector<int> prev_versions;  // delivered layer per group, prev window
  int window = 0;
  const QNet* agent = nullptr;  // greedy cluster-count policy when set
};

struct WindowResult {
  WindowMetrics metrics;
  ReservationDecision decision;
  std::vector<GroupContext> contexts;
  bool infeasible = false;
};

// V videos, types uniform over C, Zipf(1) popularity summing to 1; per-second
// layer sizes in bits: base uniform [0.5, 1.0] Mb, enhancements [0.3, 0.8] Mb.
VideoCatalog synthesize_catalog(const SystemConfig& cfg, Rng& rng);

// Advance toward the waypoint; arrival draws a new waypoint and speed.
void step_mobility(LatentUser& user, double dt, const Scenario& scen,
                   Rng& rng);

double path_loss_db(double distance_m, const Scenario& scen,
                    double shadow_db);
double channel_gain_linear(double distance_m, const Scenario& scen,
                           double shadow_db);
// Noise-limited SINR over one bandwidth unit.
double sinr_linear(double gain, const SystemConfig& cfg, const Scenario& scen);

// Realized behavior of one user for one window.
struct BehaviorSample {
  std::vector<double> gains;  // serving-BS linear gains, length F1
  std::vector<std::array<double, 2>> positions;
  std::vector<SwipeEvent> events;
  std::vector<int> delivered;  // per type
  std::vector<std::vector<double>> pref_samples;
  double mean_sinr = 1.0;
};
BehaviorSample sample_user_behavior(LatentUser& user,
                                    std::span<const int> rec_list,
                                    const VideoCatalog& catalog,
                                    const SystemConfig& cfg,
                                    const Scenario& scen, Rng& rng);

// Elbow of a WCSS curve (index i holds Lambda = i + 1): the interior Lambda
// with the largest second difference; 1 when the curve is too short.
int elbow_lambda(std::span<const double> wcss);

SimState init_sim(const SystemConfig& cfg, const Scenario& scen,
                  const QNet* agent = nullptr);
WindowResult run_window(SimState& state);
// Same pipeline with the cluster count pinned (used by agent training).
WindowResult run_window_forced(SimState& state, int lambda);
std::vector<WindowMetrics> run_episode(const SystemConfig& cfg,
                                       const Scenario& scen,
                                       const QNet* agent = nullptr);

// CSV with the exact header
// window,scheme,lambda_star,brs,vmrs,boc,vmoc,brc,vmrc,utility,runtime_ms
std::string metrics_to_csv(std::span<const WindowMetrics> rows);
std::string metrics_to_json(std::span<const WindowMetrics> rows);

// Mean and std of every metric column for one scheme. Column order:
// lambda_star, brs, vmrs, boc, vmoc, brc, vmrc, utility, runtime_ms.
inline constexpr int kMetricColumns = 9;
struct SchemeSummary {
  Scheme scheme = Scheme::Proposed;
  int episodes = 0;
  int windows = 0;
  std::vector<double> seed_mean_utility;  // per seed, for paired tests
  std::array<double, kMetricColumns> mean{};
  std::array<double, kMetricColumns> stddev{};
};

// Runs every scheme over the given seeds (threaded; deterministic output).
std::vector<SchemeSummary> bench_schemes(const SystemConfig& cfg,
                                         const Scenario& base,
                                         std::span<const std::uint64_t> seeds,
                                         const QNet* agent = nullptr,
                                         int threads = 0);
std::string bench_to_csv(std::span<const SchemeSummary> rows);

struct AgentTrainResult {
  QNet net;
  std::vector<double> episode_mean_reward;
  std::int64_t steps = 0;
};

// DDQN training against the simulator: one episode is one seeded run of
// `episode_len` windows and the reward is the realized system utility.
AgentTrainResult train_agent(const SystemConfig& cfg, const Scenario& base,
                             const AgentConfig& agent_cfg,
                             const std::vector<int>& hidden,
                             std::uint64_t seed);

}  // namespace twincast
