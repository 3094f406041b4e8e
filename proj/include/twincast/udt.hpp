#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace twincast {

inline constexpr int kSwipeBins = 15;  // per-second bins 1..15

struct SwipeEvent {
  int video_id = 0;
  int type = 1;            // 1..C
  double timestamp = 0.0;  // seconds into playback, in (0, 15]
};

// Per-user digital twin: a bounded pool holding exactly the last window's
// samples, plus the running swipe-probability distribution p[c][e].
struct UserTwin {
  int user_id = 0;
  std::vector<double> channel;                   // F1 linear gains
  std::vector<std::array<double, 2>> location;   // F1 positions (m)
  std::vector<SwipeEvent> swipes;                // <= F2 events
  std::vector<std::vector<double>> prefs;        // F2 samples, each length C
  std::vector<std::array<double, kSwipeBins>> swipe_dist;  // C x 15

  static UserTwin make(int user_id, int C);
};

// Window counters for the swipe estimator: per_bin[c][e-1] swipes of type
// c+1 binned at second e, delivered[c] videos of that type sent to the user.
struct SwipeCounts {
  std::vector<std::array<int, kSwipeBins>> per_bin;
  std::vector<int> delivered;
};

// Replaces the twin's rings with the new window's samples. The previous
// window's data is evicted wholesale. Throws std::invalid_argument with the
// offending counts when sizes disagree with F1/F2.
void ingest_window(UserTwin& twin, std::span<const double> channel_samples,
                   std::span<const std::array<double, 2>> locations,
                   std::span<const SwipeEvent> swipe_events,
                   std::span<const std::vector<double>> pref_samples, int F1,
                   int F2);

// Bins the twin's swipe events by ceiling timestamp. delivered[c] must cover
// the number of type-(c+1) events; timestamps outside (0, 15] are rejected.
// Videos watched to completion appear in delivered only.
SwipeCounts swipe_counts(const UserTwin& twin, std::span<const int> delivered);

// One element of the swipe-distribution update:
//   p' = lambda * p_prev + (1 - lambda) * A_e / A_hat,
// with the empirical term defined as p_prev when A_hat == 0 (no evidence).
double update_swipe_distribution(double p_prev, double lambda, int A_e,
                                 int A_hat);

// Applies the update over every (type, bin) cell of the twin.
void apply_swipe_update(UserTwin& twin, const SwipeCounts& counts,
                        double lambda);

// Line-oriented snapshot format: one twin per line, lossless round-trip.
std::string serialize_twins(std::span<const UserTwin> twins);
std::vector<UserTwin> parse_twins(std::string_view text);  // throws on damage

}  // namespace twincast
