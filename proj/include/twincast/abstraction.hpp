#pragma once

#include <array>
#include <span>
#include <vector>

#include "twincast/catalog.hpp"
#include "twincast/config.hpp"
#include "twincast/udt.hpp"

namespace twincast {

// Group-level distilled state: preference matrix, recommended list, and one
// swipe distribution per recommended video.
struct GroupProfile {
  std::vector<double> pref;  // per type, >= 0 (may exceed 1)
  std::vector<int> rec_list; // video ids, length min(rho, V), no duplicates
  std::vector<std::array<double, kSwipeBins>> rec_swipe;  // parallel to rec_list
};

// pref' = lambda_tilde * prev + mean(samples), where samples are all member
// preference vectors collected this window. Empty sample set keeps only the
// discounted previous term.
std::vector<double> update_group_preference(
    std::span<const double> prev, double lambda_tilde,
    std::span<const std::vector<double>> samples);

// Score per video: popularity times the group's preference for its type.
std::vector<double> rank_videos(const VideoCatalog& catalog,
                                std::span<const double> pref);

// Top-rho ids by score descending, ties by ascending id.
std::vector<int> build_recommended_list(std::span<const double> scores,
                                        const VideoCatalog& catalog, int rho);

// Per-bin swipe probability of the group for one video: mean of member
// distributions for the video's type; literal mode sums and clamps to [0,1].
std::array<double, kSwipeBins> group_swipe_distribution(
    std::span<const UserTwin* const> members, const Video& video,
    GroupSwipeMode mode);

// Full per-window abstraction for one group.
GroupProfile abstract_group(std::span<const UserTwin* const> members,
                            std::span<const double> prev_pref,
                            const VideoCatalog& catalog,
                            const SystemConfig& cfg);

}  // namespace twincast
