#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "twincast/udt.hpp"

namespace twincast {

// Flattened per-user feature vector split into attribute blocks. Blocks are
// z-score normalized per attribute across the population so that meters and
// unit-interval preferences weigh comparably.
struct TwinFeature {
  std::vector<double> data;
  // block b spans [offsets[b], offsets[b+1]); offsets.back() == data.size()
  std::vector<std::size_t> offsets;

  std::size_t blocks() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

enum class FeatureSet {
  Full,                // channel, location, swipe timestamps, preferences
  PreferenceLocation,  // location + preferences only
};

// Missing swipe timestamps (fewer than F2 events) are padded with 15,
// the watched-to-completion sentinel.
std::vector<TwinFeature> build_features(std::span<const UserTwin> twins,
                                        FeatureSet set, int F1, int F2, int C);

// Fixed-length population summary independent of K: per attribute, per user
// {mean, std, min, max, last, slope}, aggregated across users by {mean, std}.
// Length = 4 attributes x 6 stats x 2 aggregates = 48.
std::vector<double> summarize_features(std::span<const UserTwin> twins);

inline constexpr std::size_t kSummaryLength = 48;

}  // namespace twincast
