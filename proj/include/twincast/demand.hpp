#pragma once

#include <array>
#include <span>
#include <vector>

#include "twincast/abstraction.hpp"
#include "twincast/catalog.hpp"
#include "twincast/config.hpp"

namespace twincast {

// Per-group predicted demand for one window.
//   W: engagement time (s in dimensional mode)
//   Y: video traffic (bits)
//   Z: computing consumption (cycles)
//   R: bandwidth demand (bits/s in dimensional mode)
//   O: computing demand (cycles/s in dimensional mode)
struct DemandEstimate {
  double W = 0.0, Y = 0.0, Z = 0.0, R = 0.0, O = 0.0;
  int l_bar = 0;
};

// A recommended video paired with the group's swipe distribution for it.
struct RecEntry {
  const Video* video;
  std::array<double, kSwipeBins> swipe;
};

// All integrals are unit-width sums over playback seconds e = 1..length.
double engagement_time(std::span<const RecEntry> rec, DemandMode mode);

// Traffic over layers 1..l_bar (literal) or 0..l_bar (dimensional).
double video_traffic(std::span<const RecEntry> rec, int l_bar,
                     DemandMode mode);

// Basement-layer traffic, the cached part never transcoded.
double base_layer_traffic(std::span<const RecEntry> rec);

// Literal: W / Y. Dimensional: Y / W. Zero denominator yields 0.
double bandwidth_demand(double W, double Y, DemandMode mode);

// Z = mu * (Y - base traffic); clamped at 0 in literal mode where Y counts
// enhancement layers only.
double computing_consumption(double Y, std::span<const RecEntry> rec,
                             double mu, DemandMode mode);

// Literal: Z / Y. Dimensional: Z / W. Zero denominator yields 0.
double computing_demand(double Z, double W, double Y, DemandMode mode);

// Rounded mean of the previous window's delivered layer indices, clamped to
// {0..kMaxLayer}; the first window (no history) starts at 1.
int average_version(std::span<const int> prev_versions);

DemandEstimate predict_demand(std::span<const RecEntry> rec, int l_bar,
                              double mu, DemandMode mode);

// Convenience: pairs a profile's rec list with catalog videos.
std::vector<RecEntry> make_rec_entries(const GroupProfile& profile,
                                       const VideoCatalog& catalog,
                                       bool swipe_aware);

}  // namespace twincast
