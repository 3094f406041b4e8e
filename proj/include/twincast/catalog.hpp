#pragma once

#include <vector>

namespace twincast {

inline constexpr int kVideoSeconds = 15;  // default playback length
inline constexpr int kMaxLayer = 3;       // base layer + 3 enhancements

struct Video {
  int id = 0;    // 1-based
  int type = 1;  // 1..C
  int length = kVideoSeconds;
  double popularity = 0.0;
  // layer_sizes[l][e-1]: bits carried by layer l in playback second e.
  // Layer 0 is the basement layer.
  std::vector<std::vector<double>> layer_sizes;

  double layer_bits(int layer, int second) const {
    return layer_sizes[static_cast<std::size_t>(layer)]
                      [static_cast<std::size_t>(second - 1)];
  }
};

struct VideoCatalog {
  std::vector<Video> videos;

  int size() const { return static_cast<int>(videos.size()); }
  const Video& by_id(int id) const { return videos[static_cast<std::size_t>(id - 1)]; }
};

}  // namespace twincast
