#include "twincast/demand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twincast {

namespace {

void check_entry(const RecEntry& r) {
  if (r.video == nullptr)
    throw std::invalid_argument("demand: null video in rec list");
  if (r.video->length < 1 || r.video->length > kSwipeBins)
    throw std::invalid_argument("demand: video length outside 1..15");
}

}  // namespace

double engagement_time(std::span<const RecEntry> rec, DemandMode mode) {
  double w = 0.0;
  for (const RecEntry& r : rec) {
    check_entry(r);
    for (int e = 1; e <= r.video->length; ++e) {
      const double survive = 1.0 - r.swipe[static_cast<std::size_t>(e - 1)];
      w += mode == DemandMode::Literal ? survive * e : survive;
    }
  }
  return w;
}

double video_traffic(std::span<const RecEntry> rec, int l_bar,
                     DemandMode mode) {
  if (l_bar < 0 || l_bar > kMaxLayer)
    throw std::invalid_argument("video_traffic: l_bar outside 0..3");
  const int lo = mode == DemandMode::Literal ? 1 : 0;
  double y = 0.0;
  for (const RecEntry& r : rec) {
    check_entry(r);
    for (int e = 1; e <= r.video->length; ++e) {
      const double survive = 1.0 - r.swipe[static_cast<std::size_t>(e - 1)];
      double bits = 0.0;
      for (int l = lo; l <= l_bar; ++l) bits += r.video->layer_bits(l, e);
      y += survive * bits;
    }
  }
  return y;
}

double base_layer_traffic(std::span<const RecEntry> rec) {
  double y0 = 0.0;
  for (const RecEntry& r : rec) {
    check_entry(r);
    for (int e = 1; e <= r.video->length; ++e)
      y0 += (1.0 - r.swipe[static_cast<std::size_t>(e - 1)]) *
            r.video->layer_bits(0, e);
  }
  return y0;
}

double bandwidth_demand(double W, double Y, DemandMode mode) {
  if (mode == DemandMode::Literal) return Y > 0.0 ? W / Y : 0.0;
  return W > 0.0 ? Y / W : 0.0;
}

double computing_consumption(double Y, std::span<const RecEntry> rec,
                             double mu, DemandMode mode) {
  if (!(mu > 0.0))
    throw std::invalid_argument("computing_consumption: mu must be > 0");
  const double z = mu * (Y - base_layer_traffic(rec));
  if (mode == DemandMode::Literal) return std::max(0.0, z);
  return z;
}

double computing_demand(double Z, double W, double Y, DemandMode mode) {
  if (mode == DemandMode::Literal) return Y > 0.0 ? Z / Y : 0.0;
  return W > 0.0 ? Z / W : 0.0;
}

int average_version(std::span<const int> prev_versions) {
  if (prev_versions.empty()) return 1;
  double sum = 0.0;
  for (int v : prev_versions) sum += v;
  const long r = std::lround(sum / static_cast<double>(prev_versions.size()));
  return static_cast<int>(std::clamp<long>(r, 0, kMaxLayer));
}

DemandEstimate predict_demand(std::span<const RecEntry> rec, int l_bar,
                              double mu, DemandMode mode) {
  DemandEstimate d;
  d.l_bar = l_bar;
  d.W = engagement_time(rec, mode);
  d.Y = video_traffic(rec, l_bar, mode);
  d.Z = computing_consumption(d.Y, rec, mu, mode);
  d.R = bandwidth_demand(d.W, d.Y, mode);
  d.O = computing_demand(d.Z, d.W, d.Y, mode);
  return d;
}

std::vector<RecEntry> make_rec_entries(const GroupProfile& profile,
                                       const VideoCatalog& catalog,
                                       bool swipe_aware) {
  std::vector<RecEntry> rec;
  rec.reserve(profile.rec_list.size());
  for (std::size_t i = 0; i < profile.rec_list.size(); ++i) {
    RecEntry r;
    r.video = &catalog.by_id(profile.rec_list[i]);
    if (swipe_aware)
      r.swipe = profile.rec_swipe[i];
    else
      r.swipe.fill(0.0);
    rec.push_back(r);
  }
  return rec;
}

}  // namespace twincast
