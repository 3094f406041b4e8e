#include "twincast/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twincast {

namespace {

// Raw (un-normalized) attribute block for one twin.
std::vector<double> channel_block(const UserTwin& t, int F1) {
  std::vector<double> v(t.channel.begin(), t.channel.end());
  v.resize(static_cast<std::size_t>(F1), 0.0);
  return v;
}

std::vector<double> location_block(const UserTwin& t, int F1) {
  std::vector<double> v;
  v.reserve(2 * static_cast<std::size_t>(F1));
  for (const auto& p : t.location) {
    v.push_back(p[0]);
    v.push_back(p[1]);
  }
  v.resize(2 * static_cast<std::size_t>(F1), 0.0);
  return v;
}

std::vector<double> swipe_block(const UserTwin& t, int F2) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(F2));
  for (const auto& s : t.swipes) v.push_back(s.timestamp);
  // Completion sentinel: the video ran to its end.
  v.resize(static_cast<std::size_t>(F2), static_cast<double>(kSwipeBins));
  return v;
}

std::vector<double> pref_block(const UserTwin& t, int F2, int C) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(F2 * C));
  for (const auto& sample : t.prefs)
    v.insert(v.end(), sample.begin(), sample.end());
  v.resize(static_cast<std::size_t>(F2 * C), 0.0);
  return v;
}

void zscore_block(std::vector<TwinFeature>& feats, std::size_t block) {
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto& f : feats) {
    for (std::size_t i = f.offsets[block]; i < f.offsets[block + 1]; ++i) {
      sum += f.data[i];
      sq += f.data[i] * f.data[i];
      ++n;
    }
  }
  if (n == 0) return;
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, sq / static_cast<double>(n) - mean * mean);
  const double sd = std::sqrt(var);
  const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
  for (auto& f : feats) {
    for (std::size_t i = f.offsets[block]; i < f.offsets[block + 1]; ++i)
      f.data[i] = (f.data[i] - mean) * scale;
  }
}

struct SeriesStats {
  double mean, sd, min, max, last, slope;
};

SeriesStats series_stats(std::span<const double> s) {
  SeriesStats st{0, 0, 0, 0, 0, 0};
  const std::size_t n = s.size();
  if (n == 0) return st;
  double sum = 0, sq = 0;
  st.min = s[0];
  st.max = s[0];
  for (double v : s) {
    sum += v;
    sq += v * v;
    st.min = std::min(st.min, v);
    st.max = std::max(st.max, v);
  }
  st.mean = sum / static_cast<double>(n);
  st.sd = std::sqrt(std::max(0.0, sq / static_cast<double>(n) - st.mean * st.mean));
  st.last = s[n - 1];
  if (n >= 2) {
    // Least-squares slope against index 0..n-1.
    const double xm = (static_cast<double>(n) - 1.0) / 2.0;
    double num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = static_cast<double>(i) - xm;
      num += dx * (s[i] - st.mean);
      den += dx * dx;
    }
    st.slope = den > 0 ? num / den : 0.0;
  }
  return st;
}

}  // namespace

std::vector<TwinFeature> build_features(std::span<const UserTwin> twins,
                                        FeatureSet set, int F1, int F2, int C) {
  std::vector<TwinFeature> feats(twins.size());
  for (std::size_t u = 0; u < twins.size(); ++u) {
    const UserTwin& t = twins[u];
    std::vector<std::vector<double>> blocks;
    if (set == FeatureSet::Full) {
      blocks.push_back(channel_block(t, F1));
      blocks.push_back(location_block(t, F1));
      blocks.push_back(swipe_block(t, F2));
      blocks.push_back(pref_block(t, F2, C));
    } else {
      blocks.push_back(location_block(t, F1));
      blocks.push_back(pref_block(t, F2, C));
    }
    TwinFeature& f = feats[u];
    f.offsets.push_back(0);
    for (auto& b : blocks) {
      f.data.insert(f.data.end(), b.begin(), b.end());
      f.offsets.push_back(f.data.size());
    }
  }
  if (!feats.empty()) {
    for (std::size_t b = 0; b + 1 < feats[0].offsets.size(); ++b)
      zscore_block(feats, b);
  }
  return feats;
}

std::vector<double> summarize_features(std::span<const UserTwin> twins) {
  if (twins.empty())
    throw std::invalid_argument("summarize_features: need at least one twin");
  // One scalar series per attribute per user.
  std::vector<std::vector<SeriesStats>> per_attr(4);
  for (const UserTwin& t : twins) {
    per_attr[0].push_back(series_stats(t.channel));
    std::vector<double> dist;
    dist.reserve(t.location.size());
    for (const auto& p : t.location)
      dist.push_back(std::hypot(p[0], p[1]));
    per_attr[1].push_back(series_stats(dist));
    std::vector<double> sw;
    for (const auto& s : t.swipes) sw.push_back(s.timestamp);
    if (sw.empty()) sw.push_back(static_cast<double>(kSwipeBins));
    per_attr[2].push_back(series_stats(sw));
    std::vector<double> pm;
    for (const auto& sample : t.prefs) {
      double sum = 0;
      for (double v : sample) sum += v;
      pm.push_back(sample.empty() ? 0.0 : sum / static_cast<double>(sample.size()));
    }
    if (pm.empty()) pm.push_back(0.0);
    per_attr[3].push_back(series_stats(pm));
  }

  std::vector<double> out;
  out.reserve(kSummaryLength);
  for (const auto& stats : per_attr) {
    for (int stat = 0; stat < 6; ++stat) {
      std::vector<double> vals;
      vals.reserve(stats.size());
      for (const auto& st : stats) {
        const double v = stat == 0   ? st.mean
                         : stat == 1 ? st.sd
                         : stat == 2 ? st.min
                         : stat == 3 ? st.max
                         : stat == 4 ? st.last
                                     : st.slope;
        vals.push_back(v);
      }
      const SeriesStats agg = series_stats(vals);
      out.push_back(agg.mean);
      out.push_back(agg.sd);
    }
  }
  return out;
}

}  // namespace twincast
