#include "twincast/abstraction.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace twincast {

std::vector<double> update_group_preference(
    std::span<const double> prev, double lambda_tilde,
    std::span<const std::vector<double>> samples) {
  std::vector<double> next(prev.size(), 0.0);
  for (std::size_t c = 0; c < prev.size(); ++c)
    next[c] = lambda_tilde * prev[c];
  if (samples.empty()) return next;
  std::vector<double> sum(prev.size(), 0.0);
  for (const auto& s : samples) {
    if (s.size() != prev.size())
      throw std::invalid_argument("update_group_preference: sample width mismatch");
    for (std::size_t c = 0; c < s.size(); ++c) sum[c] += s[c];
  }
  for (std::size_t c = 0; c < prev.size(); ++c)
    next[c] += sum[c] / static_cast<double>(samples.size());
  return next;
}

std::vector<double> rank_videos(const VideoCatalog& catalog,
                                std::span<const double> pref) {
  std::vector<double> scores(catalog.videos.size(), 0.0);
  for (std::size_t i = 0; i < catalog.videos.size(); ++i) {
    const Video& v = catalog.videos[i];
    const std::size_t c = static_cast<std::size_t>(v.type - 1);
    if (c >= pref.size())
      throw std::invalid_argument("rank_videos: video type beyond preference width");
    scores[i] = v.popularity * pref[c];
  }
  return scores;
}

std::vector<int> build_recommended_list(std::span<const double> scores,
                                        const VideoCatalog& catalog, int rho) {
  if (rho < 1) throw std::invalid_argument("build_recommended_list: rho < 1");
  if (scores.size() != catalog.videos.size())
    throw std::invalid_argument("build_recommended_list: score count mismatch");
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)])
      return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    return catalog.videos[static_cast<std::size_t>(a)].id <
           catalog.videos[static_cast<std::size_t>(b)].id;
  });
  const std::size_t take =
      std::min<std::size_t>(static_cast<std::size_t>(rho), order.size());
  std::vector<int> ids(take);
  for (std::size_t i = 0; i < take; ++i)
    ids[i] = catalog.videos[static_cast<std::size_t>(order[i])].id;
  return ids;
}

std::array<double, kSwipeBins> group_swipe_distribution(
    std::span<const UserTwin* const> members, const Video& video,
    GroupSwipeMode mode) {
  if (members.empty())
    throw std::invalid_argument("group_swipe_distribution: empty group");
  std::array<double, kSwipeBins> out{};
  const std::size_t c = static_cast<std::size_t>(video.type - 1);
  for (const UserTwin* t : members) {
    if (c >= t->swipe_dist.size())
      throw std::invalid_argument("group_swipe_distribution: type out of range");
    for (int e = 0; e < kSwipeBins; ++e)
      out[static_cast<std::size_t>(e)] +=
          t->swipe_dist[c][static_cast<std::size_t>(e)];
  }
  if (mode == GroupSwipeMode::Mean) {
    for (double& v : out) v /= static_cast<double>(members.size());
  } else {
    for (double& v : out) v = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

GroupProfile abstract_group(std::span<const UserTwin* const> members,
                            std::span<const double> prev_pref,
                            const VideoCatalog& catalog,
                            const SystemConfig& cfg) {
  GroupProfile profile;
  std::vector<std::vector<double>> samples;
  for (const UserTwin* t : members)
    for (const auto& s : t->prefs) samples.push_back(s);
  std::vector<double> prev(prev_pref.begin(), prev_pref.end());
  prev.resize(static_cast<std::size_t>(cfg.C), 0.0);
  profile.pref = update_group_preference(prev, cfg.lambda_tilde, samples);
  const auto scores = rank_videos(catalog, profile.pref);
  profile.rec_list = build_recommended_list(scores, catalog, cfg.rho);
  profile.rec_swipe.reserve(profile.rec_list.size());
  for (int id : profile.rec_list)
    profile.rec_swipe.push_back(group_swipe_distribution(
        members, catalog.by_id(id), cfg.group_swipe_mode));
  return profile;
}

}  // namespace twincast
