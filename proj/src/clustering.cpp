#include "twincast/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace twincast {

namespace {

double sq_euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Renumber groups by smallest member index so group identity is stable for
// stable memberships; drops empty groups.
Partition canonicalize(Partition p) {
  const int g = p.groups();
  std::vector<int> smallest(static_cast<std::size_t>(g),
                            std::numeric_limits<int>::max());
  for (std::size_t u = 0; u < p.assignment.size(); ++u) {
    int& s = smallest[static_cast<std::size_t>(p.assignment[u])];
    s = std::min(s, static_cast<int>(u));
  }
  std::vector<int> order;
  for (int i = 0; i < g; ++i)
    if (smallest[static_cast<std::size_t>(i)] != std::numeric_limits<int>::max())
      order.push_back(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return smallest[static_cast<std::size_t>(a)] <
           smallest[static_cast<std::size_t>(b)];
  });
  std::vector<int> remap(static_cast<std::size_t>(g), -1);
  for (std::size_t i = 0; i < order.size(); ++i)
    remap[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
  Partition out;
  out.assignment.resize(p.assignment.size());
  for (std::size_t u = 0; u < p.assignment.size(); ++u)
    out.assignment[u] = remap[static_cast<std::size_t>(p.assignment[u])];
  out.centroids.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    out.centroids[i] = std::move(p.centroids[static_cast<std::size_t>(order[i])]);
  return out;
}

}  // namespace

double twin_distance(const TwinFeature& a, const TwinFeature& b) {
  if (a.offsets != b.offsets || a.data.size() != b.data.size())
    throw std::invalid_argument("twin_distance: feature layouts differ");
  double total = 0.0;
  for (std::size_t blk = 0; blk + 1 < a.offsets.size(); ++blk) {
    double s = 0.0;
    for (std::size_t i = a.offsets[blk]; i < a.offsets[blk + 1]; ++i) {
      const double d = a.data[i] - b.data[i];
      s += d * d;
    }
    total += std::sqrt(s);
  }
  return total;
}

std::vector<double> seed_selection_probabilities(
    std::span<const double> distances) {
  double total = 0.0;
  for (double d : distances) total += d * d;
  std::vector<double> probs(distances.size(), 0.0);
  if (!(total > 0.0)) return probs;
  for (std::size_t i = 0; i < distances.size(); ++i)
    probs[i] = distances[i] * distances[i] / total;
  return probs;
}

std::vector<int> kmeanspp_seed(std::span<const TwinFeature> features,
                               int lambda, Rng& rng) {
  const int n = static_cast<int>(features.size());
  if (lambda > n)
    throw std::invalid_argument("kmeanspp_seed: lambda exceeds population");
  if (lambda < 1) throw std::invalid_argument("kmeanspp_seed: lambda < 1");
  std::vector<int> chosen;
  std::vector<bool> is_chosen(static_cast<std::size_t>(n), false);
  std::vector<double> nearest(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());

  int first = rng.uniform_int(0, n - 1);
  chosen.push_back(first);
  is_chosen[static_cast<std::size_t>(first)] = true;

  while (static_cast<int>(chosen.size()) < lambda) {
    const int last = chosen.back();
    std::vector<double> weights(static_cast<std::size_t>(n), 0.0);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      if (is_chosen[static_cast<std::size_t>(i)]) continue;
      const double d = twin_distance(features[static_cast<std::size_t>(i)],
                                     features[static_cast<std::size_t>(last)]);
      nearest[static_cast<std::size_t>(i)] =
          std::min(nearest[static_cast<std::size_t>(i)], d);
      const double nd = nearest[static_cast<std::size_t>(i)];
      weights[static_cast<std::size_t>(i)] = nd * nd;
      total += nd * nd;
    }
    int pick = -1;
    if (total > 0.0) {
      pick = static_cast<int>(rng.sample_discrete(weights));
    } else {
      // Only coincident candidates remain; take the smallest unchosen index.
      for (int i = 0; i < n; ++i) {
        if (!is_chosen[static_cast<std::size_t>(i)]) {
          pick = i;
          break;
        }
      }
    }
    chosen.push_back(pick);
    is_chosen[static_cast<std::size_t>(pick)] = true;
  }
  return chosen;
}

KMeansResult kmeans_cluster(std::span<const TwinFeature> features, int lambda,
                            int max_iter, double tol, Rng& rng) {
  const int n = static_cast<int>(features.size());
  if (n == 0) throw std::invalid_argument("kmeans_cluster: no features");
  lambda = std::min(lambda, n);
  const std::size_t dim = features[0].data.size();

  KMeansResult result;
  std::vector<std::vector<double>> centroids;
  for (int idx : kmeanspp_seed(features, lambda, rng))
    centroids.push_back(features[static_cast<std::size_t>(idx)].data);

  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment step.
    double wcss = 0.0;
    for (int u = 0; u < n; ++u) {
      double best = std::numeric_limits<double>::infinity();
      int best_g = 0;
      for (int g = 0; g < lambda; ++g) {
        const double d = sq_euclidean(features[static_cast<std::size_t>(u)].data,
                                      centroids[static_cast<std::size_t>(g)]);
        if (d < best) {
          best = d;
          best_g = g;
        }
      }
      assign[static_cast<std::size_t>(u)] = best_g;
      wcss += best;
    }

    // Repair empty clusters with the globally farthest point.
    std::vector<int> count(static_cast<std::size_t>(lambda), 0);
    for (int a : assign) count[static_cast<std::size_t>(a)]++;
    for (int g = 0; g < lambda; ++g) {
      if (count[static_cast<std::size_t>(g)] > 0) continue;
      int far_u = -1;
      double far_d = -1.0;
      for (int u = 0; u < n; ++u) {
        const int au = assign[static_cast<std::size_t>(u)];
        if (count[static_cast<std::size_t>(au)] <= 1) continue;
        const double d = sq_euclidean(features[static_cast<std::size_t>(u)].data,
                                      centroids[static_cast<std::size_t>(au)]);
        if (d > far_d) {
          far_d = d;
          far_u = u;
        }
      }
      if (far_u < 0) continue;  // all clusters singletons already
      count[static_cast<std::size_t>(assign[static_cast<std::size_t>(far_u)])]--;
      assign[static_cast<std::size_t>(far_u)] = g;
      count[static_cast<std::size_t>(g)] = 1;
      centroids[static_cast<std::size_t>(g)] =
          features[static_cast<std::size_t>(far_u)].data;
    }

    // Recompute WCSS after any repair so the history is consistent.
    wcss = 0.0;
    for (int u = 0; u < n; ++u)
      wcss += sq_euclidean(features[static_cast<std::size_t>(u)].data,
                           centroids[static_cast<std::size_t>(
                               assign[static_cast<std::size_t>(u)])]);
    result.wcss_history.push_back(wcss);
    result.iterations = iter + 1;

    // Update step.
    std::vector<std::vector<double>> next(
        static_cast<std::size_t>(lambda), std::vector<double>(dim, 0.0));
    std::vector<int> sizes(static_cast<std::size_t>(lambda), 0);
    for (int u = 0; u < n; ++u) {
      const auto& x = features[static_cast<std::size_t>(u)].data;
      auto& c = next[static_cast<std::size_t>(assign[static_cast<std::size_t>(u)])];
      for (std::size_t i = 0; i < dim; ++i) c[i] += x[i];
      sizes[static_cast<std::size_t>(assign[static_cast<std::size_t>(u)])]++;
    }
    double shift = 0.0;
    for (int g = 0; g < lambda; ++g) {
      auto& c = next[static_cast<std::size_t>(g)];
      const int sz = sizes[static_cast<std::size_t>(g)];
      if (sz > 0)
        for (double& v : c) v /= static_cast<double>(sz);
      else
        c = centroids[static_cast<std::size_t>(g)];
      shift = std::max(shift,
                       std::sqrt(sq_euclidean(c, centroids[static_cast<std::size_t>(g)])));
      centroids[static_cast<std::size_t>(g)] = std::move(c);
    }
    if (shift < tol) break;
  }

  Partition p;
  p.assignment = std::move(assign);
  p.centroids = std::move(centroids);
  result.partition = canonicalize(std::move(p));
  return result;
}

Partition dbscan_cluster(std::span<const TwinFeature> features, double eps,
                         int min_pts) {
  if (!(eps > 0.0)) throw std::invalid_argument("dbscan_cluster: eps <= 0");
  if (min_pts < 1) throw std::invalid_argument("dbscan_cluster: min_pts < 1");
  const int n = static_cast<int>(features.size());
  std::vector<std::vector<int>> neighbors(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (twin_distance(features[static_cast<std::size_t>(i)],
                        features[static_cast<std::size_t>(j)]) <= eps)
        neighbors[static_cast<std::size_t>(i)].push_back(j);
    }
  }
  constexpr int kUnvisited = -2, kNoise = -1;
  std::vector<int> label(static_cast<std::size_t>(n), kUnvisited);
  int next_group = 0;
  for (int i = 0; i < n; ++i) {
    if (label[static_cast<std::size_t>(i)] != kUnvisited) continue;
    if (static_cast<int>(neighbors[static_cast<std::size_t>(i)].size()) < min_pts) {
      label[static_cast<std::size_t>(i)] = kNoise;
      continue;
    }
    const int g = next_group++;
    label[static_cast<std::size_t>(i)] = g;
    std::vector<int> frontier = neighbors[static_cast<std::size_t>(i)];
    for (std::size_t fi = 0; fi < frontier.size(); ++fi) {
      const int q = frontier[fi];
      if (label[static_cast<std::size_t>(q)] == kNoise)
        label[static_cast<std::size_t>(q)] = g;  // border point
      if (label[static_cast<std::size_t>(q)] != kUnvisited) continue;
      label[static_cast<std::size_t>(q)] = g;
      if (static_cast<int>(neighbors[static_cast<std::size_t>(q)].size()) >= min_pts)
        frontier.insert(frontier.end(),
                        neighbors[static_cast<std::size_t>(q)].begin(),
                        neighbors[static_cast<std::size_t>(q)].end());
    }
  }
  // Noise points become singleton groups.
  for (int i = 0; i < n; ++i)
    if (label[static_cast<std::size_t>(i)] == kNoise)
      label[static_cast<std::size_t>(i)] = next_group++;

  Partition p;
  p.assignment = label;
  p.centroids.assign(static_cast<std::size_t>(next_group), {});
  std::vector<int> sizes(static_cast<std::size_t>(next_group), 0);
  const std::size_t dim = n > 0 ? features[0].data.size() : 0;
  for (auto& c : p.centroids) c.assign(dim, 0.0);
  for (int u = 0; u < n; ++u) {
    auto& c = p.centroids[static_cast<std::size_t>(label[static_cast<std::size_t>(u)])];
    const auto& x = features[static_cast<std::size_t>(u)].data;
    for (std::size_t i = 0; i < dim; ++i) c[i] += x[i];
    sizes[static_cast<std::size_t>(label[static_cast<std::size_t>(u)])]++;
  }
  for (std::size_t g = 0; g < p.centroids.size(); ++g)
    for (double& v : p.centroids[g])
      v /= static_cast<double>(std::max(1, sizes[g]));
  return canonicalize(std::move(p));
}

std::vector<std::vector<int>> partition_members(const Partition& p) {
  std::vector<std::vector<int>> members(static_cast<std::size_t>(p.groups()));
  for (std::size_t u = 0; u < p.assignment.size(); ++u)
    members[static_cast<std::size_t>(p.assignment[u])].push_back(
        static_cast<int>(u));
  return members;
}

}  // namespace twincast
