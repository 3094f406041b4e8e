#pragma once

#include <span>
#include <vector>

#include "twincast/features.hpp"
#include "twincast/rng.hpp"

namespace twincast {

struct Partition {
  std::vector<int> assignment;  // user index -> group index, 0-based
  std::vector<std::vector<double>> centroids;

  int groups() const { return static_cast<int>(centroids.size()); }
};

// Twin similarity: sum of the per-attribute Euclidean norms over the
// feature blocks. Throws on block/dimension mismatch.
double twin_distance(const TwinFeature& a, const TwinFeature& b);

// Seeding probabilities proportional to squared distance; sums to 1.
std::vector<double> seed_selection_probabilities(
    std::span<const double> distances);

// K-means++ seeding over twin_distance: first centroid uniform, each next
// drawn proportional to squared distance to the nearest chosen centroid.
// Coincident points (distance 0) have zero selection probability while
// distinct candidates remain. Returns the chosen point indices.
std::vector<int> kmeanspp_seed(std::span<const TwinFeature> features,
                               int lambda, Rng& rng);

struct KMeansResult {
  Partition partition;
  std::vector<double> wcss_history;  // after each assignment step
  int iterations = 0;
};

// Lloyd iterations on the concatenated feature vector until the largest
// centroid shift drops below tol or max_iter is reached. Empty clusters are
// repaired by reassigning the point farthest from its centroid. Groups are
// renumbered by their smallest member index.
KMeansResult kmeans_cluster(std::span<const TwinFeature> features, int lambda,
                            int max_iter, double tol, Rng& rng);

// Standard DBSCAN over twin_distance. Noise points become singleton groups
// so every user is served. Centroids are member means.
Partition dbscan_cluster(std::span<const TwinFeature> features, double eps,
                         int min_pts);

// Group member lists in group order.
std::vector<std::vector<int>> partition_members(const Partition& p);

}  // namespace twincast
