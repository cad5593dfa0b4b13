#pragma once

#include <cstdint>
#include <vector>

#include "crashml/dataset.hpp"

namespace crashml {

/// Planar point used for clustering: an equirectangular projection of
/// (lat, lon) with longitude scaled by cos(mean latitude). At Lebanon's
/// ~2 degree extent the projection error is negligible.
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
};

struct ClusterModel {
  int k = 0;
  std::vector<PlanarPoint> centroids;
  double inertia = 0.0;                  // sum of squared distances at the end
  double mean_lat = 0.0;                 // projection parameter
  double lon_scale = 1.0;                // cos(mean_lat in radians)
  std::vector<double> inertia_history;   // one entry per Lloyd assignment step

  PlanarPoint project(const GeoPoint& p) const {
    return {p.lon * lon_scale, p.lat};
  }
};

struct KmeansResult {
  ClusterModel model;
  std::vector<int> assignments;  // 1-based cluster ids, aligned with the input
};

/// Lloyd's algorithm with k-means++ seeding. Iterates until the largest
/// centroid move drops below tol or max_iter is reached. Empty clusters are
/// re-seeded at the point farthest from its assigned centroid. Requires at
/// least k distinct points. Bit-reproducible for a given seed.
KmeansResult kmeans_fit(const std::vector<GeoPoint>& points, int k,
                        std::uint64_t seed, int max_iter = 100,
                        double tol = 1e-10);

/// 1-based index of the nearest centroid; ties break toward the lowest index.
int kmeans_assign(const ClusterModel& model, const GeoPoint& point);

}  // namespace crashml
