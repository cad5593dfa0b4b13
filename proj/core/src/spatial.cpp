#include "crashml/spatial.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "crashml/rng.hpp"

namespace crashml {

namespace {

double sq_dist(const PlanarPoint& a, const PlanarPoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// k-means++: first centroid uniform, then proportional to squared distance
// from the nearest chosen centroid. The D^2 draw walks a prefix sum, which
// keeps the whole procedure free of platform-dependent math.
std::vector<PlanarPoint> kmeanspp_seed(const std::vector<PlanarPoint>& pts, int k,
                                       Rng& rng) {
  std::vector<PlanarPoint> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  centroids.push_back(pts[rng.next_index(pts.size())]);

  std::vector<double> dist2(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) dist2[i] = sq_dist(pts[i], centroids[0]);

  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (const double d : dist2) total += d;
    std::size_t chosen = 0;
    if (total > 0.0) {
      const double r = rng.next_double() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        cum += dist2[i];
        if (cum > r) {
          chosen = i;
          break;
        }
        chosen = i;
      }
    } else {
      // All remaining points coincide with a centroid; pick any unused one.
      chosen = rng.next_index(pts.size());
    }
    centroids.push_back(pts[chosen]);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      dist2[i] = std::min(dist2[i], sq_dist(pts[i], centroids.back()));
    }
  }
  return centroids;
}

}  // namespace

KmeansResult kmeans_fit(const std::vector<GeoPoint>& points, int k,
                        std::uint64_t seed, int max_iter, double tol) {
  if (k < 1) throw ArgumentError("kmeans_fit: k must be >= 1");
  if (points.size() < static_cast<std::size_t>(k)) {
    throw ArgumentError("kmeans_fit: fewer points than clusters");
  }

  ClusterModel model;
  model.k = k;
  double lat_sum = 0.0;
  for (const GeoPoint& p : points) lat_sum += p.lat;
  model.mean_lat = lat_sum / static_cast<double>(points.size());
  model.lon_scale = std::cos(model.mean_lat * M_PI / 180.0);

  std::vector<PlanarPoint> pts(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) pts[i] = model.project(points[i]);

  // Distinct-point count drives the degeneracy check.
  {
    std::vector<PlanarPoint> uniq = pts;
    std::sort(uniq.begin(), uniq.end(), [](const PlanarPoint& a, const PlanarPoint& b) {
      return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    uniq.erase(std::unique(uniq.begin(), uniq.end(),
                           [](const PlanarPoint& a, const PlanarPoint& b) {
                             return a.x == b.x && a.y == b.y;
                           }),
               uniq.end());
    if (uniq.size() < static_cast<std::size_t>(k)) {
      throw DegenerateDataError("kmeans_fit: fewer distinct points than clusters");
    }
  }

  Rng rng(derive_seed(seed, SeedStream::kmeans));
  std::vector<PlanarPoint> centroids = kmeanspp_seed(pts, k, rng);
  std::vector<int> assign(pts.size(), 0);

  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment step.
    double inertia = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d = sq_dist(pts[i], centroids[static_cast<std::size_t>(c)]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      assign[i] = best_c;
      inertia += best;
    }
    assert(model.inertia_history.empty() || inertia <= model.inertia_history.back() + 1e-12);
    model.inertia_history.push_back(inertia);
    model.inertia = inertia;

    // Update step.
    std::vector<double> sx(static_cast<std::size_t>(k), 0.0);
    std::vector<double> sy(static_cast<std::size_t>(k), 0.0);
    std::vector<std::size_t> count(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto c = static_cast<std::size_t>(assign[i]);
      sx[c] += pts[i].x;
      sy[c] += pts[i].y;
      ++count[c];
    }

    double max_shift2 = 0.0;
    for (int c = 0; c < k; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      PlanarPoint next;
      if (count[ci] > 0) {
        next = {sx[ci] / static_cast<double>(count[ci]),
                sy[ci] / static_cast<double>(count[ci])};
      } else {
        // Re-seed an empty cluster at the point farthest from its centroid;
        // that point's distance drops to zero, so inertia cannot go up.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const double d = sq_dist(pts[i], centroids[static_cast<std::size_t>(assign[i])]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        next = pts[far];
      }
      max_shift2 = std::max(max_shift2, sq_dist(next, centroids[ci]));
      centroids[ci] = next;
    }
    if (std::sqrt(max_shift2) < tol && iter > 0) break;
  }

  // Final assignment against the converged centroids.
  double inertia = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (int c = 0; c < k; ++c) {
      const double d = sq_dist(pts[i], centroids[static_cast<std::size_t>(c)]);
      if (d < best) {
        best = d;
        best_c = c;
      }
    }
    assign[i] = best_c + 1;  // 1-based ids
    inertia += best;
  }
  model.inertia_history.push_back(inertia);
  model.inertia = inertia;
  model.centroids = std::move(centroids);

  return KmeansResult{std::move(model), std::move(assign)};
}

int kmeans_assign(const ClusterModel& model, const GeoPoint& point) {
  if (model.centroids.empty()) throw StateError("kmeans_assign: model is not fitted");
  const PlanarPoint p = model.project(point);
  double best = std::numeric_limits<double>::infinity();
  int best_c = 0;
  for (std::size_t c = 0; c < model.centroids.size(); ++c) {
    const double d = sq_dist(p, model.centroids[c]);
    if (d < best) {  // strict: ties stay with the lowest index
      best = d;
      best_c = static_cast<int>(c);
    }
  }
  return best_c + 1;
}

}  // namespace crashml
