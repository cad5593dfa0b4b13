#include <doctest.h>

#include <cmath>
#include <set>

#include "crashml/rng.hpp"
#include "crashml/spatial.hpp"

using namespace crashml;

TEST_CASE("two separated pairs recover the analytic centroids") {
  // Points on the equator so the projection is the identity.
  const std::vector<GeoPoint> pts = {{0.0, 0.0}, {0.0, 2.0}, {0.0, 10.0}, {0.0, 12.0}};
  const KmeansResult r = kmeans_fit(pts, 2, 4);
  REQUIRE(r.model.centroids.size() == 2);
  std::set<double> xs;
  for (const PlanarPoint& c : r.model.centroids) {
    CHECK(c.y == doctest::Approx(0.0));
    xs.insert(c.x);
  }
  CHECK(*xs.begin() == doctest::Approx(1.0));
  CHECK(*xs.rbegin() == doctest::Approx(11.0));
  // The two near points share a cluster, likewise the two far ones.
  CHECK(r.assignments[0] == r.assignments[1]);
  CHECK(r.assignments[2] == r.assignments[3]);
  CHECK(r.assignments[0] != r.assignments[2]);
}

TEST_CASE("saturated k puts every distinct point on its own centroid") {
  const std::vector<GeoPoint> pts = {{33.1, 35.2}, {33.4, 35.9}, {34.0, 35.5},
                                     {33.8, 36.1}, {33.8, 36.1}};
  const KmeansResult r = kmeans_fit(pts, 4, 8);
  CHECK(r.model.inertia == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fewer distinct points than k is degenerate") {
  const std::vector<GeoPoint> pts = {{33.0, 35.0}, {33.0, 35.0}, {33.0, 35.0}};
  CHECK_THROWS_AS(kmeans_fit(pts, 2, 1), DegenerateDataError);
  CHECK_THROWS_AS(kmeans_fit(pts, 5, 1), ArgumentError);  // fewer points than k
}

TEST_CASE("default k=10 fit assigns ids in 1..10") {
  Rng rng(17);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 400; ++i) {
    pts.push_back({33.0 + 1.5 * rng.next_double(), 35.0 + 1.5 * rng.next_double()});
  }
  const KmeansResult r = kmeans_fit(pts, 10, 29);
  std::set<int> ids;
  for (const int a : r.assignments) {
    CHECK(a >= 1);
    CHECK(a <= 10);
    ids.insert(a);
  }
  CHECK(ids.size() == 10);
}

TEST_CASE("inertia history never increases") {
  Rng rng(3);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 200; ++i) {
    pts.push_back({33.0 + rng.next_double(), 35.0 + 2.0 * rng.next_double()});
  }
  const KmeansResult r = kmeans_fit(pts, 6, 5);
  REQUIRE(r.model.inertia_history.size() >= 2);
  for (std::size_t i = 1; i < r.model.inertia_history.size(); ++i) {
    CHECK(r.model.inertia_history[i] <= r.model.inertia_history[i - 1] + 1e-12);
  }
}

TEST_CASE("refitting with the same seed reproduces centroids bit for bit") {
  Rng rng(31);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 150; ++i) {
    pts.push_back({33.0 + rng.next_double(), 35.0 + rng.next_double()});
  }
  const KmeansResult a = kmeans_fit(pts, 5, 42);
  const KmeansResult b = kmeans_fit(pts, 5, 42);
  REQUIRE(a.model.centroids.size() == b.model.centroids.size());
  for (std::size_t c = 0; c < a.model.centroids.size(); ++c) {
    CHECK(a.model.centroids[c].x == b.model.centroids[c].x);
    CHECK(a.model.centroids[c].y == b.model.centroids[c].y);
  }
  CHECK(a.assignments == b.assignments);
}

TEST_CASE("assignment matches a brute-force nearest-centroid scan") {
  Rng rng(7);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 120; ++i) {
    pts.push_back({33.0 + rng.next_double(), 35.0 + rng.next_double()});
  }
  const KmeansResult r = kmeans_fit(pts, 7, 3);
  for (int i = 0; i < 200; ++i) {
    const GeoPoint q{33.0 + rng.next_double(), 35.0 + rng.next_double()};
    const PlanarPoint p = r.model.project(q);
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < r.model.centroids.size(); ++c) {
      const double dx = p.x - r.model.centroids[c].x;
      const double dy = p.y - r.model.centroids[c].y;
      const double d = dx * dx + dy * dy;
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c) + 1;
      }
    }
    CHECK(kmeans_assign(r.model, q) == best);
  }
}

TEST_CASE("exact centroid point maps to its own id and ties break low") {
  ClusterModel model;
  model.k = 3;
  model.lon_scale = 1.0;
  model.centroids = {{0.0, 0.0}, {2.0, 0.0}, {4.0, 0.0}};
  CHECK(kmeans_assign(model, GeoPoint{0.0, 2.0}) == 2);  // exactly centroid 2
  // (0,1) is equidistant from centroids 1 and 2 -> lowest index wins.
  CHECK(kmeans_assign(model, GeoPoint{0.0, 1.0}) == 1);
  // Equidistant between 2 and 3.
  CHECK(kmeans_assign(model, GeoPoint{0.0, 3.0}) == 2);
}
