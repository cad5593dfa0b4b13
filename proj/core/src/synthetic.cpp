#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "crashml/dataset.hpp"
#include "crashml/rng.hpp"

namespace crashml {

std::vector<SpatialBlob> default_spatial_blobs() {
  // Rough urban centers across Lebanon; positions only need to be plausible.
  return {
      {33.893, 35.502, 0.035},  // Beirut
      {34.436, 35.845, 0.040},  // Tripoli
      {33.563, 35.369, 0.030},  // Saida
      {33.273, 35.194, 0.030},  // Tyre
      {33.847, 35.902, 0.040},  // Zahle
      {34.121, 35.648, 0.030},  // Byblos
      {33.851, 35.543, 0.025},  // Baabda
      {34.006, 36.218, 0.045},  // Baalbek
      {33.385, 35.484, 0.030},  // Nabatieh
      {34.255, 35.659, 0.030},  // Batroun
  };
}

DependencyPlan demo_dependency_plan() {
  DependencyPlan plan;
  plan.effects = {
      {"crash_type", "vehicle_pedestrian", 8.0},
      {"injury_severity_level", "serious_injury", 6.0},
      {"spatial_cluster_id", "3", 3.0},
      {"hour_of_crash", "3", 5.0},
  };
  plan.blobs = default_spatial_blobs();
  return plan;
}

DependencyPlan plan_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("plan JSON: ") + e.what());
  }
  DependencyPlan plan;
  if (doc.contains("effects")) {
    for (const auto& e : doc.at("effects")) {
      PlantedEffect effect;
      effect.attribute = normalize_label(e.at("attribute").get<std::string>());
      effect.category = normalize_label(e.at("category").get<std::string>());
      effect.odds_multiplier = e.at("odds_multiplier").get<double>();
      if (effect.odds_multiplier <= 0.0) {
        throw ParseError("plan JSON: odds_multiplier must be positive");
      }
      plan.effects.push_back(std::move(effect));
    }
  }
  if (doc.contains("blobs")) {
    for (const auto& b : doc.at("blobs")) {
      SpatialBlob blob;
      blob.lat = b.at("lat").get<double>();
      blob.lon = b.at("lon").get<double>();
      blob.sigma = b.value("sigma", 0.04);
      plan.blobs.push_back(blob);
    }
  }
  return plan;
}

Dataset generate_synthetic(std::size_t n, double fatality_rate,
                           const DependencyPlan& plan, std::uint64_t seed) {
  if (n < 2) throw ArgumentError("generate_synthetic: n must be >= 2");
  if (!(fatality_rate > 0.0 && fatality_rate < 1.0)) {
    throw ArgumentError("generate_synthetic: fatality_rate must lie in (0, 1)");
  }
  const double exact = fatality_rate * static_cast<double>(n);
  if (exact < 1.0) {
    throw DegenerateDataError("generate_synthetic: fatality_rate * n < 1");
  }
  std::size_t n_fatal = static_cast<std::size_t>(std::floor(exact + 0.5));
  n_fatal = std::max<std::size_t>(1, std::min(n_fatal, n - 1));

  const std::shared_ptr<const Schema> schema = lrap_schema();
  const std::size_t n_attr = schema->attribute_count();
  const std::size_t hour_attr = *schema->input_index("hour_of_crash");
  const std::size_t ampm_attr = *schema->input_index("am_pm");
  const std::size_t cluster_attr = *schema->input_index("spatial_cluster_id");
  const std::size_t cluster_domain = schema->inputs()[cluster_attr].domain.size();

  // Resolve planted effects to (attribute, category) indices up front.
  struct ResolvedEffect {
    std::size_t attr;
    std::uint16_t cat;
    double multiplier;
  };
  std::vector<ResolvedEffect> effects;
  for (const PlantedEffect& e : plan.effects) {
    const auto attr = schema->input_index(e.attribute);
    if (!attr) throw ArgumentError("plan effect: unknown attribute '" + e.attribute + "'");
    const auto cat = schema->inputs()[*attr].category_index(e.category);
    if (!cat) {
      throw DomainError("plan effect: '" + e.category + "' outside domain of '" +
                        e.attribute + "'");
    }
    if (e.odds_multiplier <= 0.0) {
      throw ArgumentError("plan effect: odds_multiplier must be positive");
    }
    effects.push_back({*attr, *cat, e.odds_multiplier});
  }

  const std::vector<SpatialBlob> blobs =
      plan.blobs.empty() ? default_spatial_blobs() : plan.blobs;

  Rng rng(derive_seed(seed, SeedStream::synth));
  std::vector<CrashRecord> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    CrashRecord& rec = rows[i];
    rec.values.assign(n_attr, 0);

    const std::size_t b = rng.next_index(blobs.size());
    double lat = blobs[b].lat + blobs[b].sigma * rng.next_normal();
    double lon = blobs[b].lon + blobs[b].sigma * rng.next_normal();
    lat = std::clamp(lat, -90.0, 90.0);
    lon = std::clamp(lon, -180.0, 180.0);
    rec.location = GeoPoint{lat, lon};
    rec.values[cluster_attr] = static_cast<std::uint16_t>(b % cluster_domain);

    for (std::size_t a = 0; a < n_attr; ++a) {
      if (a == cluster_attr || a == ampm_attr) continue;
      rec.values[a] = static_cast<std::uint16_t>(
          rng.next_index(schema->inputs()[a].domain.size()));
    }
    // am/pm is tied to the hour, as in real records.
    rec.values[ampm_attr] = rec.values[hour_attr] < 12 ? 0 : 1;
  }

  // Odds-weighted sampling without replacement picks exactly n_fatal rows.
  std::vector<double> weight(n, 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (const ResolvedEffect& e : effects) {
      if (rows[i].values[e.attr] == e.cat) weight[i] *= e.multiplier;
    }
    total += weight[i];
  }
  for (std::size_t k = 0; k < n_fatal; ++k) {
    const double r = rng.next_double() * total;
    double cum = 0.0;
    std::size_t chosen = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (weight[i] <= 0.0) continue;
      cum += weight[i];
      if (cum > r) {
        chosen = i;
        break;
      }
      chosen = i;  // fall back to the last eligible row if r hits the boundary
    }
    rows[chosen].label = Fatality::fatal;
    total -= weight[chosen];
    weight[chosen] = 0.0;
  }

  return Dataset(schema, std::move(rows));
}

}  // namespace crashml
