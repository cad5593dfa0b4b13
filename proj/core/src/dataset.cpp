#include "crashml/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "crashml/rng.hpp"

namespace crashml {

std::string normalize_label(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_sep = false;
  for (std::size_t i = 0; i < raw.size();) {
    const unsigned char c = static_cast<unsigned char>(raw[i]);
    if (std::isalnum(c)) {
      if (pending_sep && !out.empty()) out.push_back('_');
      pending_sep = false;
      out.push_back(static_cast<char>(std::tolower(c)));
      ++i;
    } else {
      pending_sep = true;
      ++i;  // any separator byte, including UTF-8 dash sequences
    }
  }
  return out;
}

std::optional<std::uint16_t> AttributeSpec::category_index(std::string_view label) const {
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (domain[i] == label) return static_cast<std::uint16_t>(i);
  }
  return std::nullopt;
}

Schema::Schema(std::vector<AttributeSpec> inputs, AttributeSpec output)
    : inputs_(std::move(inputs)), output_(std::move(output)) {
  if (output_.domain.size() != 2) {
    throw ArgumentError("Schema: output domain must have exactly 2 labels");
  }
  for (std::size_t a = 0; a < inputs_.size(); ++a) {
    const AttributeSpec& spec = inputs_[a];
    if (spec.domain.empty()) {
      throw ArgumentError("Schema: attribute '" + spec.name + "' has an empty domain");
    }
    for (std::size_t i = 0; i < spec.domain.size(); ++i) {
      for (std::size_t j = i + 1; j < spec.domain.size(); ++j) {
        if (spec.domain[i] == spec.domain[j]) {
          throw ArgumentError("Schema: attribute '" + spec.name +
                              "' has duplicate category '" + spec.domain[i] + "'");
        }
      }
    }
    if (!index_.emplace(spec.name, a).second) {
      throw ArgumentError("Schema: duplicate attribute name '" + spec.name + "'");
    }
  }
}

std::optional<std::size_t> Schema::input_index(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Schema::one_hot_width() const {
  std::size_t w = 0;
  for (const AttributeSpec& spec : inputs_) w += spec.domain.size();
  return w;
}

bool Schema::operator==(const Schema& other) const {
  if (inputs_.size() != other.inputs_.size()) return false;
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    if (inputs_[i].name != other.inputs_[i].name) return false;
    if (inputs_[i].domain != other.inputs_[i].domain) return false;
  }
  return output_.name == other.output_.name && output_.domain == other.output_.domain;
}

namespace {

std::vector<std::string> numeric_domain(int lo, int hi) {
  std::vector<std::string> d;
  d.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int v = lo; v <= hi; ++v) d.push_back(std::to_string(v));
  return d;
}

}  // namespace

std::shared_ptr<const Schema> lrap_schema() {
  std::vector<AttributeSpec> inputs;
  inputs.push_back({"month", numeric_domain(1, 12)});
  inputs.push_back({"day", numeric_domain(1, 31)});
  inputs.push_back({"day_of_the_week",
                    {"monday", "tuesday", "wednesday", "thursday", "friday",
                     "saturday", "sunday"}});
  inputs.push_back({"hour_of_crash", numeric_domain(0, 23)});
  inputs.push_back({"am_pm", {"am", "pm"}});
  inputs.push_back({"crash_type",
                    {"vehicle_vehicle", "vehicle_truck", "vehicle_pedestrian",
                     "vehicle_motorcycle", "vehicle_barrier", "truck_truck",
                     "truck_motorcycle", "truck_barrier", "motorcycle_motorcycle",
                     "motorcycle_barrier", "other"}});
  inputs.push_back({"injury_severity_level",
                    {"no_apparent_injury", "minor_injury", "serious_injury"}});
  inputs.push_back({"road_type",
                    {"motorway", "trunk", "primary", "secondary", "tertiary",
                     "unclassified"}});
  inputs.push_back({"spatial_cluster_id", numeric_domain(1, 10)});
  AttributeSpec output{"fatality", {"not_fatal", "fatal"}};
  return std::make_shared<const Schema>(std::move(inputs), std::move(output));
}

Dataset::Dataset(std::shared_ptr<const Schema> schema, std::vector<CrashRecord> rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {
  if (!schema_) throw ArgumentError("Dataset: missing schema");
  const std::size_t n_attr = schema_->attribute_count();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const CrashRecord& rec = rows_[r];
    if (rec.values.size() != n_attr) {
      throw ArgumentError("Dataset: row " + std::to_string(r) +
                          " has wrong value count");
    }
    for (std::size_t a = 0; a < n_attr; ++a) {
      if (rec.values[a] >= schema_->inputs()[a].domain.size()) {
        throw DomainError("Dataset: row " + std::to_string(r) +
                          " value out of domain for attribute '" +
                          schema_->inputs()[a].name + "'");
      }
    }
    if (rec.location) {
      if (rec.location->lat < -90.0 || rec.location->lat > 90.0 ||
          rec.location->lon < -180.0 || rec.location->lon > 180.0) {
        throw DomainError("Dataset: row " + std::to_string(r) +
                          " has out-of-range coordinates");
      }
    }
    ++counts_[class_index(rec.label)];
  }
}

Fatality Dataset::minority_class() const {
  if (counts_[0] == 0 || counts_[1] == 0) {
    throw DegenerateDataError("minority_class: both classes must be present");
  }
  return counts_[1] <= counts_[0] ? Fatality::fatal : Fatality::not_fatal;
}

const std::string& Dataset::value_name(std::size_t i, std::size_t attr) const {
  return schema_->inputs()[attr].domain[rows_[i].values[attr]];
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<CrashRecord> out;
  out.reserve(indices.size());
  for (const std::size_t i : indices) {
    if (i >= rows_.size()) throw ArgumentError("Dataset::subset: index out of range");
    out.push_back(rows_[i]);
  }
  return Dataset(schema_, std::move(out));
}

// ---------------------------------------------------------------------------
// Stratified split
// ---------------------------------------------------------------------------

SplitResult stratified_split(const Dataset& dataset, double test_fraction,
                             std::uint64_t seed) {
  const std::size_t n = dataset.size();
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ArgumentError("stratified_split: test_fraction must lie in (0, 1)");
  }
  if (dataset.count(Fatality::fatal) == 0 || dataset.count(Fatality::not_fatal) == 0) {
    throw DegenerateDataError("stratified_split: both classes must be present");
  }
  const std::size_t test_total =
      static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(n) + 0.5));
  if (test_total < 1) {
    throw ArgumentError("stratified_split: test_fraction * n must be >= 1");
  }

  // Per-class quota by largest remainder, ties to the lower class index.
  std::vector<std::size_t> class_rows[2];
  for (std::size_t i = 0; i < n; ++i) {
    class_rows[class_index(dataset.row(i).label)].push_back(i);
  }
  std::size_t quota[2];
  double remainder[2];
  std::size_t assigned = 0;
  for (int c = 0; c < 2; ++c) {
    const double exact = static_cast<double>(test_total) *
                         static_cast<double>(class_rows[c].size()) /
                         static_cast<double>(n);
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  while (assigned < test_total) {
    const int c = (remainder[0] >= remainder[1]) ? 0 : 1;
    ++quota[c];
    remainder[c] = -1.0;
    ++assigned;
  }
  for (int c = 0; c < 2; ++c) {
    quota[c] = std::min(quota[c], class_rows[c].size());
  }

  Rng rng(derive_seed(seed, SeedStream::split));
  std::vector<std::size_t> test_idx;
  std::vector<std::size_t> train_idx;
  for (int c = 0; c < 2; ++c) {
    std::vector<std::size_t>& pool = class_rows[c];
    rng.shuffle(pool);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      (i < quota[c] ? test_idx : train_idx).push_back(pool[i]);
    }
  }
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  return SplitResult{dataset.subset(train_idx), dataset.subset(test_idx),
                     std::move(train_idx), std::move(test_idx)};
}

}  // namespace crashml
