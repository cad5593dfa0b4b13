#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crashml/errors.hpp"

namespace crashml {

enum class Fatality : std::uint8_t { not_fatal = 0, fatal = 1 };

constexpr int class_index(Fatality f) { return static_cast<int>(f); }
constexpr int label_pm(Fatality f) { return f == Fatality::fatal ? +1 : -1; }

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

/// Canonical spelling for attribute and category names: lower case, with
/// runs of non-alphanumeric characters collapsed to single underscores
/// ("Vehicle-Pedestrian" -> "vehicle_pedestrian"). Applied to everything
/// read from CSV headers and cells.
std::string normalize_label(std::string_view raw);

/// One categorical input variable and its admissible category labels.
struct AttributeSpec {
  std::string name;
  std::vector<std::string> domain;

  /// Index of a (already normalized) category label, if admissible.
  std::optional<std::uint16_t> category_index(std::string_view label) const;
};

/// The fixed record layout: categorical inputs plus a binary fatality
/// output whose positive (minority) class is "fatal".
class Schema {
 public:
  Schema(std::vector<AttributeSpec> inputs, AttributeSpec output);

  const std::vector<AttributeSpec>& inputs() const { return inputs_; }
  const AttributeSpec& output() const { return output_; }
  std::size_t attribute_count() const { return inputs_.size(); }
  std::optional<std::size_t> input_index(std::string_view name) const;

  /// Total one-hot width: sum of the input domain sizes.
  std::size_t one_hot_width() const;

  bool operator==(const Schema& other) const;

 private:
  std::vector<AttributeSpec> inputs_;
  AttributeSpec output_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// The nine-input crash schema: month (1-12), day (1-31), day of the week,
/// hour of crash (0-23), am/pm, crash type (11 categories), injury severity
/// level (3), road type (6) and spatial cluster id (1-10).
std::shared_ptr<const Schema> lrap_schema();

/// One crash. `values[i]` indexes into `schema.inputs()[i].domain`.
struct CrashRecord {
  std::vector<std::uint16_t> values;
  Fatality label = Fatality::not_fatal;
  std::optional<GeoPoint> location;
};

/// An immutable, schema-conforming collection of crash records.
class Dataset {
 public:
  Dataset(std::shared_ptr<const Schema> schema, std::vector<CrashRecord> rows);

  const Schema& schema() const { return *schema_; }
  const std::shared_ptr<const Schema>& schema_ptr() const { return schema_; }
  const std::vector<CrashRecord>& rows() const { return rows_; }
  const CrashRecord& row(std::size_t i) const { return rows_[i]; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  std::size_t count(Fatality f) const { return counts_[class_index(f)]; }

  /// The rarer class; requires both classes present.
  Fatality minority_class() const;

  /// Category label of row `i`, attribute `attr`.
  const std::string& value_name(std::size_t i, std::size_t attr) const;

  /// New dataset from the rows at `indices` (repeats allowed, order kept).
  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  std::shared_ptr<const Schema> schema_;
  std::vector<CrashRecord> rows_;
  std::size_t counts_[2] = {0, 0};
};

// ---------------------------------------------------------------------------
// CSV
//
// UTF-8, comma separated, mandatory header. Columns: the schema's attribute
// names plus "fatality" ("fatal" / "not_fatal", case-insensitive), plus
// optional "lat" and "lon". Any column order is accepted on read; writes use
// schema order. Values are normalized with normalize_label on read.
// ---------------------------------------------------------------------------

Dataset parse_csv(std::istream& in, std::shared_ptr<const Schema> schema);
Dataset parse_csv_file(const std::filesystem::path& path,
                       std::shared_ptr<const Schema> schema);
void write_csv(const Dataset& dataset, std::ostream& out);
void write_csv_file(const Dataset& dataset, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// One-hot encoding
// ---------------------------------------------------------------------------

/// Dense 0/1 design matrix with labels in {+1, -1} (+1 = fatal). Column
/// order is schema attribute order, then domain order within an attribute.
/// When built by one_hot_encode the matrix also keeps the per-row category
/// indices, which fast paths (the SMO kernel) use in place of dense rows.
class FeatureMatrix {
 public:
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                std::vector<std::int8_t> labels,
                std::vector<std::size_t> attribute_offsets = {},
                std::vector<std::uint16_t> categories = {});

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<const std::int8_t> labels() const { return labels_; }
  std::int8_t label(std::size_t i) const { return labels_[i]; }

  std::size_t attribute_count() const {
    return attribute_offsets_.empty() ? 0 : attribute_offsets_.size() - 1;
  }
  /// Column of (attribute, category); requires offsets.
  std::size_t column_of(std::size_t attr, std::uint16_t category) const {
    return attribute_offsets_[attr] + category;
  }

  bool has_categories() const { return !categories_.empty(); }
  std::span<const std::uint16_t> categories(std::size_t i) const {
    const std::size_t k = attribute_count();
    return {categories_.data() + i * k, k};
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
  std::vector<std::int8_t> labels_;
  std::vector<std::size_t> attribute_offsets_;  // size attribute_count()+1
  std::vector<std::uint16_t> categories_;       // rows x attribute_count()
};

FeatureMatrix one_hot_encode(const Dataset& dataset);

/// One-hot encoding of a single record under `schema`'s column layout.
std::vector<double> encode_record(const Schema& schema, const CrashRecord& record);

// ---------------------------------------------------------------------------
// Stratified splitting
// ---------------------------------------------------------------------------

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;  // into the source dataset
  std::vector<std::size_t> test_indices;
};

/// Seeded stratified holdout split. |test| = round-half-up(test_fraction*n),
/// allocated across classes by largest remainder, so per-class proportions
/// match the full dataset within one record.
SplitResult stratified_split(const Dataset& dataset, double test_fraction,
                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

/// Multiplies the fatality odds of records matching attribute == category.
struct PlantedEffect {
  std::string attribute;
  std::string category;
  double odds_multiplier = 1.0;
};

/// Gaussian coordinate cluster the generator scatters crashes around.
struct SpatialBlob {
  double lat = 0.0;
  double lon = 0.0;
  double sigma = 0.04;  // degrees
};

struct DependencyPlan {
  std::vector<PlantedEffect> effects;
  std::vector<SpatialBlob> blobs;  // empty -> default_spatial_blobs()
};

/// Ten rough urban centers used when a plan does not supply blobs.
std::vector<SpatialBlob> default_spatial_blobs();

/// The plan used by the demos and end-to-end tests: strong effects on crash
/// type, injury severity, spatial cluster and hour; everything else noise.
DependencyPlan demo_dependency_plan();

/// Parse a plan from its JSON form:
///   {"effects": [{"attribute": ..., "category": ..., "odds_multiplier": ...}],
///    "blobs": [{"lat": ..., "lon": ..., "sigma": ...}]}
DependencyPlan plan_from_json(const std::string& text);

/// Deterministic LRAP-shaped sample of size n with round-half-up(n * rate)
/// fatal rows. Attribute values are uniform over their domains (am/pm is
/// derived from the hour); the fatal rows are chosen by odds-weighted
/// sampling without replacement, so planted effects skew the label exactly
/// as configured. Identical bytes for identical (n, rate, plan, seed).
Dataset generate_synthetic(std::size_t n, double fatality_rate,
                           const DependencyPlan& plan, std::uint64_t seed);

}  // namespace crashml
