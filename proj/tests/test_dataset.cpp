#include <doctest.h>

#include <map>
#include <sstream>

#include "crashml/dataset.hpp"
#include "test_support.hpp"

using namespace crashml;

namespace {

// A valid LRAP CSV line cycling through each attribute's domain.
std::string lrap_csv(std::size_t rows, bool with_coords = false) {
  const auto schema = lrap_schema();
  std::ostringstream out;
  for (const AttributeSpec& spec : schema->inputs()) out << spec.name << ',';
  out << "fatality";
  if (with_coords) out << ",lat,lon";
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (const AttributeSpec& spec : schema->inputs()) {
      out << spec.domain[i % spec.domain.size()] << ',';
    }
    out << (i % 20 == 0 ? "fatal" : "not_fatal");
    if (with_coords) out << ",33.9,35.5";
    out << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("normalize_label canonicalizes labels") {
  CHECK(normalize_label("Vehicle-Pedestrian") == "vehicle_pedestrian");
  CHECK(normalize_label("No Apparent-Injury") == "no_apparent_injury");
  CHECK(normalize_label("AM/PM") == "am_pm");
  CHECK(normalize_label("  Fatal ") == "fatal");
  CHECK(normalize_label("Day of the Week") == "day_of_the_week");
  CHECK(normalize_label("3") == "3");
}

TEST_CASE("lrap schema shape") {
  const auto schema = lrap_schema();
  CHECK(schema->attribute_count() == 9);
  // 12+31+7+24+2+11+3+6+10
  CHECK(schema->one_hot_width() == 106);
  CHECK(schema->output().domain.size() == 2);
  CHECK(schema->inputs()[5].name == "crash_type");
  CHECK(schema->inputs()[5].domain.size() == 11);
}

TEST_CASE("schema rejects duplicates and empty domains") {
  CHECK_THROWS_AS(Schema({{"a", {"x", "x"}}}, {"fatality", {"not_fatal", "fatal"}}),
                  ArgumentError);
  CHECK_THROWS_AS(Schema({{"a", {}}}, {"fatality", {"not_fatal", "fatal"}}),
                  ArgumentError);
  CHECK_THROWS_AS(Schema({{"a", {"x"}}, {"a", {"y"}}},
                         {"fatality", {"not_fatal", "fatal"}}),
                  ArgumentError);
  CHECK_THROWS_AS(Schema({{"a", {"x"}}}, {"fatality", {"one"}}), ArgumentError);
}

TEST_CASE("parse_csv accepts a minimal well-formed file") {
  std::istringstream in(lrap_csv(1));
  const Dataset d = parse_csv(in, lrap_schema());
  CHECK(d.size() == 1);
  CHECK(d.count(Fatality::fatal) == 1);
}

TEST_CASE("parse_csv rejects out-of-domain hour with attribute and line") {
  const auto schema = lrap_schema();
  std::string text = lrap_csv(1);
  // Corrupt the hour field (4th attribute) of the data row.
  const std::size_t header_end = text.find('\n');
  std::string row = text.substr(header_end + 1);
  std::string header = text.substr(0, header_end + 1);
  // Attribute order is month,day,day_of_the_week,hour_of_crash,...
  std::vector<std::string> fields;
  std::stringstream ss(row);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  fields[3] = "25";
  std::string bad = header;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    bad += fields[i];
    bad += (i + 1 < fields.size()) ? "," : "";
  }
  std::istringstream in(bad);
  try {
    parse_csv(in, schema);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    const std::string what = e.what();
    CHECK(what.find("hour_of_crash") != std::string::npos);
    CHECK(what.find("25") != std::string::npos);
    CHECK(what.find("line 2") != std::string::npos);
  }
}

TEST_CASE("parse_csv rejects wrong column counts with the line number") {
  std::string text = lrap_csv(1);
  text += "only,three,fields\n";
  std::istringstream in(text);
  try {
    parse_csv(in, lrap_schema());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("parse_csv handles 8482 rows") {
  std::istringstream in(lrap_csv(8482));
  const Dataset d = parse_csv(in, lrap_schema());
  CHECK(d.size() == 8482);
}

TEST_CASE("csv round-trips datasets byte-for-byte") {
  const DependencyPlan plan = demo_dependency_plan();
  const Dataset d = generate_synthetic(500, 0.1, plan, 11);
  std::ostringstream first;
  write_csv(d, first);
  std::istringstream back(first.str());
  const Dataset d2 = parse_csv(back, d.schema_ptr());
  std::ostringstream second;
  write_csv(d2, second);
  CHECK(first.str() == second.str());
  REQUIRE(d2.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d.row(i).values == d2.row(i).values);
    CHECK(d.row(i).label == d2.row(i).label);
  }
}

TEST_CASE("one_hot_encode layout and row sums") {
  const auto schema = lrap_schema();
  std::istringstream in(lrap_csv(50));
  const Dataset d = parse_csv(in, schema);
  const FeatureMatrix fm = one_hot_encode(d);
  CHECK(fm.rows() == 50);
  CHECK(fm.cols() == 106);
  CHECK(fm.has_categories());
  for (std::size_t i = 0; i < fm.rows(); ++i) {
    double sum = 0.0;
    for (const double v : fm.row(i)) sum += v;
    CHECK(sum == 9.0);  // one indicator per attribute
  }
  // Identical records encode identically.
  const Dataset dup = d.subset(std::vector<std::size_t>{3, 3});
  const FeatureMatrix fm2 = one_hot_encode(dup);
  for (std::size_t c = 0; c < fm2.cols(); ++c) {
    CHECK(fm2.row(0)[c] == fm2.row(1)[c]);
  }
  // Labels map fatal -> +1.
  CHECK(fm.label(0) == +1);
  CHECK(fm.label(1) == -1);
}

TEST_CASE("one_hot_encode rejects empty datasets") {
  const Dataset empty(lrap_schema(), {});
  CHECK_THROWS_AS(one_hot_encode(empty), ArgumentError);
}

TEST_CASE("stratified_split allocates 19+1 on a 95:5 hundred") {
  const Dataset d = testing::random_dataset(testing::toy_schema(), 100, 5, 21);
  const SplitResult split = stratified_split(d, 0.2, 77);
  CHECK(split.test.size() == 20);
  CHECK(split.test.count(Fatality::fatal) == 1);
  CHECK(split.test.count(Fatality::not_fatal) == 19);
  CHECK(split.train.size() == 80);
  CHECK(split.train.count(Fatality::fatal) == 4);
}

TEST_CASE("stratified_split of 8482 rows yields 1696 test rows") {
  const Dataset d = generate_synthetic(8482, 0.05, {}, 3);
  const SplitResult split = stratified_split(d, 0.2, 9);
  CHECK(split.test.size() == 1696);  // round-half-up(1696.4)
  CHECK(split.train.size() == 8482 - 1696);
}

TEST_CASE("stratified_split partitions and is seed-stable") {
  const Dataset d = testing::random_dataset(testing::toy_schema(), 103, 17, 5);
  const SplitResult a = stratified_split(d, 0.3, 123);
  const SplitResult b = stratified_split(d, 0.3, 123);
  CHECK(a.test_indices == b.test_indices);
  CHECK(a.train_indices == b.train_indices);

  std::vector<bool> seen(d.size(), false);
  for (const std::size_t i : a.test_indices) {
    CHECK(!seen[i]);
    seen[i] = true;
  }
  for (const std::size_t i : a.train_indices) {
    CHECK(!seen[i]);
    seen[i] = true;
  }
  for (const bool s : seen) CHECK(s);
}

TEST_CASE("stratified_split per-class share stays near the fraction") {
  const Dataset d = testing::random_dataset(testing::toy_schema(), 200, 30, 1);
  for (const std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    const SplitResult split = stratified_split(d, 0.25, seed);
    // 30 fatal * 0.25 = 7.5 -> 7 or 8
    const auto fatal_in_test = split.test.count(Fatality::fatal);
    CHECK(fatal_in_test >= 7);
    CHECK(fatal_in_test <= 8);
  }
}

TEST_CASE("stratified_split needs both classes") {
  const Dataset d = testing::random_dataset(testing::toy_schema(), 40, 0, 2);
  CHECK_THROWS_AS(stratified_split(d, 0.2, 1), DegenerateDataError);
}

TEST_CASE("generate_synthetic hits the class ratio exactly") {
  const Dataset d = generate_synthetic(8482, 0.05, {}, 7);
  CHECK(d.count(Fatality::fatal) == 424);  // round-half-up(424.1)
  const Dataset balanced = generate_synthetic(20, 0.5, {}, 7);
  CHECK(balanced.count(Fatality::fatal) == 10);
}

TEST_CASE("generate_synthetic rejects degenerate rates") {
  CHECK_THROWS_AS(generate_synthetic(10, 0.01, {}, 1), DegenerateDataError);
  CHECK_THROWS_AS(generate_synthetic(1, 0.5, {}, 1), ArgumentError);
}

TEST_CASE("generate_synthetic is byte-identical for a fixed seed") {
  const DependencyPlan plan = demo_dependency_plan();
  const Dataset a = generate_synthetic(300, 0.1, plan, 99);
  const Dataset b = generate_synthetic(300, 0.1, plan, 99);
  std::ostringstream sa, sb;
  write_csv(a, sa);
  write_csv(b, sb);
  CHECK(sa.str() == sb.str());
  const Dataset c = generate_synthetic(300, 0.1, plan, 100);
  std::ostringstream sc;
  write_csv(c, sc);
  CHECK(sa.str() != sc.str());
}

TEST_CASE("planted odds raise the conditional fatality rate") {
  DependencyPlan plan;
  plan.effects = {{"crash_type", "vehicle_pedestrian", 8.0}};
  const Dataset d = generate_synthetic(6000, 0.05, plan, 13);
  const auto attr = *d.schema().input_index("crash_type");
  const auto cat = *d.schema().inputs()[attr].category_index("vehicle_pedestrian");
  std::size_t vp = 0, vp_fatal = 0;
  for (const CrashRecord& rec : d.rows()) {
    if (rec.values[attr] == cat) {
      ++vp;
      vp_fatal += (rec.label == Fatality::fatal);
    }
  }
  REQUIRE(vp > 0);
  const double vp_rate = static_cast<double>(vp_fatal) / static_cast<double>(vp);
  const double global_rate =
      static_cast<double>(d.count(Fatality::fatal)) / static_cast<double>(d.size());
  CHECK(vp_rate > global_rate);
}

TEST_CASE("synthetic records carry coherent coordinates and am/pm") {
  const Dataset d = generate_synthetic(200, 0.1, {}, 5);
  const auto hour_attr = *d.schema().input_index("hour_of_crash");
  const auto ampm_attr = *d.schema().input_index("am_pm");
  for (const CrashRecord& rec : d.rows()) {
    REQUIRE(rec.location.has_value());
    CHECK(rec.location->lat > 32.0);
    CHECK(rec.location->lat < 36.0);
    CHECK(rec.location->lon > 34.0);
    CHECK(rec.location->lon < 38.0);
    CHECK(rec.values[ampm_attr] == (rec.values[hour_attr] < 12 ? 0 : 1));
  }
}

TEST_CASE("dataset validates rows against the schema") {
  const auto schema = testing::toy_schema();
  std::vector<CrashRecord> rows;
  rows.push_back(testing::rec({0, 0, 3}, Fatality::fatal));  // shape index 3 invalid
  CHECK_THROWS_AS(Dataset(schema, std::move(rows)), DomainError);

  std::vector<CrashRecord> bad_loc;
  bad_loc.push_back(testing::rec({0, 0, 0}, Fatality::fatal));
  bad_loc[0].location = GeoPoint{95.0, 0.0};
  CHECK_THROWS_AS(Dataset(schema, std::move(bad_loc)), DomainError);
}

TEST_CASE("minority_class requires both classes") {
  const Dataset single = testing::random_dataset(testing::toy_schema(), 10, 0, 3);
  CHECK_THROWS_AS(single.minority_class(), DegenerateDataError);
  const Dataset both = testing::random_dataset(testing::toy_schema(), 10, 2, 3);
  CHECK(both.minority_class() == Fatality::fatal);
}
