#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "crashml/dataset.hpp"

namespace crashml {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_coordinate(const std::string& field, const char* what, std::size_t line_no) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(std::string("line ") + std::to_string(line_no) + ": bad " + what +
                     " value '" + field + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Dataset parse_csv(std::istream& in, std::shared_ptr<const Schema> schema) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input: missing header row");

  const std::size_t n_attr = schema->attribute_count();
  std::vector<std::string> header = split_line(line);
  for (std::string& h : header) h = normalize_label(h);

  // Map each column to an attribute, the label, or a coordinate.
  constexpr std::size_t kLabel = static_cast<std::size_t>(-1);
  constexpr std::size_t kLat = static_cast<std::size_t>(-2);
  constexpr std::size_t kLon = static_cast<std::size_t>(-3);
  std::vector<std::size_t> column_role(header.size());
  std::vector<bool> attr_seen(n_attr, false);
  bool label_seen = false, lat_seen = false, lon_seen = false;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name == schema->output().name) {
      if (label_seen) throw ParseError("duplicate column '" + name + "'");
      label_seen = true;
      column_role[c] = kLabel;
    } else if (name == "lat") {
      lat_seen = true;
      column_role[c] = kLat;
    } else if (name == "lon") {
      lon_seen = true;
      column_role[c] = kLon;
    } else if (const auto idx = schema->input_index(name)) {
      if (attr_seen[*idx]) throw ParseError("duplicate column '" + name + "'");
      attr_seen[*idx] = true;
      column_role[c] = *idx;
    } else {
      throw ParseError("unknown column '" + name + "' in header");
    }
  }
  if (!label_seen) throw ParseError("missing '" + schema->output().name + "' column");
  for (std::size_t a = 0; a < n_attr; ++a) {
    if (!attr_seen[a]) {
      throw ParseError("missing column '" + schema->inputs()[a].name + "'");
    }
  }
  if (lat_seen != lon_seen) throw ParseError("'lat' and 'lon' must appear together");

  std::vector<CrashRecord> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }

    CrashRecord rec;
    rec.values.assign(n_attr, 0);
    std::optional<double> lat, lon;
    bool have_label = false;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::size_t role = column_role[c];
      if (role == kLat || role == kLon) {
        if (fields[c].empty()) continue;
        (role == kLat ? lat : lon) =
            parse_coordinate(fields[c], role == kLat ? "lat" : "lon", line_no);
        continue;
      }
      const std::string value = normalize_label(fields[c]);
      if (role == kLabel) {
        if (value == "fatal") {
          rec.label = Fatality::fatal;
        } else if (value == "not_fatal") {
          rec.label = Fatality::not_fatal;
        } else {
          throw DomainError("line " + std::to_string(line_no) + ": value '" +
                            fields[c] + "' outside domain of '" +
                            schema->output().name + "'");
        }
        have_label = true;
        continue;
      }
      const AttributeSpec& spec = schema->inputs()[role];
      const auto cat = spec.category_index(value);
      if (!cat) {
        throw DomainError("line " + std::to_string(line_no) + ": value '" +
                          fields[c] + "' outside domain of '" + spec.name + "'");
      }
      rec.values[role] = *cat;
    }
    (void)have_label;
    if (lat.has_value() != lon.has_value()) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": lat and lon must both be present or both empty");
    }
    if (lat) rec.location = GeoPoint{*lat, *lon};
    rows.push_back(std::move(rec));
  }
  return Dataset(std::move(schema), std::move(rows));
}

Dataset parse_csv_file(const std::filesystem::path& path,
                       std::shared_ptr<const Schema> schema) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return parse_csv(in, std::move(schema));
}

void write_csv(const Dataset& dataset, std::ostream& out) {
  const Schema& schema = dataset.schema();
  bool any_location = false;
  for (const CrashRecord& rec : dataset.rows()) {
    if (rec.location) {
      any_location = true;
      break;
    }
  }

  for (const AttributeSpec& spec : schema.inputs()) out << spec.name << ',';
  out << schema.output().name;
  if (any_location) out << ",lat,lon";
  out << '\n';

  for (const CrashRecord& rec : dataset.rows()) {
    for (std::size_t a = 0; a < schema.attribute_count(); ++a) {
      out << schema.inputs()[a].domain[rec.values[a]] << ',';
    }
    out << (rec.label == Fatality::fatal ? "fatal" : "not_fatal");
    if (any_location) {
      if (rec.location) {
        out << ',' << format_double(rec.location->lat) << ','
            << format_double(rec.location->lon);
      } else {
        out << ",,";
      }
    }
    out << '\n';
  }
}

void write_csv_file(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
  write_csv(dataset, out);
}

}  // namespace crashml
