#include "crashml/dataset.hpp"

namespace crashml {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols,
                             std::vector<double> values,
                             std::vector<std::int8_t> labels,
                             std::vector<std::size_t> attribute_offsets,
                             std::vector<std::uint16_t> categories)
    : rows_(rows),
      cols_(cols),
      values_(std::move(values)),
      labels_(std::move(labels)),
      attribute_offsets_(std::move(attribute_offsets)),
      categories_(std::move(categories)) {
  if (values_.size() != rows_ * cols_) {
    throw ArgumentError("FeatureMatrix: values size does not match rows*cols");
  }
  if (labels_.size() != rows_) {
    throw ArgumentError("FeatureMatrix: labels size does not match rows");
  }
  if (!categories_.empty() && attribute_offsets_.size() < 2) {
    throw ArgumentError("FeatureMatrix: categories require attribute offsets");
  }
}

FeatureMatrix one_hot_encode(const Dataset& dataset) {
  if (dataset.empty()) throw ArgumentError("one_hot_encode: dataset is empty");
  const Schema& schema = dataset.schema();
  const std::size_t n = dataset.size();
  const std::size_t n_attr = schema.attribute_count();
  const std::size_t width = schema.one_hot_width();

  std::vector<std::size_t> offsets(n_attr + 1, 0);
  for (std::size_t a = 0; a < n_attr; ++a) {
    offsets[a + 1] = offsets[a] + schema.inputs()[a].domain.size();
  }

  std::vector<double> values(n * width, 0.0);
  std::vector<std::int8_t> labels(n);
  std::vector<std::uint16_t> cats(n * n_attr);
  for (std::size_t i = 0; i < n; ++i) {
    const CrashRecord& rec = dataset.row(i);
    for (std::size_t a = 0; a < n_attr; ++a) {
      values[i * width + offsets[a] + rec.values[a]] = 1.0;
      cats[i * n_attr + a] = rec.values[a];
    }
    labels[i] = static_cast<std::int8_t>(label_pm(rec.label));
  }
  return FeatureMatrix(n, width, std::move(values), std::move(labels),
                       std::move(offsets), std::move(cats));
}

std::vector<double> encode_record(const Schema& schema, const CrashRecord& record) {
  std::vector<double> row(schema.one_hot_width(), 0.0);
  std::size_t offset = 0;
  for (std::size_t a = 0; a < schema.attribute_count(); ++a) {
    row[offset + record.values[a]] = 1.0;
    offset += schema.inputs()[a].domain.size();
  }
  return row;
}

}  // namespace crashml
