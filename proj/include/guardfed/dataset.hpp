#ifndef GUARDFED_DATASET_HPP
#define GUARDFED_DATASET_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "guardfed/core.hpp"

namespace guardfed {

enum class ColumnKind { Numeric, Categorical };
enum class ColumnRole { Feature, Sensitive, Label };

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  ColumnRole role = ColumnRole::Feature;
};

/// One column of raw tabular data. Numeric cells hold their value; categorical
/// cells (including the binarized sensitive and label columns) hold a code
/// into `categories`.
struct Column {
  ColumnSchema schema;
  std::vector<double> values;
  std::vector<std::string> categories;

  bool categorical() const { return schema.kind == ColumnKind::Categorical; }
};

/// Raw rows in column-major storage. The sensitive and label columns are
/// always categorical with exactly two codes, 0 and 1.
class TabularDataset {
 public:
  TabularDataset() = default;
  explicit TabularDataset(std::vector<Column> columns, std::size_t dropped_rows = 0);

  std::size_t rows() const { return columns_.empty() ? 0 : columns_.front().values.size(); }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(std::size_t j) const { return columns_.at(j); }
  std::size_t sensitive_column() const { return sensitive_; }
  std::size_t label_column() const { return label_; }
  std::size_t dropped_rows() const { return dropped_; }

  Bits sensitive() const;
  Bits labels() const;

  TabularDataset subset(const IndexList& rows) const;
  /// Same schema and dictionaries, new cell values (row-major, one vector per row).
  TabularDataset with_rows(const std::vector<std::vector<double>>& rows) const;
  TabularDataset concat(const TabularDataset& other) const;

 private:
  std::vector<Column> columns_;
  std::size_t sensitive_ = 0;
  std::size_t label_ = 0;
  std::size_t dropped_ = 0;
};

/// Declares how a CSV maps onto a schema, including the binarization of the
/// sensitive attribute and the label.
struct DatasetManifest {
  std::string name;
  std::filesystem::path csv;
  std::vector<ColumnSchema> columns;
  /// Raw values mapped to a = 1. Empty: the column must hold exactly two
  /// values, the lexicographically larger one becoming 1.
  std::vector<std::string> sensitive_positive;
  /// When true every value not in `sensitive_positive` maps to a = 0.
  bool sensitive_others = false;
  std::string sensitive_group0_name;
  std::string sensitive_group1_name;
  std::vector<std::string> label_positive;
  bool label_others = false;
  std::vector<std::string> missing_tokens{"", "?", "NA"};
  double task_threshold = 0.6;
};

DatasetManifest load_manifest(const std::filesystem::path& path);
DatasetManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir);

TabularDataset load_csv(const std::filesystem::path& path, const DatasetManifest& manifest);
TabularDataset load_csv(const std::filesystem::path& path, const std::vector<ColumnSchema>& schema);
inline TabularDataset load_dataset(const DatasetManifest& manifest) {
  return load_csv(manifest.csv, manifest);
}

/// Model-ready view: z-scored numerics, one-hot categoricals, and the sensitive
/// bit appended as the last feature when requested.
struct EncodedDataset {
  Matrix features;
  Bits sensitive;
  Bits labels;
  std::optional<Eigen::Index> sensitive_feature;

  std::size_t size() const { return labels.size(); }
  EncodedDataset subset(const IndexList& rows) const;
};

class Encoder {
 public:
  struct NumericState {
    double mean = 0.0;
    double std = 0.0;  // population std; 0 encodes as constant 0
  };
  struct FeatureBlock {
    std::size_t column = 0;
    Eigen::Index offset = 0;
    Eigen::Index width = 0;
    std::optional<NumericState> numeric;
    std::vector<int> codes;  // one-hot slot i <-> category code codes[i]
  };

  /// Statistics come from `fit_on` rows only; unseen categories encode to zeros.
  static Encoder fit(const TabularDataset& data, const IndexList& fit_on,
                     bool include_sensitive_feature = true);

  EncodedDataset transform(const TabularDataset& data) const;

  Eigen::Index width() const { return width_; }
  const std::vector<FeatureBlock>& blocks() const { return blocks_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  Vector encode_category(std::size_t column, int code) const;
  std::optional<int> decode_category(std::size_t column, const Vector& one_hot) const;

 private:
  const FeatureBlock& block_for(std::size_t column) const;

  std::vector<FeatureBlock> blocks_;
  Eigen::Index width_ = 0;
  bool include_sensitive_ = true;
  std::vector<std::string> warnings_;
};

struct Split {
  IndexList first;   // train, or root
  IndexList second;  // test, or remaining pool
  std::vector<std::string> warnings;
};

/// Stratified by (a, y) cell; cells with fewer than two rows are split
/// unstratified. Deterministic given seed. Indices are sorted.
Split split_train_test(const Bits& sensitive, const Bits& labels, double test_fraction,
                       std::uint64_t seed);
inline Split split_train_test(const EncodedDataset& data, double test_fraction, std::uint64_t seed) {
  return split_train_test(data.sensitive, data.labels, test_fraction, seed);
}

/// Stratified root extraction among `pool` rows. `first` holds the root rows.
Split extract_root(const IndexList& pool, const Bits& sensitive, const Bits& labels,
                   double fraction, std::uint64_t seed);

struct ClientPartition {
  std::size_t client = 0;
  IndexList rows;
  std::size_t size() const { return rows.size(); }
};

/// Per-label Dirichlet(alpha) allocation of `pool` rows to clients, followed by
/// a repair pass so that every client holds at least one row.
std::vector<ClientPartition> dirichlet_partition(const IndexList& pool, const Bits& labels,
                                                 std::size_t n_clients, double alpha,
                                                 std::uint64_t seed);

}  // namespace guardfed

#endif  // GUARDFED_DATASET_HPP
