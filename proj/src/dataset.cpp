#include "guardfed/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace guardfed {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// RFC-4180-ish: quoted fields may contain commas and doubled quotes.
std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw SchemaError("expected boolean, got '" + s + "'");
}

// Binary mapping of raw text values onto {0, 1}.
struct BinaryMap {
  std::vector<std::string> positive;
  bool others = false;

  /// Resolve against the distinct values present; returns value -> bit.
  std::map<std::string, int> resolve(const std::set<std::string>& distinct,
                                     const std::string& column) const {
    std::map<std::string, int> out;
    if (positive.empty()) {
      if (distinct.size() != 2) {
        throw SchemaError("column '" + column + "' must take exactly two distinct values, found " +
                          std::to_string(distinct.size()));
      }
      out[*distinct.begin()] = 0;
      out[*distinct.rbegin()] = 1;
      return out;
    }
    for (const auto& v : distinct) {
      const bool pos = std::find(positive.begin(), positive.end(), v) != positive.end();
      out[v] = pos ? 1 : 0;
    }
    if (!others) {
      std::size_t negatives = 0;
      for (const auto& [v, bit] : out) negatives += bit == 0;
      if (negatives > 1) {
        throw SchemaError("column '" + column + "' has " + std::to_string(negatives) +
                          " values outside the positive group and no 'others' mapping");
      }
    }
    std::set<int> bits;
    for (const auto& [v, bit] : out) bits.insert(bit);
    if (bits.size() != 2) {
      throw SchemaError("column '" + column + "' does not take two distinct values after mapping");
    }
    return out;
  }
};

constexpr std::size_t cell_of(std::uint8_t a, std::uint8_t y) { return 2u * a + y; }

// Largest-remainder allocation of round(fraction * total) across groups.
std::vector<std::size_t> allocate(const std::vector<std::size_t>& group_sizes, double fraction) {
  const std::size_t total = std::accumulate(group_sizes.begin(), group_sizes.end(), std::size_t{0});
  const auto target = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
  std::vector<std::size_t> take(group_sizes.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    const double exact = fraction * static_cast<double>(group_sizes[g]);
    take[g] = static_cast<std::size_t>(std::floor(exact));
    assigned += take[g];
    remainders.emplace_back(exact - std::floor(exact), g);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& l, const auto& r) { return l.first > r.first; });
  for (const auto& [rem, g] : remainders) {
    if (assigned >= target) break;
    if (take[g] < group_sizes[g]) {
      ++take[g];
      ++assigned;
    }
  }
  return take;
}

// Stratified two-way split of `rows`: `fraction` of every (a, y) cell goes to
// the first output. Cells with fewer than two rows are pooled and split
// without stratification.
Split stratified_split(const IndexList& rows, const Bits& sensitive, const Bits& labels,
                       double fraction, std::uint64_t seed, const char* what) {
  std::array<IndexList, 4> cells;
  for (std::size_t r : rows) cells[cell_of(sensitive.at(r), labels.at(r))].push_back(r);

  Split out;
  std::vector<IndexList> groups;
  IndexList fallback;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].size() >= 2) {
      groups.push_back(cells[c]);
    } else if (!cells[c].empty()) {
      fallback.insert(fallback.end(), cells[c].begin(), cells[c].end());
      out.warnings.push_back(std::string(what) + ": (a=" + std::to_string(c / 2) +
                             ", y=" + std::to_string(c % 2) +
                             ") cell has fewer than 2 rows; split unstratified");
    }
  }
  if (!fallback.empty()) groups.push_back(fallback);

  std::vector<std::size_t> sizes;
  for (const auto& g : groups) sizes.push_back(g.size());
  const auto take = allocate(sizes, fraction);

  for (std::size_t g = 0; g < groups.size(); ++g) {
    Rng rng(derive_seed(seed, what, {g}));
    IndexList shuffled = groups[g];
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    out.first.insert(out.first.end(), shuffled.begin(), shuffled.begin() + take[g]);
    out.second.insert(out.second.end(), shuffled.begin() + take[g], shuffled.end());
  }
  std::sort(out.first.begin(), out.first.end());
  std::sort(out.second.begin(), out.second.end());
  for (const auto& w : out.warnings) std::clog << "[warn] " << w << '\n';
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// TabularDataset

TabularDataset::TabularDataset(std::vector<Column> columns, std::size_t dropped_rows)
    : columns_(std::move(columns)), dropped_(dropped_rows) {
  std::size_t n_sensitive = 0;
  std::size_t n_label = 0;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& col = columns_[j];
    if (col.values.size() != columns_.front().values.size()) {
      throw SchemaError("column '" + col.schema.name + "' has mismatched length");
    }
    if (col.schema.role == ColumnRole::Sensitive) {
      sensitive_ = j;
      ++n_sensitive;
    }
    if (col.schema.role == ColumnRole::Label) {
      label_ = j;
      ++n_label;
    }
    if (col.schema.role != ColumnRole::Feature &&
        (col.schema.kind != ColumnKind::Categorical || col.categories.size() != 2)) {
      throw SchemaError("column '" + col.schema.name + "' must be binary categorical");
    }
  }
  if (n_sensitive != 1) throw SchemaError("schema needs exactly one sensitive column");
  if (n_label != 1) throw SchemaError("schema needs exactly one label column");
}

Bits TabularDataset::sensitive() const {
  const auto& v = columns_[sensitive_].values;
  Bits out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<std::uint8_t>(v[i]);
  return out;
}

Bits TabularDataset::labels() const {
  const auto& v = columns_[label_].values;
  Bits out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<std::uint8_t>(v[i]);
  return out;
}

TabularDataset TabularDataset::subset(const IndexList& rows) const {
  std::vector<Column> cols = columns_;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    cols[j].values.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) cols[j].values[i] = columns_[j].values.at(rows[i]);
  }
  return TabularDataset(std::move(cols));
}

TabularDataset TabularDataset::with_rows(const std::vector<std::vector<double>>& rows) const {
  std::vector<Column> cols = columns_;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    cols[j].values.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols.size()) throw SchemaError("row arity does not match schema");
      cols[j].values[i] = rows[i][j];
    }
  }
  return TabularDataset(std::move(cols));
}

TabularDataset TabularDataset::concat(const TabularDataset& other) const {
  if (other.cols() != cols()) throw SchemaError("concat: schema arity mismatch");
  std::vector<Column> cols = columns_;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (other.columns_[j].schema.name != cols[j].schema.name) {
      throw SchemaError("concat: column names differ");
    }
    cols[j].values.insert(cols[j].values.end(), other.columns_[j].values.begin(),
                          other.columns_[j].values.end());
  }
  return TabularDataset(std::move(cols));
}

// ---------------------------------------------------------------------------
// Manifest and CSV

DatasetManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
  DatasetManifest m;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_missing = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw SchemaError("manifest line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto where = "manifest line " + std::to_string(line_no) + ": ";
    if (key == "name") {
      m.name = value;
    } else if (key == "csv") {
      m.csv = base_dir / value;
    } else if (key == "column") {
      const auto parts = split_list(value);
      if (parts.size() != 3) throw SchemaError(where + "column = <name>, <kind>, <role>");
      ColumnSchema c;
      c.name = parts[0];
      if (parts[1] == "numeric") {
        c.kind = ColumnKind::Numeric;
      } else if (parts[1] == "categorical") {
        c.kind = ColumnKind::Categorical;
      } else {
        throw SchemaError(where + "unknown column kind '" + parts[1] + "'");
      }
      if (parts[2] == "feature") {
        c.role = ColumnRole::Feature;
      } else if (parts[2] == "sensitive") {
        c.role = ColumnRole::Sensitive;
        c.kind = ColumnKind::Categorical;
      } else if (parts[2] == "label") {
        c.role = ColumnRole::Label;
        c.kind = ColumnKind::Categorical;
      } else {
        throw SchemaError(where + "unknown column role '" + parts[2] + "'");
      }
      m.columns.push_back(c);
    } else if (key == "sensitive_positive") {
      m.sensitive_positive = split_list(value);
    } else if (key == "sensitive_others") {
      m.sensitive_others = parse_bool(value);
    } else if (key == "sensitive_names") {
      const auto parts = split_list(value);
      if (parts.size() != 2) throw SchemaError(where + "sensitive_names = <group0>, <group1>");
      m.sensitive_group0_name = parts[0];
      m.sensitive_group1_name = parts[1];
    } else if (key == "label_positive") {
      m.label_positive = split_list(value);
    } else if (key == "label_others") {
      m.label_others = parse_bool(value);
    } else if (key == "missing") {
      if (!saw_missing) m.missing_tokens.clear();
      saw_missing = true;
      for (auto& t : split_list(value)) m.missing_tokens.push_back(t);
      m.missing_tokens.push_back("");
    } else if (key == "task_threshold") {
      if (!parse_double(value, m.task_threshold) || m.task_threshold < 0 || m.task_threshold > 1) {
        throw SchemaError(where + "task_threshold must be in [0, 1]");
      }
    } else {
      throw SchemaError(where + "unknown key '" + key + "'");
    }
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open manifest " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path.parent_path());
}

TabularDataset load_csv(const std::filesystem::path& path, const std::vector<ColumnSchema>& schema) {
  DatasetManifest m;
  m.csv = path;
  m.columns = schema;
  return load_csv(path, m);
}

TabularDataset load_csv(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open csv " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw SchemaError("csv " + path.string() + " is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = parse_csv_line(line);

  std::vector<std::size_t> source(manifest.columns.size());
  for (std::size_t j = 0; j < manifest.columns.size(); ++j) {
    const auto it = std::find(header.begin(), header.end(), manifest.columns[j].name);
    if (it == header.end()) {
      throw SchemaError("csv " + path.string() + " has no column '" + manifest.columns[j].name + "'");
    }
    source[j] = static_cast<std::size_t>(it - header.begin());
  }

  const std::set<std::string> missing(manifest.missing_tokens.begin(), manifest.missing_tokens.end());
  std::vector<std::vector<std::string>> raw(manifest.columns.size());
  std::size_t dropped = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = parse_csv_line(line);
    if (fields.size() != header.size()) {
      ++dropped;
      continue;
    }
    bool ok = true;
    for (std::size_t j = 0; j < manifest.columns.size() && ok; ++j) {
      const auto& cell = fields[source[j]];
      if (missing.count(cell)) ok = false;
      double tmp;
      if (manifest.columns[j].kind == ColumnKind::Numeric && !parse_double(cell, tmp)) ok = false;
    }
    if (!ok) {
      ++dropped;
      continue;
    }
    for (std::size_t j = 0; j < manifest.columns.size(); ++j) raw[j].push_back(fields[source[j]]);
  }

  std::vector<Column> cols;
  for (std::size_t j = 0; j < manifest.columns.size(); ++j) {
    Column col;
    col.schema = manifest.columns[j];
    const auto& cells = raw[j];
    col.values.resize(cells.size());
    if (col.schema.role == ColumnRole::Feature && col.schema.kind == ColumnKind::Numeric) {
      for (std::size_t i = 0; i < cells.size(); ++i) parse_double(cells[i], col.values[i]);
    } else if (col.schema.role == ColumnRole::Feature) {
      const std::set<std::string> distinct(cells.begin(), cells.end());
      col.categories.assign(distinct.begin(), distinct.end());
      std::unordered_map<std::string, int> code;
      for (std::size_t c = 0; c < col.categories.size(); ++c) code[col.categories[c]] = static_cast<int>(c);
      for (std::size_t i = 0; i < cells.size(); ++i) col.values[i] = code[cells[i]];
    } else {
      const bool is_sensitive = col.schema.role == ColumnRole::Sensitive;
      BinaryMap map{is_sensitive ? manifest.sensitive_positive : manifest.label_positive,
                    is_sensitive ? manifest.sensitive_others : manifest.label_others};
      const std::set<std::string> distinct(cells.begin(), cells.end());
      const auto bits = map.resolve(distinct, col.schema.name);
      std::string name0, name1;
      for (const auto& [v, bit] : bits) {
        auto& name = bit ? name1 : name0;
        name += (name.empty() ? "" : "|") + v;
      }
      if (is_sensitive && !manifest.sensitive_group0_name.empty()) {
        name0 = manifest.sensitive_group0_name;
        name1 = manifest.sensitive_group1_name;
      }
      col.categories = {name0, name1};
      for (std::size_t i = 0; i < cells.size(); ++i) col.values[i] = bits.at(cells[i]);
    }
    cols.push_back(std::move(col));
  }
  if (dropped > 0) {
    std::clog << "[info] " << path.filename().string() << ": dropped " << dropped
              << " malformed or incomplete rows\n";
  }
  return TabularDataset(std::move(cols), dropped);
}

// ---------------------------------------------------------------------------
// Encoding

EncodedDataset EncodedDataset::subset(const IndexList& rows) const {
  EncodedDataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.sensitive.resize(rows.size());
  out.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    out.sensitive[i] = sensitive.at(rows[i]);
    out.labels[i] = labels.at(rows[i]);
  }
  out.sensitive_feature = sensitive_feature;
  return out;
}

Encoder Encoder::fit(const TabularDataset& data, const IndexList& fit_on, bool include_sensitive_feature) {
  if (fit_on.empty()) throw SchemaError("encode: fit_on must be non-empty");
  Encoder enc;
  enc.include_sensitive_ = include_sensitive_feature;
  Eigen::Index offset = 0;
  for (std::size_t j = 0; j < data.cols(); ++j) {
    const auto& col = data.column(j);
    if (col.schema.role != ColumnRole::Feature) continue;
    FeatureBlock block;
    block.column = j;
    block.offset = offset;
    if (!col.categorical()) {
      double mean = 0.0;
      for (std::size_t r : fit_on) mean += col.values.at(r);
      mean /= static_cast<double>(fit_on.size());
      double var = 0.0;
      for (std::size_t r : fit_on) var += (col.values[r] - mean) * (col.values[r] - mean);
      var /= static_cast<double>(fit_on.size());
      NumericState st{mean, std::sqrt(var)};
      if (!(st.std > 1e-12)) {
        st.std = 0.0;
        enc.warnings_.push_back("column '" + col.schema.name + "' has zero variance; encoded as 0");
        std::clog << "[warn] " << enc.warnings_.back() << '\n';
      }
      block.numeric = st;
      block.width = 1;
    } else {
      std::set<int> seen;
      for (std::size_t r : fit_on) seen.insert(static_cast<int>(col.values.at(r)));
      block.codes.assign(seen.begin(), seen.end());
      block.width = static_cast<Eigen::Index>(block.codes.size());
    }
    offset += block.width;
    enc.blocks_.push_back(block);
  }
  enc.width_ = offset + (include_sensitive_feature ? 1 : 0);
  return enc;
}

const Encoder::FeatureBlock& Encoder::block_for(std::size_t column) const {
  for (const auto& b : blocks_) {
    if (b.column == column) return b;
  }
  throw SchemaError("encoder has no feature block for column " + std::to_string(column));
}

Vector Encoder::encode_category(std::size_t column, int code) const {
  const auto& b = block_for(column);
  Vector v = Vector::Zero(b.width);
  const auto it = std::lower_bound(b.codes.begin(), b.codes.end(), code);
  if (it != b.codes.end() && *it == code) v[it - b.codes.begin()] = 1.0;
  return v;
}

std::optional<int> Encoder::decode_category(std::size_t column, const Vector& one_hot) const {
  const auto& b = block_for(column);
  for (Eigen::Index i = 0; i < one_hot.size(); ++i) {
    if (one_hot[i] == 1.0) return b.codes.at(static_cast<std::size_t>(i));
  }
  return std::nullopt;
}

EncodedDataset Encoder::transform(const TabularDataset& data) const {
  const auto n = static_cast<Eigen::Index>(data.rows());
  EncodedDataset out;
  out.features = Matrix::Zero(n, width_);
  for (const auto& b : blocks_) {
    const auto& col = data.column(b.column);
    if (b.numeric) {
      for (Eigen::Index i = 0; i < n; ++i) {
        out.features(i, b.offset) =
            b.numeric->std > 0 ? (col.values[i] - b.numeric->mean) / b.numeric->std : 0.0;
      }
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        const int code = static_cast<int>(col.values[i]);
        const auto it = std::lower_bound(b.codes.begin(), b.codes.end(), code);
        if (it != b.codes.end() && *it == code) out.features(i, b.offset + (it - b.codes.begin())) = 1.0;
      }
    }
  }
  out.sensitive = data.sensitive();
  out.labels = data.labels();
  if (include_sensitive_) {
    out.sensitive_feature = width_ - 1;
    for (Eigen::Index i = 0; i < n; ++i) out.features(i, width_ - 1) = out.sensitive[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splitting and partitioning

Split split_train_test(const Bits& sensitive, const Bits& labels, double test_fraction,
                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must be in (0, 1)");
  }
  if (sensitive.size() != labels.size()) throw std::invalid_argument("sensitive/label length mismatch");
  IndexList all(labels.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  // stratified_split puts `fraction` into `first`; callers expect (train, test).
  Split s = stratified_split(all, sensitive, labels, test_fraction, seed, "split");
  std::swap(s.first, s.second);
  return s;
}

Split extract_root(const IndexList& pool, const Bits& sensitive, const Bits& labels, double fraction,
                   std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("root fraction must be in (0, 1)");
  if (std::llround(fraction * static_cast<double>(pool.size())) == 0) {
    throw std::invalid_argument("root fraction " + std::to_string(fraction) + " of " +
                                std::to_string(pool.size()) + " rows yields no root data");
  }
  return stratified_split(pool, sensitive, labels, fraction, seed, "root");
}

std::vector<ClientPartition> dirichlet_partition(const IndexList& pool, const Bits& labels,
                                                 std::size_t n_clients, double alpha,
                                                 std::uint64_t seed) {
  if (n_clients == 0) throw std::invalid_argument("n_clients must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (pool.size() < n_clients) {
    throw std::invalid_argument("pool of " + std::to_string(pool.size()) + " rows is smaller than " +
                                std::to_string(n_clients) + " clients");
  }
  std::vector<ClientPartition> parts(n_clients);
  for (std::size_t k = 0; k < n_clients; ++k) parts[k].client = k;

  for (std::uint8_t cls : {std::uint8_t{0}, std::uint8_t{1}}) {
    IndexList rows;
    for (std::size_t r : pool) {
      if (labels.at(r) == cls) rows.push_back(r);
    }
    if (rows.empty()) continue;
    Rng rng(derive_seed(seed, "dirichlet", {cls}));
    std::shuffle(rows.begin(), rows.end(), rng);

    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::vector<double> p(n_clients);
    double total = 0.0;
    for (auto& x : p) total += (x = gamma(rng));
    if (!(total > 0.0)) {
      std::fill(p.begin(), p.end(), 1.0);
      total = static_cast<double>(n_clients);
    }
    double cum = 0.0;
    std::size_t begin = 0;
    for (std::size_t k = 0; k < n_clients; ++k) {
      cum += p[k] / total;
      const std::size_t end =
          k + 1 == n_clients ? rows.size()
                             : std::min(rows.size(), static_cast<std::size_t>(cum * static_cast<double>(rows.size())));
      for (std::size_t i = begin; i < std::max(begin, end); ++i) parts[k].rows.push_back(rows[i]);
      begin = std::max(begin, end);
    }
  }

  for (auto& part : parts) {
    if (!part.rows.empty()) continue;
    auto largest = std::max_element(parts.begin(), parts.end(),
                                    [](const auto& l, const auto& r) { return l.size() < r.size(); });
    part.rows.push_back(largest->rows.back());
    largest->rows.pop_back();
  }
  for (auto& part : parts) std::sort(part.rows.begin(), part.rows.end());
  return parts;
}

}  // namespace guardfed
