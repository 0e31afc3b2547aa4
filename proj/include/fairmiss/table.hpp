#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairmiss/random.hpp"

namespace fairmiss {

enum class ColumnKind { numeric, categorical };
enum class Role { predictor, sensitive, outcome };

inline const char* to_string(Role r) {
  switch (r) {
    case Role::predictor: return "predictor";
    case Role::sensitive: return "sensitive";
    case Role::outcome: return "outcome";
  }
  return "?";
}

/// Declares one column: its value domain and its role in the pipeline.
/// Categorical cells may only hold the declared levels; the level order fixes
/// both the indicator encoding and tie-breaking conventions downstream.
struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  Role role = Role::predictor;
  std::vector<std::string> levels;        // categorical only, non-empty, unique
  std::vector<double> ordinal_rank;       // optional, aligned with levels

  bool has_ordinal() const { return !ordinal_rank.empty(); }

  void validate() const {
    if (kind == ColumnKind::categorical) {
      if (levels.empty())
        throw std::invalid_argument("column '" + name + "': categorical column needs levels");
      std::set<std::string> uniq(levels.begin(), levels.end());
      if (uniq.size() != levels.size())
        throw std::invalid_argument("column '" + name + "': duplicate levels");
      if (!ordinal_rank.empty() && ordinal_rank.size() != levels.size())
        throw std::invalid_argument("column '" + name + "': ordinal ranks must cover all levels");
    } else if (!levels.empty()) {
      throw std::invalid_argument("column '" + name + "': numeric column cannot declare levels");
    }
  }
};

/// Column-oriented mixed-type table with a per-cell observation mask.
/// Numeric cells store the value; categorical cells store the level index.
/// Tables are immutable after construction: every operation returns a copy.
class Table {
 public:
  Table() = default;

  Table(std::vector<ColumnSpec> schema, std::size_t n_rows)
      : schema_(std::move(schema)),
        cols_(schema_.size(), std::vector<double>(n_rows, 0.0)),
        mask_(schema_.size(), std::vector<std::uint8_t>(n_rows, 1)),
        n_rows_(n_rows) {
    for (const auto& c : schema_) c.validate();
  }

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return schema_.size(); }
  const std::vector<ColumnSpec>& schema() const { return schema_; }
  const ColumnSpec& spec(std::size_t c) const { return schema_.at(c); }

  std::size_t column_index(const std::string& name) const {
    for (std::size_t c = 0; c < schema_.size(); ++c)
      if (schema_[c].name == name) return c;
    throw std::out_of_range("no column named '" + name + "'");
  }
  bool has_column(const std::string& name) const {
    for (const auto& s : schema_)
      if (s.name == name) return true;
    return false;
  }

  double cell(std::size_t c, std::size_t r) const { return cols_[c][r]; }
  bool observed(std::size_t c, std::size_t r) const { return mask_[c][r] != 0; }
  const std::vector<double>& column(std::size_t c) const { return cols_[c]; }
  const std::vector<std::uint8_t>& column_mask(std::size_t c) const { return mask_[c]; }

  void set_cell(std::size_t c, std::size_t r, double v) {
    check_level(c, v);
    cols_[c][r] = v;
    mask_[c][r] = 1;
  }
  void set_missing(std::size_t c, std::size_t r) {
    if (schema_[c].role != Role::predictor)
      throw std::logic_error("column '" + schema_[c].name +
                             "' has role " + to_string(schema_[c].role) +
                             " and must stay fully observed");
    mask_[c][r] = 0;
  }

  /// Loader-only escape hatch: marks a cell missing without the role check,
  /// so lenient loads can represent defective sensitive/outcome cells.
  void force_missing_unchecked(std::size_t c, std::size_t r) { mask_[c][r] = 0; }

  /// The level string behind a categorical cell.
  const std::string& level_of(std::size_t c, std::size_t r) const {
    const auto& s = schema_[c];
    if (s.kind != ColumnKind::categorical)
      throw std::logic_error("level_of on numeric column '" + s.name + "'");
    return s.levels.at(static_cast<std::size_t>(cols_[c][r]));
  }

  bool row_complete(std::size_t r) const {
    for (std::size_t c = 0; c < schema_.size(); ++c)
      if (!mask_[c][r]) return false;
    return true;
  }

  bool fully_observed() const {
    for (std::size_t r = 0; r < n_rows_; ++r)
      if (!row_complete(r)) return false;
    return true;
  }

  Table select_rows(const std::vector<std::size_t>& rows) const {
    Table out(schema_, rows.size());
    for (std::size_t c = 0; c < schema_.size(); ++c)
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= n_rows_) throw std::out_of_range("row index out of range");
        out.cols_[c][i] = cols_[c][rows[i]];
        out.mask_[c][i] = mask_[c][rows[i]];
      }
    return out;
  }

  /// Replaces one column's spec and values wholesale (used by binarization).
  Table with_column(std::size_t c, ColumnSpec spec, std::vector<double> values) const {
    if (values.size() != n_rows_) throw std::invalid_argument("column length mismatch");
    spec.validate();
    Table out = *this;
    out.schema_[c] = std::move(spec);
    out.cols_[c] = std::move(values);
    return out;
  }

  /// FNV-1a over cell bytes and mask; used to assert tables are untouched.
  std::uint64_t checksum() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* p, std::size_t n) {
      const auto* b = static_cast<const unsigned char*>(p);
      for (std::size_t i = 0; i < n; ++i) h = (h ^ b[i]) * 1099511628211ULL;
    };
    for (std::size_t c = 0; c < schema_.size(); ++c) {
      mix(cols_[c].data(), cols_[c].size() * sizeof(double));
      mix(mask_[c].data(), mask_[c].size());
    }
    return h;
  }

 private:
  void check_level(std::size_t c, double v) const {
    const auto& s = schema_[c];
    if (s.kind != ColumnKind::categorical) return;
    auto idx = static_cast<long long>(v);
    if (v != static_cast<double>(idx) || idx < 0 ||
        idx >= static_cast<long long>(s.levels.size()))
      throw std::invalid_argument("column '" + s.name + "': undeclared level index");
  }

  std::vector<ColumnSpec> schema_;
  std::vector<std::vector<double>> cols_;
  std::vector<std::vector<std::uint8_t>> mask_;
  std::size_t n_rows_ = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
};

namespace detail {

// RFC-4180-ish line splitter: quoted fields may contain commas and doubled
// quotes; unquoted fields are trimmed of surrounding blanks.
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  out.push_back(field);
  for (auto& f : out) {
    std::size_t a = f.find_first_not_of(" \t");
    std::size_t b = f.find_last_not_of(" \t");
    f = (a == std::string::npos) ? std::string() : f.substr(a, b - a + 1);
  }
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace detail

/// A quality finding from a lenient load; see validate_dataset.
struct CellIssue {
  std::size_t row;
  std::string column;
  std::string what;
};

inline std::set<std::string> default_na_tokens() { return {"", "?", "NA"}; }

/// Loads a comma-separated file against a declared schema. The header row is
/// matched by name, order-insensitive; columns absent from the schema are
/// ignored. Cells matching na_tokens are loaded as missing. In strict mode
/// (the default) an unknown categorical level, an unparseable numeric, or a
/// missing sensitive/outcome cell is an error; with `issues` supplied those
/// cells are instead masked and reported, which is what validate-data uses.
inline Table load_csv(const std::string& path, const std::vector<ColumnSpec>& schema,
                      const std::set<std::string>& na_tokens = default_na_tokens(),
                      std::vector<CellIssue>* issues = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
  const auto header = detail::split_csv_line(line);

  std::vector<long> field_of(schema.size(), -1);
  for (std::size_t c = 0; c < schema.size(); ++c) {
    for (std::size_t f = 0; f < header.size(); ++f)
      if (header[f] == schema[c].name) { field_of[c] = static_cast<long>(f); break; }
    if (field_of[c] < 0)
      throw std::runtime_error("'" + path + "': missing column '" + schema[c].name + "'");
  }

  std::vector<std::map<std::string, std::size_t>> level_maps(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c)
    for (std::size_t l = 0; l < schema[c].levels.size(); ++l)
      level_maps[c][schema[c].levels[l]] = l;

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(detail::split_csv_line(line));
  }

  Table t(schema, rows.size());
  const bool strict = issues == nullptr;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const auto f = static_cast<std::size_t>(field_of[c]);
      const std::string cellstr = f < rows[r].size() ? rows[r][f] : std::string();
      const bool is_na = na_tokens.count(cellstr) > 0;
      auto fail = [&](const std::string& what) {
        if (strict)
          throw std::runtime_error("'" + path + "' row " + std::to_string(r + 2) +
                                   ", column '" + schema[c].name + "': " + what);
        issues->push_back({r, schema[c].name, what});
      };
      if (is_na) {
        if (schema[c].role != Role::predictor) {
          fail("missing " + std::string(to_string(schema[c].role)) + " value");
          if (!strict) t.force_missing_unchecked(c, r);
        } else {
          t.force_missing_unchecked(c, r);
        }
        continue;
      }
      if (schema[c].kind == ColumnKind::numeric) {
        double v;
        if (!detail::parse_double(cellstr, v)) {
          fail("unparseable numeric '" + cellstr + "'");
          if (!strict) t.force_missing_unchecked(c, r);
          continue;
        }
        t.set_cell(c, r, v);
      } else {
        auto it = level_maps[c].find(cellstr);
        if (it == level_maps[c].end()) {
          fail("unknown level '" + cellstr + "'");
          if (!strict) t.force_missing_unchecked(c, r);
          continue;
        }
        t.set_cell(c, r, static_cast<double>(it->second));
      }
    }
  }
  return t;
}

/// Rows whose cells are all observed, in original order.
inline Table complete_cases(const Table& t) {
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < t.n_rows(); ++r)
    if (t.row_complete(r)) keep.push_back(r);
  return t.select_rows(keep);
}

/// Uniform random train/test partition; |test| = ceil(n * test_fraction).
inline SplitIndices split(const Table& t, double test_fraction, Rng& rng) {
  const std::size_t n = t.n_rows();
  if (n < 2) throw std::invalid_argument("split needs at least 2 rows");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test_fraction must be in (0, 1)");
  const auto n_test = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) * test_fraction));
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  rng.shuffle(idx);
  SplitIndices s;
  s.test_idx.assign(idx.begin(), idx.begin() + static_cast<long>(n_test));
  s.train_idx.assign(idx.begin() + static_cast<long>(n_test), idx.end());
  std::sort(s.test_idx.begin(), s.test_idx.end());
  std::sort(s.train_idx.begin(), s.train_idx.end());
  return s;
}

/// Applies one SplitIndices to a table; using the same indices on an amputed
/// table and its complete twin yields row-aligned train/test pairs.
inline std::pair<Table, Table> apply_indices(const Table& t, const SplitIndices& idx) {
  return {t.select_rows(idx.train_idx), t.select_rows(idx.test_idx)};
}

/// Numeric design matrix: row-major values plus one name per output column.
struct DesignMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;  // row-major
  std::vector<std::string> names;

  double at(std::size_t r, std::size_t c) const { return values[r * n_cols + c]; }
  const double* row(std::size_t r) const { return values.data() + r * n_cols; }
};

/// One-hot encodes a fully observed table: a categorical column with L levels
/// becomes L-1 indicators against the first declared level; numeric columns
/// pass through. Columns whose role is in drop_roles are excluded.
inline DesignMatrix one_hot_encode(const Table& t, const std::set<Role>& drop_roles) {
  DesignMatrix m;
  m.n_rows = t.n_rows();
  std::vector<std::size_t> src_cols;
  for (std::size_t c = 0; c < t.n_cols(); ++c) {
    const auto& s = t.spec(c);
    if (drop_roles.count(s.role)) continue;
    src_cols.push_back(c);
    if (s.kind == ColumnKind::numeric) {
      m.names.push_back(s.name);
    } else {
      for (std::size_t l = 1; l < s.levels.size(); ++l)
        m.names.push_back(s.name + "=" + s.levels[l]);
    }
  }
  m.n_cols = m.names.size();
  m.values.assign(m.n_rows * m.n_cols, 0.0);
  for (std::size_t r = 0; r < m.n_rows; ++r) {
    std::size_t out = 0;
    for (std::size_t c : src_cols) {
      const auto& s = t.spec(c);
      if (!t.observed(c, r))
        throw std::runtime_error("one_hot_encode: masked cell in column '" + s.name + "'");
      if (s.kind == ColumnKind::numeric) {
        m.values[r * m.n_cols + out++] = t.cell(c, r);
      } else {
        const auto level = static_cast<std::size_t>(t.cell(c, r));
        for (std::size_t l = 1; l < s.levels.size(); ++l)
          m.values[r * m.n_cols + out++] = (level == l) ? 1.0 : 0.0;
      }
    }
  }
  return m;
}

/// Rule mapping a sensitive column onto {privileged=1, unprivileged=0}.
/// Categorical columns map level strings; numeric columns use a threshold
/// (value > threshold -> 1).
struct BinarizeRule {
  std::string column;
  std::map<std::string, int> level_map;  // categorical columns
  std::optional<double> threshold;       // numeric columns
};

/// Recodes a sensitive column to numeric {0, 1} per the rule. The rest of the
/// table is untouched; the result's schema reflects the new numeric column.
inline Table binarize_sensitive(const Table& t, const BinarizeRule& rule) {
  const std::size_t c = t.column_index(rule.column);
  const auto& s = t.spec(c);
  if (s.role != Role::sensitive)
    throw std::invalid_argument("binarize_sensitive: '" + rule.column + "' is not sensitive");
  std::vector<double> vals(t.n_rows());
  if (s.kind == ColumnKind::categorical) {
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
      const std::string& lev = t.level_of(c, r);
      auto it = rule.level_map.find(lev);
      if (it == rule.level_map.end())
        throw std::runtime_error("binarize_sensitive: unmapped level '" + lev + "'");
      vals[r] = it->second ? 1.0 : 0.0;
    }
  } else {
    if (!rule.threshold)
      throw std::invalid_argument("binarize_sensitive: numeric column needs a threshold");
    for (std::size_t r = 0; r < t.n_rows(); ++r)
      vals[r] = t.cell(c, r) > *rule.threshold ? 1.0 : 0.0;
  }
  ColumnSpec ns;
  ns.name = s.name;
  ns.kind = ColumnKind::numeric;
  ns.role = Role::sensitive;
  return t.with_column(c, ns, std::move(vals));
}

}  // namespace fairmiss
