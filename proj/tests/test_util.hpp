#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fairmiss/table.hpp"

namespace testutil {

inline fairmiss::ColumnSpec num_col(std::string name,
                                    fairmiss::Role role = fairmiss::Role::predictor) {
  fairmiss::ColumnSpec s;
  s.name = std::move(name);
  s.kind = fairmiss::ColumnKind::numeric;
  s.role = role;
  return s;
}

inline fairmiss::ColumnSpec cat_col(std::string name, std::vector<std::string> levels,
                                    fairmiss::Role role = fairmiss::Role::predictor,
                                    std::vector<double> ordinal = {}) {
  fairmiss::ColumnSpec s;
  s.name = std::move(name);
  s.kind = fairmiss::ColumnKind::categorical;
  s.levels = std::move(levels);
  s.role = role;
  s.ordinal_rank = std::move(ordinal);
  return s;
}

/// Builds a table from row-major cell values (categorical cells as level index).
inline fairmiss::Table make_table(std::vector<fairmiss::ColumnSpec> schema,
                                  std::vector<std::vector<double>> rows) {
  fairmiss::Table t(std::move(schema), rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) t.set_cell(c, r, rows[r][c]);
  return t;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("fairmiss_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::filesystem::path path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string write_file(const TempDir& dir, const std::string& name,
                              const std::string& content) {
  const std::string p = dir.file(name);
  std::ofstream out(p);
  out << content;
  return p;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testutil
