// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_SAMPLE_TABLE_HPP
#define OPAQUE_SAMPLE_TABLE_HPP

#include <span>
#include <string>
#include <vector>

namespace opaque {

/// Column-named table of doubles, row-major. The CSV form is the wire format
/// shared by every subcommand: header row of names, then one value row per
/// draw, values printed with "%.17g" so rewrites are byte-identical.
class SampleTable {
 public:
  SampleTable() = default;
  explicit SampleTable(std::vector<std::string> columns);

  std::size_t rows() const { return columns_.empty() ? 0 : data_.size() / columns_.size(); }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }

  bool has_column(const std::string& name) const;
  std::size_t column_index(const std::string& name) const;  // throws if missing

  double at(std::size_t row, std::size_t col) const;
  void add_row(std::span<const double> row);

  std::vector<double> column(std::size_t idx) const;
  std::vector<double> column(const std::string& name) const;

  static SampleTable read_csv(const std::string& path);
  void write_csv(const std::string& path) const;
  std::string to_csv() const;

 private:
  std::vector<std::string> columns_;
  std::vector<double> data_;
};

/// Format a double with "%.17g" (the canonical CSV number format here).
std::string format_double(double v);

}  // namespace opaque

#endif  // OPAQUE_SAMPLE_TABLE_HPP
