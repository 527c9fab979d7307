// Apache License, Version 2.0, refer to LICENSE.txt

#include "opaque/sample_table.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace opaque {

SampleTable::SampleTable(std::vector<std::string> columns)
    : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("table: needs at least one column");
}

bool SampleTable::has_column(const std::string& name) const {
  for (const auto& c : columns_)
    if (c == name) return true;
  return false;
}

std::size_t SampleTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return i;
  throw std::invalid_argument("table: no column named \"" + name + "\"");
}

double SampleTable::at(std::size_t row, std::size_t col) const {
  return data_[row * columns_.size() + col];
}

void SampleTable::add_row(std::span<const double> row) {
  if (row.size() != columns_.size())
    throw std::invalid_argument("table: row width mismatch");
  data_.insert(data_.end(), row.begin(), row.end());
}

std::vector<double> SampleTable::column(std::size_t idx) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = at(r, idx);
  return out;
}

std::vector<double> SampleTable::column(const std::string& name) const {
  return column(column_index(name));
}

namespace {

// Comma split with standard double-quote handling; column names like
// "phi[1,2]" are quoted on output.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string quote_if_needed(const std::string& field) {
  if (field.find(',') == std::string::npos && field.find('"') == std::string::npos)
    return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

}  // namespace

SampleTable SampleTable::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV file: " + path);
  SampleTable t(split_csv_line(line));
  std::vector<double> row(t.cols());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != t.cols())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": wrong number of fields");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      char* end = nullptr;
      row[i] = std::strtod(fields[i].c_str(), &end);
      if (end == fields[i].c_str())
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": not a number: \"" + fields[i] + "\"");
    }
    t.add_row(row);
  }
  return t;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string SampleTable::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) os << ',';
    os << quote_if_needed(columns_[i]);
  }
  os << '\n';
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols(); ++c) {
      if (c) os << ',';
      os << format_double(at(r, c));
    }
    os << '\n';
  }
  return os.str();
}

void SampleTable::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << to_csv();
}

}  // namespace opaque
