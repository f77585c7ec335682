#include "fgamma/sample.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fgamma {

Sample::Sample(std::size_t dim, Vector data) : dim_(dim), data_(std::move(data)) {
  if (dim_ == 0 && !data_.empty()) throw UserError("sample dimension must be positive");
  if (dim_ != 0 && data_.size() % dim_ != 0) {
    throw UserError("sample buffer length is not a multiple of the dimension");
  }
}

Sample Sample::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  const std::size_t dim = rows.front().size();
  Vector data;
  data.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw UserError("sample rows have different dimensions");
    data.insert(data.end(), r.begin(), r.end());
  }
  return {dim, std::move(data)};
}

Sample Sample::from_scalars(std::span<const double> xs) {
  return {1, Vector(xs.begin(), xs.end())};
}

Sample Sample::slice(std::size_t first, std::size_t count) const {
  if (first + count > size()) throw UserError("sample slice out of range");
  return {dim_, Vector(data_.begin() + static_cast<std::ptrdiff_t>(first * dim_),
                       data_.begin() + static_cast<std::ptrdiff_t>((first + count) * dim_))};
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_row(const std::string& line, Vector& out) {
  out.clear();
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell = trim(cell);
    double v = 0.0;
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (cell.empty() || res.ec != std::errc() || res.ptr != last) return false;
    out.push_back(v);
  }
  return !out.empty();
}

}  // namespace

Sample read_sample_csv(std::istream& in) {
  std::vector<Vector> rows;
  std::string line;
  std::size_t line_no = 0;
  Vector row;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!parse_row(line, row)) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw UserError("malformed CSV at line " + std::to_string(line_no));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw UserError("ragged CSV at line " + std::to_string(line_no));
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw UserError("non-finite value at line " + std::to_string(line_no));
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw UserError("CSV contains no data rows");
  return Sample::from_rows(rows);
}

Sample read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open " + path);
  return read_sample_csv(in);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

void write_sample_csv(std::ostream& out, const Sample& s) {
  for (std::size_t j = 0; j < s.dim(); ++j) out << (j ? "," : "") << "x" << j;
  out << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto p = s.point(i);
    for (std::size_t j = 0; j < p.size(); ++j) out << (j ? "," : "") << format_double(p[j]);
    out << '\n';
  }
}

}  // namespace fgamma
