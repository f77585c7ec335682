#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fgamma/common.hpp"

namespace fgamma {

/// An ordered point set standing for a uniformly weighted empirical measure.
/// Points are stored row-major in one flat buffer.
class Sample {
 public:
  Sample() = default;
  Sample(std::size_t dim, Vector data);

  static Sample from_rows(const std::vector<Vector>& rows);
  static Sample from_scalars(std::span<const double> xs);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  const Vector& data() const { return data_; }

  /// Points [first, first + count).
  Sample slice(std::size_t first, std::size_t count) const;

 private:
  std::size_t dim_ = 0;
  Vector data_;
};

/// Comma-separated reals, one point per row. A first row that does not parse
/// as numbers is taken as a header. Throws UserError on ragged or
/// non-numeric rows.
Sample read_sample_csv(std::istream& in);
Sample read_sample_csv(const std::string& path);

void write_sample_csv(std::ostream& out, const Sample& s);

/// Shortest round-trip text form of a double, used by every writer so
/// outputs are byte-stable.
std::string format_double(double x);

}  // namespace fgamma
