#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace ltgap {

struct Band {
  double lo = 0.0;
  double hi = 0.0;
};

/// Finite union of disjoint closed bands, ordered left to right.
class GapSet {
 public:
  GapSet() = default;
  /// Throws InvalidArgument unless lo < hi within each band and bands are
  /// strictly increasing and disjoint.
  explicit GapSet(std::vector<Band> bands);
  GapSet(std::initializer_list<Band> bands) : GapSet(std::vector<Band>(bands)) {}

  const std::vector<Band>& bands() const noexcept { return bands_; }
  std::size_t band_count() const noexcept { return bands_.size(); }
  bool empty() const noexcept { return bands_.empty(); }
  double lower() const;
  double upper() const;

  /// Open gaps between consecutive bands.
  std::vector<Band> gaps() const;

  /// Distance to the union of bands (0 inside a band).
  double distance(double x) const;
  /// True when x lies in a band enlarged by `tolerance`.
  bool in_band(double x, double tolerance = 0.0) const;
  /// Total length of the bands.
  double measure() const noexcept;

  GapSet scaled(double t) const;

  std::string to_string() const;

 private:
  std::vector<Band> bands_;
};

}  // namespace ltgap
