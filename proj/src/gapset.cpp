#include "ltgap/gapset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ltgap/errors.hpp"

namespace ltgap {

GapSet::GapSet(std::vector<Band> bands) : bands_(std::move(bands)) {
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    if (!(bands_[i].lo < bands_[i].hi)) throw InvalidArgument("GapSet: band with lo >= hi");
    if (i > 0 && !(bands_[i - 1].hi < bands_[i].lo))
      throw InvalidArgument("GapSet: bands must be ordered and disjoint");
  }
}

double GapSet::lower() const {
  if (bands_.empty()) throw InvalidArgument("GapSet is empty");
  return bands_.front().lo;
}

double GapSet::upper() const {
  if (bands_.empty()) throw InvalidArgument("GapSet is empty");
  return bands_.back().hi;
}

std::vector<Band> GapSet::gaps() const {
  std::vector<Band> out;
  for (std::size_t i = 0; i + 1 < bands_.size(); ++i) out.push_back({bands_[i].hi, bands_[i + 1].lo});
  return out;
}

double GapSet::distance(double x) const {
  double d = std::numeric_limits<double>::infinity();
  for (const Band& b : bands_) {
    if (x >= b.lo && x <= b.hi) return 0.0;
    d = std::min(d, x < b.lo ? b.lo - x : x - b.hi);
  }
  return d;
}

bool GapSet::in_band(double x, double tolerance) const {
  return std::any_of(bands_.begin(), bands_.end(), [&](const Band& b) {
    return x >= b.lo - tolerance && x <= b.hi + tolerance;
  });
}

double GapSet::measure() const noexcept {
  double m = 0.0;
  for (const Band& b : bands_) m += b.hi - b.lo;
  return m;
}

GapSet GapSet::scaled(double t) const {
  if (!(t > 0.0)) throw InvalidArgument("GapSet::scaled: factor must be positive");
  std::vector<Band> out = bands_;
  for (Band& b : out) {
    b.lo *= t;
    b.hi *= t;
  }
  return GapSet(std::move(out));
}

std::string GapSet::to_string() const {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    if (i) os << " u ";
    os << '[' << bands_[i].lo << ", " << bands_[i].hi << ']';
  }
  return os.str();
}

}  // namespace ltgap
