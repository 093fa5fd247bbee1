#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riskflow/core/errors.hpp"

namespace riskflow {

struct RiskTag {
  static constexpr const char* kName = "risk";
};
struct ImportanceTag {
  static constexpr const char* kName = "importance";
};

/// A d-dimensional vector whose components lie in the closed unit interval.
///
/// The checked constructor enforces the range. `unchecked` skips the check so
/// that ingestion can report out-of-range values through `validate_graph`
/// instead of failing on the first one.
template <typename Tag>
class UnitVector {
 public:
  UnitVector() = default;

  explicit UnitVector(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!component_in_range(values_[k])) {
        throw OutOfRange(std::string(Tag::kName) + " component " +
                         std::to_string(k) + " = " +
                         std::to_string(values_[k]) + " is outside [0, 1]");
      }
    }
  }

  UnitVector(std::initializer_list<double> values)
      : UnitVector(std::vector<double>(values)) {}

  static UnitVector unchecked(std::vector<double> values) {
    UnitVector v;
    v.values_ = std::move(values);
    return v;
  }

  static UnitVector zeros(std::size_t d) { return unchecked(std::vector<double>(d, 0.0)); }
  static UnitVector ones(std::size_t d) { return unchecked(std::vector<double>(d, 1.0)); }

  static bool component_in_range(double x) noexcept {
    return std::isfinite(x) && x >= 0.0 && x <= 1.0;
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& to_vector() const noexcept { return values_; }

  bool in_range() const noexcept {
    for (double x : values_) {
      if (!component_in_range(x)) return false;
    }
    return true;
  }

  bool is_zero() const noexcept {
    for (double x : values_) {
      if (x != 0.0) return false;
    }
    return true;
  }

  friend bool operator==(const UnitVector&, const UnitVector&) = default;

 private:
  std::vector<double> values_;
};

using RiskVector = UnitVector<RiskTag>;
using ImportanceVector = UnitVector<ImportanceTag>;

/// Componentwise |a - b| <= tolerance, with equal dimensions.
template <typename Tag>
bool approx_equal(const UnitVector<Tag>& a, const UnitVector<Tag>& b,
                  double tolerance = 1e-9) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - b[k]) > tolerance) return false;
  }
  return true;
}

}  // namespace riskflow
