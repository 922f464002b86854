#pragma once

#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shapeguard {

/// Closed interval over the extended reals. Endpoints may be infinite, never NaN.
///
/// Endpoints are rounded outward, so enclosures are sound in floating point;
/// exactly representable results are not widened.
class Interval {
 public:
  constexpr Interval() = default;
  /// Point interval.
  explicit Interval(double value);
  /// Throws DomainError if lo > hi or either endpoint is NaN.
  Interval(double lo, double hi);

  static Interval entire() noexcept;
  static Interval at_least(double lo);
  static Interval at_most(double hi);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double width() const noexcept { return hi_ - lo_; }
  double mid() const noexcept;

  bool is_point() const noexcept { return lo_ == hi_; }
  bool is_finite() const noexcept;
  bool contains(double x) const noexcept { return lo_ <= x && x <= hi_; }
  bool contains_zero() const noexcept { return lo_ <= 0.0 && 0.0 <= hi_; }
  /// True if this interval lies inside `outer`.
  bool subset_of(const Interval& outer) const noexcept {
    return outer.lo_ <= lo_ && hi_ <= outer.hi_;
  }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
/// Throws DomainError when `b` contains zero.
Interval operator/(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);

Interval operator*(double s, const Interval& a);

/// Integer power with the exact rule for even exponents: pow_int([-1,1], 2) == [0,1].
Interval pow_int(const Interval& a, int exponent);
Interval min(const Interval& a, const Interval& b);
Interval max(const Interval& a, const Interval& b);
Interval hull(const Interval& a, const Interval& b);
/// Intersection; the caller guarantees the operands overlap.
Interval intersect(const Interval& a, const Interval& b);

std::ostream& operator<<(std::ostream& os, const Interval& a);

/// Named axis-aligned box. Keeps declaration order; names are unique.
class Box {
 public:
  Box() = default;
  Box(std::initializer_list<std::pair<std::string, Interval>> dims);

  /// Adds or replaces the interval of `name`.
  void set(const std::string& name, const Interval& range);
  bool has(std::string_view name) const;
  /// Throws ArityError when `name` is absent.
  const Interval& at(std::string_view name) const;

  std::size_t size() const noexcept { return dims_.size(); }
  const std::vector<std::pair<std::string, Interval>>& dims() const noexcept { return dims_; }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::vector<std::pair<std::string, Interval>> dims_;
};

}  // namespace shapeguard
