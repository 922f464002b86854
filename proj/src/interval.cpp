#include "shapeguard/interval.hpp"

#include <algorithm>
#include <cmath>

#include "shapeguard/error.hpp"

namespace shapeguard {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr double kTiny = 0x1p-969;  // below this, fma residuals may underflow

double down(double x) { return std::nextafter(x, -kInf); }
double up(double x) { return std::nextafter(x, kInf); }

// Directed rounding from error-free transformations: the rounded result is
// moved one ulp only when the exact result lies beyond it, so exactly
// representable results stay exact.
double add_rounded(double a, double b, bool upward) {
  const double s = a + b;
  if (!std::isfinite(s)) return s;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  if (upward) return err > 0.0 ? up(s) : s;
  return err < 0.0 ? down(s) : s;
}

// Endpoint product with the interval convention 0 * inf = 0.
double mul_rounded(double a, double b, bool upward) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = a * b;
  if (!std::isfinite(p)) return p;
  if (std::abs(p) < kTiny) return upward ? up(p) : down(p);
  const double err = std::fma(a, b, -p);
  if (upward) return err > 0.0 ? up(p) : p;
  return err < 0.0 ? down(p) : p;
}

double div_rounded(double a, double b, bool upward) {
  const double q = a / b;
  if (!std::isfinite(q) || a == 0.0) return q;
  if (std::abs(q) < kTiny || std::abs(a) < kTiny) return upward ? up(q) : down(q);
  // a - q b is exact; its sign against b's gives the side of the true quotient.
  const double r = std::fma(-q, b, a);
  const double side = b > 0.0 ? r : -r;
  if (upward) return side > 0.0 ? up(q) : q;
  return side < 0.0 ? down(q) : q;
}

double pow_rounded(double x, int n, bool upward) {
  // x >= 0 here, so every partial product rounds in the same direction.
  double result = 1.0;
  for (int i = 0; i < n; ++i) result = mul_rounded(result, x, upward);
  return result;
}

}  // namespace

Interval::Interval(double value) : Interval(value, value) {}

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (std::isnan(lo) || std::isnan(hi)) throw DomainError("interval endpoint is NaN");
  if (lo > hi) throw DomainError("interval lower endpoint exceeds upper endpoint");
}

Interval Interval::entire() noexcept {
  Interval r;
  r.lo_ = -kInf;
  r.hi_ = kInf;
  return r;
}

Interval Interval::at_least(double lo) { return {lo, kInf}; }
Interval Interval::at_most(double hi) { return {-kInf, hi}; }

double Interval::mid() const noexcept {
  if (std::isinf(lo_) && std::isinf(hi_)) return 0.0;
  if (std::isinf(lo_) || std::isinf(hi_)) return std::isinf(lo_) ? hi_ : lo_;
  return lo_ + 0.5 * (hi_ - lo_);
}

bool Interval::is_finite() const noexcept { return std::isfinite(lo_) && std::isfinite(hi_); }

Interval operator+(const Interval& a, const Interval& b) {
  double lo = add_rounded(a.lo(), b.lo(), false);
  double hi = add_rounded(a.hi(), b.hi(), true);
  // -inf + inf can only arise from entire operands; the sum is then entire too.
  if (std::isnan(lo)) lo = -kInf;
  if (std::isnan(hi)) hi = kInf;
  return {lo, hi};
}

Interval operator-(const Interval& a) { return {-a.hi(), -a.lo()}; }

Interval operator-(const Interval& a, const Interval& b) { return a + (-b); }

Interval operator*(const Interval& a, const Interval& b) {
  const double lo = std::min({mul_rounded(a.lo(), b.lo(), false), mul_rounded(a.lo(), b.hi(), false),
                              mul_rounded(a.hi(), b.lo(), false), mul_rounded(a.hi(), b.hi(), false)});
  const double hi = std::max({mul_rounded(a.lo(), b.lo(), true), mul_rounded(a.lo(), b.hi(), true),
                              mul_rounded(a.hi(), b.lo(), true), mul_rounded(a.hi(), b.hi(), true)});
  return {lo, hi};
}

Interval operator*(double s, const Interval& a) { return Interval(s) * a; }

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw DomainError("division by an interval containing zero");
  const double lo = std::min({div_rounded(a.lo(), b.lo(), false), div_rounded(a.lo(), b.hi(), false),
                              div_rounded(a.hi(), b.lo(), false), div_rounded(a.hi(), b.hi(), false)});
  const double hi = std::max({div_rounded(a.lo(), b.lo(), true), div_rounded(a.lo(), b.hi(), true),
                              div_rounded(a.hi(), b.lo(), true), div_rounded(a.hi(), b.hi(), true)});
  return {lo, hi};
}

Interval pow_int(const Interval& a, int exponent) {
  if (exponent < 0) throw DomainError("negative exponent in pow_int");
  if (exponent == 0) return Interval(1.0);
  if (exponent == 1) return a;
  // Powers of |endpoint|, rounded each way.
  auto mag = [&](double x, bool upward) { return pow_rounded(std::abs(x), exponent, upward); };
  const bool odd = exponent % 2 == 1;
  auto signed_pow = [&](double x, bool upward) {
    if (x >= 0.0 || !odd) return mag(x, upward);
    return -mag(x, !upward);
  };
  if (odd) return {signed_pow(a.lo(), false), signed_pow(a.hi(), true)};
  if (a.lo() >= 0.0) return {mag(a.lo(), false), mag(a.hi(), true)};
  if (a.hi() <= 0.0) return {mag(a.hi(), false), mag(a.lo(), true)};
  return {0.0, std::max(mag(a.lo(), true), mag(a.hi(), true))};
}

Interval min(const Interval& a, const Interval& b) {
  return {std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi())};
}

Interval max(const Interval& a, const Interval& b) {
  return {std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

Interval intersect(const Interval& a, const Interval& b) {
  const double lo = std::max(a.lo(), b.lo());
  const double hi = std::min(a.hi(), b.hi());
  // Rounding can push two enclosures of the same range apart by an ulp.
  if (lo > hi) return {std::min(lo, hi), std::max(lo, hi)};
  return {lo, hi};
}

std::ostream& operator<<(std::ostream& os, const Interval& a) {
  return os << '[' << a.lo() << ", " << a.hi() << ']';
}

Box::Box(std::initializer_list<std::pair<std::string, Interval>> dims) {
  for (const auto& [name, range] : dims) set(name, range);
}

void Box::set(const std::string& name, const Interval& range) {
  for (auto& [n, r] : dims_) {
    if (n == name) {
      r = range;
      return;
    }
  }
  dims_.emplace_back(name, range);
}

bool Box::has(std::string_view name) const {
  return std::any_of(dims_.begin(), dims_.end(), [&](const auto& d) { return d.first == name; });
}

const Interval& Box::at(std::string_view name) const {
  for (const auto& [n, r] : dims_) {
    if (n == name) return r;
  }
  throw ArityError("box has no interval for variable '" + std::string(name) + "'");
}

}  // namespace shapeguard
