#pragma once

#include <cstdint>
#include <compare>
#include <iosfwd>
#include <numeric>
#include <string>

namespace hms {

/// Exact fraction with a positive denominator, always stored in lowest terms.
///
/// Intercepts, twists and theta characteristics are rational in every object the
/// categories produce, so intersection points can be compared exactly.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Largest integer not exceeding the value.
  std::int64_t floor() const;
  std::int64_t ceil() const { return -(-*this).floor(); }
  /// Representative in [0, 1).
  Rational frac() const { return *this - Rational(floor()); }
  /// Representative in [0, m) for positive m.
  Rational mod(const Rational& m) const;
  bool is_integer() const { return den_ == 1; }

  Rational operator-() const { return Rational(-num_, den_); }
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  std::string str() const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace hms
