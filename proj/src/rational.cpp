#include "hms/rational.hpp"

#include <limits>
#include <ostream>

#include "hms/error.hpp"

namespace hms {
namespace {

using wide = __int128;

wide gcd_wide(wide a, wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational from_wide(wide n, wide d) {
  require(d != 0, errc::kInvalidArgument, "rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  wide g = gcd_wide(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  constexpr wide lim = std::numeric_limits<std::int64_t>::max();
  require(n <= lim && -n <= lim && d <= lim, errc::kInvalidArgument, "rational overflow");
  return Rational(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  require(d != 0, errc::kInvalidArgument, "rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  std::int64_t g = std::gcd(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num_ = n;
  den_ = d;
}

std::int64_t Rational::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

Rational Rational::mod(const Rational& m) const {
  require(m.num_ > 0, errc::kInvalidArgument, "modulus must be positive");
  Rational q = *this / m;
  return *this - m * Rational(q.floor());
}

Rational operator+(const Rational& a, const Rational& b) {
  return from_wide(static_cast<wide>(a.num_) * b.den_ + static_cast<wide>(b.num_) * a.den_,
                   static_cast<wide>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return from_wide(static_cast<wide>(a.num_) * b.num_, static_cast<wide>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  require(b.num_ != 0, errc::kInvalidArgument, "division by zero rational");
  return from_wide(static_cast<wide>(a.num_) * b.den_, static_cast<wide>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  wide l = static_cast<wide>(a.num_) * b.den_;
  wide r = static_cast<wide>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace hms
