#include "gedf/rational.hpp"

#include <charconv>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace gedf {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

bool fits64(__int128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  *this = reduce(num, den);
}

Rational Rational::reduce(__int128 num, __int128 den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (!fits64(num) || !fits64(den)) throw std::overflow_error("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

Rational Rational::operator+(const Rational& rhs) const {
  const __int128 g = gcd128(den_, rhs.den_);
  const __int128 lhs_scale = rhs.den_ / g;
  const __int128 rhs_scale = den_ / g;
  return reduce(num_ * lhs_scale + rhs.num_ * rhs_scale, den_ * lhs_scale);
}

Rational Rational::operator-(const Rational& rhs) const {
  return *this + Rational(-rhs.num_, rhs.den_);
}

Rational Rational::operator*(const Rational& rhs) const {
  return reduce(static_cast<__int128>(num_) * rhs.num_, static_cast<__int128>(den_) * rhs.den_);
}

Rational Rational::operator/(const Rational& rhs) const {
  return reduce(static_cast<__int128>(num_) * rhs.den_, static_cast<__int128>(den_) * rhs.num_);
}

std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) {
  const __int128 a = static_cast<__int128>(lhs.num_) * rhs.den_;
  const __int128 b = static_cast<__int128>(rhs.num_) * lhs.den_;
  return a <=> b;
}

Rational Rational::parse(std::string_view text) {
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 12 || frac.front() == '+' || frac.front() == '-') {
      throw std::invalid_argument("bad decimal: '" + std::string(text) + "'");
    }
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const auto whole_text = text.substr(0, dot);
    const bool negative = !whole_text.empty() && whole_text.front() == '-';
    const std::int64_t whole = whole_text.empty() || whole_text == "-" ? 0 : parse_int(whole_text);
    const std::int64_t part = parse_int(frac);
    return Rational(whole, 1) + Rational(negative ? -part : part, scale);
  }
  return Rational(parse_int(text), 1);
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace gedf
