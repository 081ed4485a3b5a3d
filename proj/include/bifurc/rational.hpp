// Exact rational arithmetic used for eigenvalue degeneracy bookkeeping.
#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bifurc {

/// Small exact rational on int64 storage. Degeneracy of box eigenvalues is
/// decided by equality of these values, never by floating comparison.
class Rational {
public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1) { assign(num, den); }

  static Rational parse(const std::string& text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  Rational operator+(const Rational& o) const {
    return from_i128(w(num_) * o.den_ + w(o.num_) * den_, w(den_) * o.den_);
  }
  Rational operator*(const Rational& o) const {
    return from_i128(w(num_) * o.num_, w(den_) * o.den_);
  }
  Rational inverse() const {
    if (num_ == 0) throw std::domain_error("Rational: division by zero");
    return Rational(den_, num_);
  }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const { return w(num_) * o.den_ < w(o.num_) * den_; }

private:
  using i128 = __int128;
  static i128 w(std::int64_t v) { return static_cast<i128>(v); }

  void assign(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num_ = g ? num / g : num;
    den_ = g ? den / g : den;
  }

  static Rational from_i128(i128 num, i128 den) {
    if (den < 0) { num = -num; den = -den; }
    i128 a = num < 0 ? -num : num;
    i128 g = gcd128(a, den);
    if (g > 1) { num /= g; den /= g; }
    constexpr i128 lim = INT64_MAX;
    if (num > lim || num < -lim || den > lim)
      throw std::overflow_error("Rational: overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) { i128 t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline Rational Rational::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(text));
    return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("Rational: cannot parse '" + text + "'");
  }
}

}  // namespace bifurc
