#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

namespace cupgame {

/// Exact rational number.
///
/// Values are stored as `whole + num/den` with `0 <= num < den <= 2^63`
/// whenever that fits; anything larger lives in a GMP rational. The
/// representation is canonical (reduced, and small whenever possible), so
/// equality is structural. All fills, offsets, priorities and placements in
/// a game are Rationals; dyadic offsets k/2^63 stay on the small path.
class Rational {
 public:
  static constexpr std::uint64_t kMaxSmallDen = std::uint64_t{1} << 63;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : whole_(value) {}  // NOLINT(implicit)
  constexpr Rational(int value) : whole_(value) {}            // NOLINT(implicit)
  constexpr Rational(std::uint32_t value) : whole_(value) {}  // NOLINT(implicit)

  /// num/den in lowest terms; den must be non-zero.
  static Rational fraction(std::int64_t num, std::int64_t den);
  /// k / 2^bits, for 0 <= bits <= 63.
  static Rational dyadic(std::uint64_t k, unsigned bits);
  /// Parses "a", "-a", "a/b" or a finite decimal such as "0.125".
  static Rational parse(std::string_view text);

  bool is_small() const noexcept { return big_ == nullptr; }
  bool is_integer() const;
  bool is_zero() const noexcept { return is_small() && whole_ == 0 && num_ == 0; }
  bool is_negative() const;
  /// True iff 2*x is an integer.
  bool is_half_integral() const;

  /// Largest integer <= value. Throws std::overflow_error past int64.
  std::int64_t floor() const;
  /// value - floor(value), in [0, 1).
  Rational frac() const;
  double to_double() const;

  /// Canonical text: "a" for integers, "a/b" otherwise.
  std::string str() const;
  std::string numerator_str() const;
  std::string denominator_str() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& rhs);
  Rational& operator-=(const Rational& rhs);
  Rational& operator*=(const Rational& rhs);
  Rational& operator/=(const Rational& rhs);

  friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
  friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
  friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
  friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }

  friend bool operator==(const Rational& a, const Rational& b);
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  struct Big;

  static Rational from_big(std::shared_ptr<const Big> big);
  std::shared_ptr<const Big> to_big() const;

  std::int64_t whole_ = 0;
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
  std::shared_ptr<const Big> big_;

  friend struct RationalAccess;
};

Rational abs(const Rational& x);
std::ostream& operator<<(std::ostream& os, const Rational& x);

}  // namespace cupgame
