#include "cupgame/rational.hpp"

#include <gmpxx.h>

#include <numeric>
#include <ostream>
#include <stdexcept>

namespace cupgame {

__extension__ typedef unsigned __int128 u128;
__extension__ typedef __int128 i128;

struct Rational::Big {
  mpq_class value;
  // Filled by from_big: floor when it fits in int64, and frac as a double.
  bool floor_fits = false;
  std::int64_t floor = 0;
  double frac = 0;
};

namespace {

unsigned ctz128(u128 x) {
  auto lo = static_cast<std::uint64_t>(x);
  if (lo != 0) return static_cast<unsigned>(__builtin_ctzll(lo));
  return 64 + static_cast<unsigned>(__builtin_ctzll(static_cast<std::uint64_t>(x >> 64)));
}

u128 gcd128(u128 a, u128 b) {
  if (a == 0) return b;
  if (b == 0) return a;
  const unsigned shift = ctz128(a | b);
  a >>= ctz128(a);
  do {
    b >>= ctz128(b);
    if (a > b) std::swap(a, b);
    b -= a;
  } while (b != 0);
  return a << shift;
}

void mpz_from_u128(mpz_t out, u128 v) {
  const std::uint64_t words[2] = {static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(v >> 64)};
  mpz_import(out, 2, -1, sizeof(std::uint64_t), 0, 0, words);
}

std::string i128_to_string(i128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  u128 u = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
  std::string out;
  while (u != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) out.push_back('-');
  return {out.rbegin(), out.rend()};
}

}  // namespace

struct RationalAccess {
  static Rational small(std::int64_t whole, std::uint64_t num, std::uint64_t den) {
    Rational r;
    r.whole_ = whole;
    r.num_ = num;
    r.den_ = den;
    return r;
  }

  // whole + num/den with 0 <= num < den; reduces and picks a representation.
  static Rational from_split(i128 whole, u128 num, u128 den) {
    if (num == 0) den = 1;
    const u128 g = gcd128(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (den <= Rational::kMaxSmallDen && whole >= INT64_MIN && whole <= INT64_MAX) {
      return small(static_cast<std::int64_t>(whole), static_cast<std::uint64_t>(num),
                   static_cast<std::uint64_t>(den));
    }
    mpz_class w, n, d;
    if (whole >= INT64_MIN && whole <= INT64_MAX) {
      w = static_cast<long>(whole);
    } else {
      const bool neg = whole < 0;
      mpz_from_u128(w.get_mpz_t(), neg ? static_cast<u128>(-(whole + 1)) + 1 : static_cast<u128>(whole));
      if (neg) w = -w;
    }
    mpz_from_u128(n.get_mpz_t(), num);
    mpz_from_u128(d.get_mpz_t(), den);
    auto big = std::make_shared<Rational::Big>();
    big->value = mpq_class(w * d + n, d);
    big->value.canonicalize();
    return Rational::from_big(std::move(big));
  }

  static const mpq_class& mpq(const Rational::Big& b) { return b.value; }
};

Rational Rational::from_big(std::shared_ptr<const Big> big) {
  const mpq_class& q = big->value;
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  if (fl.fits_slong_p() && mpz_sizeinbase(q.get_den_mpz_t(), 2) <= 64) {
    const mpz_class& den = q.get_den();
    if (den <= mpz_class(static_cast<unsigned long>(kMaxSmallDen))) {
      mpz_class rem = q.get_num() - fl * den;
      return RationalAccess::small(fl.get_si(), rem.get_ui(), den.get_ui());
    }
  }
  if (fl.fits_slong_p()) {
    auto& cache = const_cast<Big&>(*big);
    cache.floor_fits = true;
    cache.floor = fl.get_si();
    mpq_class rem(q.get_num() - fl * q.get_den(), q.get_den());
    cache.frac = rem.get_d();
  }
  Rational r;
  r.big_ = std::move(big);
  r.whole_ = 0;
  r.num_ = 0;
  r.den_ = 1;
  return r;
}

std::shared_ptr<const Rational::Big> Rational::to_big() const {
  if (big_) return big_;
  auto big = std::make_shared<Big>();
  mpz_class d(static_cast<unsigned long>(den_));
  mpz_class w(static_cast<long>(whole_));
  mpz_class n(static_cast<unsigned long>(num_));
  big->value = mpq_class(w * d + n, d);
  big->value.canonicalize();
  return big;
}

Rational Rational::fraction(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  i128 n = num;
  i128 d = den;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  i128 w = n / d;
  i128 r = n % d;
  if (r < 0) {
    r += d;
    w -= 1;
  }
  return RationalAccess::from_split(w, static_cast<u128>(r), static_cast<u128>(d));
}

Rational Rational::dyadic(std::uint64_t k, unsigned bits) {
  if (bits > 63) throw std::domain_error("Rational::dyadic: bits > 63");
  const std::uint64_t den = std::uint64_t{1} << bits;
  const auto whole = static_cast<i128>(k >> bits);
  return RationalAccess::from_split(whole, k & (den - 1), den);
}

Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
  };
  if (text.empty()) return fail();
  auto big = std::make_shared<Big>();
  const auto slash = text.find('/');
  const auto dot = text.find('.');
  try {
    if (slash != std::string_view::npos) {
      if (dot != std::string_view::npos) return fail();
      mpz_class n(std::string(text.substr(0, slash)), 10);
      mpz_class d(std::string(text.substr(slash + 1)), 10);
      if (d == 0) return fail();
      big->value = mpq_class(n, d);
    } else if (dot != std::string_view::npos) {
      std::string digits(text.substr(0, dot));
      std::string frac(text.substr(dot + 1));
      if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos) return fail();
      const bool neg = !digits.empty() && digits[0] == '-';
      if (neg) digits.erase(0, 1);
      if (digits.empty()) digits = "0";
      if (digits.find_first_not_of("0123456789") != std::string::npos) return fail();
      mpz_class n(digits + frac, 10);
      mpz_class d;
      mpz_ui_pow_ui(d.get_mpz_t(), 10, frac.size());
      if (neg) n = -n;
      big->value = mpq_class(n, d);
    } else {
      big->value = mpq_class(mpz_class(std::string(text), 10));
    }
  } catch (const std::invalid_argument&) {
    return fail();
  }
  big->value.canonicalize();
  return from_big(std::move(big));
}

bool Rational::is_integer() const {
  if (big_) return big_->value.get_den() == 1;
  return num_ == 0;
}

bool Rational::is_negative() const {
  if (big_) return sgn(big_->value) < 0;
  return whole_ < 0;
}

bool Rational::is_half_integral() const {
  if (big_) {
    const auto& d = big_->value.get_den();
    return d == 1 || d == 2;
  }
  return num_ == 0 || den_ == 2;
}

std::int64_t Rational::floor() const {
  if (!big_) return whole_;
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), big_->value.get_num_mpz_t(), big_->value.get_den_mpz_t());
  if (!fl.fits_slong_p()) throw std::overflow_error("Rational::floor out of int64 range");
  return fl.get_si();
}

Rational Rational::frac() const {
  if (!big_) return RationalAccess::small(0, num_, den_);
  return *this - Rational(floor());
}

double Rational::to_double() const {
  if (big_) return big_->value.get_d();
  return static_cast<double>(whole_) + static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::numerator_str() const {
  if (big_) return big_->value.get_num().get_str();
  return i128_to_string(static_cast<i128>(whole_) * static_cast<i128>(den_) + static_cast<i128>(num_));
}

std::string Rational::denominator_str() const {
  if (big_) return big_->value.get_den().get_str();
  return i128_to_string(static_cast<i128>(den_));
}

std::string Rational::str() const {
  if (is_integer()) return numerator_str();
  return numerator_str() + "/" + denominator_str();
}

Rational Rational::operator-() const {
  if (big_) {
    auto big = std::make_shared<Big>();
    big->value = -big_->value;
    return from_big(std::move(big));
  }
  if (num_ == 0) {
    if (whole_ == INT64_MIN) return RationalAccess::from_split(-static_cast<i128>(whole_), 0, 1);
    return RationalAccess::small(-whole_, 0, 1);
  }
  return RationalAccess::small(~whole_, den_ - num_, den_);
}

Rational& Rational::operator+=(const Rational& rhs) {
  if (!big_ && !rhs.big_) {
    std::int64_t w = 0;
    if (rhs.num_ == 0 || num_ == 0) {
      if (!__builtin_add_overflow(whole_, rhs.whole_, &w)) {
        if (num_ == 0) {
          num_ = rhs.num_;
          den_ = rhs.den_;
        }
        whole_ = w;
        return *this;
      }
    } else if (den_ == rhs.den_) {
      std::uint64_t n = num_ + rhs.num_;  // each < 2^63
      std::int64_t carry = 0;
      if (n >= den_) {
        n -= den_;
        carry = 1;
      }
      if (!__builtin_add_overflow(whole_, rhs.whole_, &w) && !__builtin_add_overflow(w, carry, &w)) {
        if (n == 0) {
          *this = RationalAccess::small(w, 0, 1);
        } else {
          const std::uint64_t g = std::gcd(n, den_);
          *this = RationalAccess::small(w, n / g, den_ / g);
        }
        return *this;
      }
    }
    const std::uint64_t g = std::gcd(den_, rhs.den_);
    const u128 den = static_cast<u128>(den_ / g) * rhs.den_;
    u128 n = static_cast<u128>(num_) * (rhs.den_ / g) + static_cast<u128>(rhs.num_) * (den_ / g);
    i128 whole = static_cast<i128>(whole_) + rhs.whole_;
    if (n >= den) {
      n -= den;
      whole += 1;
    }
    *this = RationalAccess::from_split(whole, n, den);
    return *this;
  }
  auto big = std::make_shared<Big>();
  big->value = to_big()->value + rhs.to_big()->value;
  *this = from_big(std::move(big));
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
  if (!big_ && !rhs.big_ && num_ == 0 && rhs.num_ == 0) {
    std::int64_t w = 0;
    if (!__builtin_mul_overflow(whole_, rhs.whole_, &w)) {
      whole_ = w;
      return *this;
    }
  }
  auto big = std::make_shared<Big>();
  big->value = to_big()->value * rhs.to_big()->value;
  *this = from_big(std::move(big));
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.is_zero()) throw std::domain_error("Rational: division by zero");
  auto big = std::make_shared<Big>();
  big->value = to_big()->value / rhs.to_big()->value;
  *this = from_big(std::move(big));
  return *this;
}

bool operator==(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) return a.whole_ == b.whole_ && a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ && b.big_) return a.big_->value == b.big_->value;
  return false;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.whole_ != b.whole_) return a.whole_ <=> b.whole_;
    if (a.den_ == b.den_) return a.num_ <=> b.num_;
    return static_cast<u128>(a.num_) * b.den_ <=> static_cast<u128>(b.num_) * a.den_;
  }
  if ((!a.big_ || a.big_->floor_fits) && (!b.big_ || b.big_->floor_fits)) {
    const std::int64_t fa = a.big_ ? a.big_->floor : a.whole_;
    const std::int64_t fb = b.big_ ? b.big_->floor : b.whole_;
    if (fa != fb) return fa <=> fb;
    // Both fractional parts are within 2^-53 of their doubles.
    const double da = a.big_ ? a.big_->frac : static_cast<double>(a.num_) / static_cast<double>(a.den_);
    const double db = b.big_ ? b.big_->frac : static_cast<double>(b.num_) / static_cast<double>(b.den_);
    constexpr double kSlack = 0x1p-50;
    if (da < db - kSlack) return std::strong_ordering::less;
    if (da > db + kSlack) return std::strong_ordering::greater;
  }
  const int c = cmp(a.to_big()->value, b.to_big()->value);
  return c <=> 0;
}

Rational abs(const Rational& x) { return x.is_negative() ? -x : x; }

std::ostream& operator<<(std::ostream& os, const Rational& x) { return os << x.str(); }

}  // namespace cupgame
