#include <doctest.h>

#include <gmpxx.h>

#include "cupgame/rational.hpp"
#include "cupgame/rng.hpp"
#include "helpers.hpp"

using cupgame::Rational;
using testutil::R;

TEST_CASE("rational parsing and canonical text") {
  CHECK(R("6/8").str() == "3/4");
  CHECK(R("-0.125").str() == "-1/8");
  CHECK(R("4/2").str() == "2");
  CHECK(R("0.7") + R("0.5") == R("6/5"));
  CHECK_THROWS_AS(R("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(R("abc"), std::invalid_argument);
  CHECK_THROWS_AS(R("1.2/3"), std::invalid_argument);
}

TEST_CASE("floor and frac") {
  CHECK(R("23/10").floor() == 2);
  CHECK(R("23/10").frac() == R("3/10"));
  CHECK(R("-1/3").floor() == -1);
  CHECK(R("-1/3").frac() == R("2/3"));
  CHECK(R("5").frac().is_zero());
}

TEST_CASE("small and big paths agree with GMP") {
  cupgame::Xoshiro256ss rng(99);
  for (int i = 0; i < 2000; ++i) {
    const Rational a = rng.unit_rational() + Rational(static_cast<std::int64_t>(rng.below(5)));
    const Rational b = Rational::fraction(static_cast<std::int64_t>(rng.below(1000)) + 1,
                                          static_cast<std::int64_t>(rng.below(997)) + 1);
    const mpq_class qa(a.numerator_str() + "/" + a.denominator_str());
    const mpq_class qb(b.numerator_str() + "/" + b.denominator_str());
    mpq_class sum = qa + qb;
    sum.canonicalize();
    const Rational s = a + b;
    CHECK(s.numerator_str() == sum.get_num().get_str());
    CHECK(s.denominator_str() == sum.get_den().get_str());
    CHECK(((a < b) == (qa < qb)));
    CHECK(((s > a) == (sum > qa)));
    CHECK(s - b == a);
  }
}

TEST_CASE("comparison near ties between big values") {
  // 2^63 denominators mixed with odd denominators land on the big path.
  const Rational off = Rational::dyadic(3, 63);
  const Rational x = off + R("1/7");
  const Rational y = off + R("1/7") + Rational::dyadic(1, 63) - Rational::dyadic(1, 63);
  CHECK(x == y);
  CHECK_FALSE(x < y);
  const Rational z = x + Rational::dyadic(1, 63) * R("1/3");
  CHECK(x < z);
  CHECK(z > x);
}

TEST_CASE("half integrality") {
  CHECK(R("3/2").is_half_integral());
  CHECK(R("2").is_half_integral());
  CHECK_FALSE(R("1/4").is_half_integral());
}
