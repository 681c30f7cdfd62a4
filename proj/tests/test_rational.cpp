#include <doctest.h>

#include <random>

#include "fairdiv/errors.hpp"
#include "fairdiv/rational.hpp"

using fairdiv::InvalidInput;
using fairdiv::Rational;

TEST_CASE("rational parsing and canonical form") {
    CHECK(Rational::parse("6/4") == Rational(3, 2));
    CHECK(Rational::parse("6/4").str() == "3/2");
    CHECK(Rational::parse("-10/4").str() == "-5/2");
    CHECK(Rational::parse("7").str() == "7/1");
    CHECK(Rational::parse("0/5").str() == "0/1");
    CHECK(Rational(4, -6).str() == "-2/3");
    CHECK(Rational::parse("123456789012345678901234567890/2").str() == "61728394506172839450617283945/1");

    CHECK_THROWS_AS(Rational::parse("1/0"), InvalidInput);
    CHECK_THROWS_AS(Rational::parse(""), InvalidInput);
    CHECK_THROWS_AS(Rational::parse("1.5"), InvalidInput);
    CHECK_THROWS_AS(Rational::parse("1/-2"), InvalidInput);
    CHECK_THROWS_AS(Rational::parse(" 3"), InvalidInput);
    CHECK_THROWS_AS(Rational(1) / Rational(0), InvalidInput);
}

TEST_CASE("rational ordering and arithmetic") {
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(0));
    CHECK(Rational(5, 4) * Rational(4) == Rational(5));
    CHECK(Rational(2, 3).pow(3) == Rational(8, 27));
    CHECK(Rational(7).pow(0) == Rational(1));
    CHECK(-Rational(3, 4) == Rational(-3, 4));
}

TEST_CASE("addition then subtraction round-trips for large operands") {
    std::mt19937_64 rng(0xfa1d);
    std::uniform_int_distribution<std::int64_t> dist(-(std::int64_t{1} << 62), std::int64_t{1} << 62);
    for (int trial = 0; trial < 500; ++trial) {
        std::int64_t den_a = dist(rng);
        std::int64_t den_c = dist(rng);
        if (den_a == 0) den_a = 1;
        if (den_c == 0) den_c = 1;
        // Square the operands to push well past 64 bits.
        const Rational a = Rational(dist(rng), den_a) * Rational(dist(rng), den_a);
        const Rational c = Rational(dist(rng), den_c) * Rational(dist(rng), den_c);
        CHECK((a + c) - c == a);
        if (!c.is_zero()) CHECK((a * c) / c == a);
        CHECK(Rational::parse(a.str()) == a);
    }
}
