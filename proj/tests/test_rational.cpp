#include <doctest.h>

#include <stdexcept>

#include "fairmult/rational.hpp"

using namespace fairmult;

TEST_CASE("parse_rational: fraction forms") {
    CHECK(parse_rational("3/4") == rat_frac(3, 4));
    CHECK(parse_rational("-1/8") == rat_frac(-1, 8));
    CHECK(parse_rational("+1/8") == rat_frac(1, 8));
    CHECK(parse_rational(" 3 / 4 ") == rat_frac(3, 4));
    CHECK(parse_rational("6/8") == rat_frac(3, 4));  // canonicalized
    CHECK(parse_rational("0/5") == 0);
}

TEST_CASE("parse_rational: decimals are digit-exact") {
    CHECK(parse_rational("0.25") == rat_frac(1, 4));
    CHECK(parse_rational("0.1") == rat_frac(1, 10));  // not the nearest double
    CHECK(parse_rational("0.125") == rat_frac(1, 8));
    CHECK(parse_rational("7") == 7);
    CHECK(parse_rational("-0.5") == rat_frac(-1, 2));
    CHECK(parse_rational(".5") == rat_frac(1, 2));
    CHECK(parse_rational("1e-3") == rat_frac(1, 1000));
    CHECK(parse_rational("2.5e-2") == rat_frac(1, 40));
    CHECK(parse_rational("12e2") == 1200);
    CHECK(parse_rational("1.5E1") == 15);
}

TEST_CASE("parse_rational: leading zeros stay decimal") {
    // Regression: GMP's auto-base string constructor reads "025" as octal.
    CHECK(parse_rational("0.025") == rat_frac(1, 40));
    CHECK(parse_rational("0.075") == rat_frac(3, 40));
    CHECK(parse_rational("0.050") == rat_frac(1, 20));
    CHECK(parse_rational("010/020") == rat_frac(1, 2));
}

TEST_CASE("parse_rational: rejects malformed input") {
    for (const char* bad : {"", "abc", "1/0", "1//2", "1.2.3", "1e", "--1",
                            "1/-2", "0x10", "nan"})
        CHECK_THROWS_AS(parse_rational(bad), std::invalid_argument);
}

TEST_CASE("rat_to_string canonical forms") {
    CHECK(rat_to_string(rat_frac(3, 4)) == "3/4");
    CHECK(rat_to_string(rat_frac(-3, 4)) == "-3/4");
    CHECK(rat_to_string(Rat(7)) == "7");
    CHECK(rat_to_string(Rat(0)) == "0");
    CHECK(rat_to_string(parse_rational("0.025")) == "1/40");
}

TEST_CASE("rat_frac canonicalizes every construction") {
    // The raw two-argument mpq constructor does not reduce, which breaks
    // operator==; rat_frac must never exhibit that.
    CHECK(rat_frac(2, 4) == rat_frac(1, 2));
    CHECK(rat_frac(9, 12) == rat_frac(3, 4));
    CHECK(rat_frac(1, -2) == rat_frac(-1, 2));
    CHECK(rat_frac(0, 7) == 0);
    CHECK(rat_frac(1, 2) + rat_frac(1, 2) == 1);
    CHECK_THROWS_AS(rat_frac(1, 0), std::invalid_argument);
}

TEST_CASE("rat_from_double is exact on dyadics") {
    CHECK(rat_from_double(0.25) == rat_frac(1, 4));
    CHECK(rat_from_double(-1.5) == rat_frac(-3, 2));
    // 0.1 has no finite binary expansion, so the double is not 1/10.
    CHECK(rat_from_double(0.1) != rat_frac(1, 10));
    CHECK(to_double(rat_from_double(0.1)) == 0.1);
}

TEST_CASE("rat_abs") {
    CHECK(rat_abs(rat_frac(-3, 5)) == rat_frac(3, 5));
    CHECK(rat_abs(rat_frac(3, 5)) == rat_frac(3, 5));
    CHECK(rat_abs(Rat(0)) == 0);
}
