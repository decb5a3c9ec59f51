#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "matchgate/rational.hpp"
#include "support/generators.hpp"

using matchgate::GaussianRational;
using matchgate::ParseError;

namespace {
GaussianRational gq(long re_n, long re_d, long im_n = 0, long im_d = 1) {
    return GaussianRational(mpq_class(re_n, re_d), mpq_class(im_n, im_d));
}
}  // namespace

TEST_CASE("addition", "[rational]") {
    REQUIRE(gq(1, 2) + gq(1, 2) == GaussianRational(1));
    REQUIRE(GaussianRational::i() + gq(0, 1, -1, 1) == GaussianRational(0));
    REQUIRE(gq(1, 3, 1, 6) + gq(1, 6, 1, 3) == gq(1, 2, 1, 2));
}

TEST_CASE("multiplication and inverses", "[rational]") {
    REQUIRE(GaussianRational::i() * GaussianRational::i() == GaussianRational(-1));
    REQUIRE(GaussianRational(2).inv() == gq(1, 2));
    REQUIRE(gq(1, 1, 1, 1) * gq(1, 1, -1, 1) == GaussianRational(2));
    REQUIRE_THROWS_AS(GaussianRational(0).inv(), std::domain_error);
    REQUIRE_THROWS_AS(GaussianRational(1) / GaussianRational(0), std::domain_error);
}

TEST_CASE("parsing", "[rational]") {
    REQUIRE(GaussianRational::parse("3/2") == gq(3, 2));
    REQUIRE(GaussianRational::parse("-1") == GaussianRational(-1));
    REQUIRE(GaussianRational::parse("1/3+2/5i") == gq(1, 3, 2, 5));
    REQUIRE(GaussianRational::parse("2i") == gq(0, 1, 2, 1));
    REQUIRE(GaussianRational::parse("-3/4i") == gq(0, 1, -3, 4));
    REQUIRE(GaussianRational::parse("1-1i") == gq(1, 1, -1, 1));
    REQUIRE(GaussianRational::parse("2/4") == gq(1, 2));  // reduced on input
}

TEST_CASE("parse errors carry a position", "[rational]") {
    REQUIRE_THROWS_AS(GaussianRational::parse(""), ParseError);
    REQUIRE_THROWS_AS(GaussianRational::parse("x"), ParseError);
    REQUIRE_THROWS_AS(GaussianRational::parse("1+2"), ParseError);
    REQUIRE_THROWS_AS(GaussianRational::parse("1i5"), ParseError);
    REQUIRE_THROWS_AS(GaussianRational::parse("1 +2i"), ParseError);
    try {
        GaussianRational::parse("1/0");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.position() == 2);
    }
}

TEST_CASE("format round trip is exact", "[rational]") {
    testsupport::Rng rng(20240517);
    for (int trial = 0; trial < 10000; ++trial) {
        GaussianRational x = testsupport::random_gaussian(rng, true);
        REQUIRE(GaussianRational::parse(x.str()) == x);
    }
}

TEST_CASE("field axioms on random triples", "[rational]") {
    testsupport::Rng rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        GaussianRational a = testsupport::random_gaussian(rng, true);
        GaussianRational b = testsupport::random_gaussian(rng, true);
        GaussianRational c = testsupport::random_gaussian(rng, true);
        REQUIRE((a + b) + c == a + (b + c));
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(a * (b + c) == a * b + a * c);
        REQUIRE(a + (-a) == GaussianRational(0));
        if (!a.is_zero()) REQUIRE(a * a.inv() == GaussianRational(1));
    }
}
