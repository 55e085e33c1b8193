#include <doctest.h>

#include <random>

#include "mlp/rat.hpp"

using namespace mlp;

TEST_CASE("encoding size of rationals") {
    CHECK(encoding_size(Rat(0)) == 3);
    CHECK(encoding_size(Rat(3, 7)) == 6);
    CHECK(encoding_size(Rat(-8)) == 6);
    CHECK(encoding_size(Rat(1)) == 3);
    CHECK(encoding_size(Rat(-1, 2)) == 4);
}

TEST_CASE("parse and print") {
    CHECK(Rat::parse("6/4") == Rat(3, 2));
    CHECK(Rat::parse("-3").str() == "-3");
    CHECK(Rat(3, 2).str() == "3/2");
    CHECK_THROWS(Rat::parse_canonical("6/4"));
    CHECK_THROWS(Rat::parse("1/0"));
    CHECK_THROWS(Rat::parse("x"));
}

TEST_CASE("powers of two and floor") {
    CHECK(pow2(0) == Rat(1));
    CHECK(pow2(-3) == Rat(1, 8));
    CHECK(pow2(70) == Rat(mpq_class(mpz_class(1) << 70)));
    CHECK(floor(Rat(-1, 2)) == -1);
    CHECK(floor(Rat(7, 2)) == 3);
}

TEST_CASE("arithmetic agrees with GMP on random operands, including overflow into big values") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long> big(-(1L << 40), 1L << 40), small(1, 1L << 20);
    for (int t = 0; t < 2000; ++t) {
        long a = big(rng), b = small(rng), c = big(rng), d = small(rng);
        Rat x(a, b), y(c, d);
        mpq_class qx(a, b), qy(c, d);
        qx.canonicalize();
        qy.canonicalize();
        CHECK(x + y == Rat(mpq_class(qx + qy)));
        CHECK(x - y == Rat(mpq_class(qx - qy)));
        CHECK(x * y == Rat(mpq_class(qx * qy)));
        if (c != 0) CHECK(x / y == Rat(mpq_class(qx / qy)));
        CHECK((x < y) == (qx < qy));
    }
}
