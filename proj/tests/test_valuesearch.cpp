#include <doctest.h>

#include "mlp/gadgets.hpp"
#include "mlp/sweeps.hpp"
#include "mlp/valuesearch.hpp"

using namespace mlp;

namespace {

DecisionOracle planted(const Rat& v) {
    DecisionOracle o;
    o.le = [v](const Rat& t) { return !(t < v); };
    return o;
}

}  // namespace

TEST_CASE("rational reconstruction") {
    CHECK(reconstruct_rational(Rat(2), Rat(2), 8) == Rat(2));
    CHECK(reconstruct_rational(Rat(4285, 10000), Rat(4286, 10000), 10) == Rat(3, 7));
    CHECK(reconstruct_rational(Rat(333, 1000), Rat(334, 1000), 8) == Rat(1, 3));
    CHECK(reconstruct_rational(Rat(1, 3), Rat(1, 2), 8) == Rat(1, 3));
    CHECK_THROWS_AS(reconstruct_rational(Rat(1000001, 3000000), Rat(1000002, 3000000), 6), BoundViolated);
    CHECK(simplest_rational(Rat(-1, 2), Rat(1, 2)) == Rat(0));
    CHECK(simplest_rational(Rat(-4, 3), Rat(-5, 4)) == Rat(-4, 3));
}

TEST_CASE("binary search on planted values") {
    CHECK(binary_search_value(planted(0), 4).outcome.value == Rat(0));
    CHECK(binary_search_value(planted(-1), 4).outcome.value == Rat(-1));
    Rng rng(43);
    for (int t = 0; t < 200; ++t) {
        long p = std::uniform_int_distribution<long>(-100000, 100000)(rng);
        long q = std::uniform_int_distribution<long>(1, 100000)(rng);
        Rat v(p, q);
        long phi = encoding_size(v) + t % 5;
        if (phi < 3) phi = 3;
        ValueSearch vs = binary_search_value(planted(v), phi);
        CHECK(vs.outcome.value == v);
        CHECK(vs.queries <= 2 * phi + 4);
    }
}

TEST_CASE("status flags and inconsistent oracles") {
    DecisionOracle inf = planted(0);
    inf.infeasible = [] { return true; };
    CHECK(binary_search_value(inf, 8).outcome.status == Status::Infeasible);
    DecisionOracle unb = planted(0);
    unb.unbounded = [] { return true; };
    CHECK(binary_search_value(unb, 8).outcome.status == Status::Unbounded);
    // answers "yes" only strictly above the value: the confirming query fails
    DecisionOracle strict;
    strict.le = [](const Rat& t) { return Rat(1, 3) < t; };
    CHECK_THROWS_AS(binary_search_value(strict, 8), InconsistentOracle);
}

TEST_CASE("solver oracle decisions on gadgets") {
    auto sat = sat_to_blp(parse_cnf("p cnf 1 1\n1 0\n"));
    CHECK(oracle_from_solver(sat.instance).le(0));
    auto unsat = sat_to_blp(parse_cnf("p cnf 1 2\n1 0\n-1 0\n"));
    CHECK_FALSE(oracle_from_solver(unsat.instance).le(Rat(1, 2)));
    auto lex = lexsat_to_blp(parse_cnf("p cnf 2 1\n1 2 0\n"), false);
    DecisionOracle o = oracle_from_solver(lex.instance);
    CHECK(o.le(Rat(-3, 4)));
    CHECK_FALSE(o.le(Rat(-7, 8)));
    DecisionOracle g = oracle_from_gadget(lex);
    CHECK(g.le(Rat(-3, 4)));
    CHECK_FALSE(g.le(Rat(-7, 8)));
    CHECK(binary_search_value(o, 12).outcome.value == Rat(-3, 4));
}

TEST_CASE("solver oracles are monotone on a threshold ladder") {
    Rng rng(47);
    for (int t = 0; t < 10; ++t) {
        Formula f = random_cnf(rng, 1 + t % 4, 5);
        DecisionOracle o = oracle_from_solver(lexsat_to_blp(f, false).instance);
        bool prev = false;
        for (int i = -8; i <= 8; ++i) {
            bool a = o.le(Rat(i, 8));
            CHECK((!prev || a));
            prev = a;
        }
    }
}

TEST_CASE("predicted values follow the gadget contracts") {
    Qbf h = parse_qdimacs("p cnf 3 3\ne 1 2 0\na 3 0\n1 0\n2 0\n3 -3 0\n");
    GadgetValue v = predicted_value(attain_gadget_k3(h));
    CHECK(v.value == Rat(-3, 4));
    CHECK_FALSE(v.attained);
    CHECK(predicted_value(example_nonattain(Example::k3)).value == Rat(-1));
    GadgetInstance unknown;
    unknown.gadget = "nope";
    CHECK_THROWS(predicted_value(unknown));
}
