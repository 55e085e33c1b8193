#include <doctest.h>

#include <random>

#include "mlp/formulas.hpp"
#include "mlp/sweeps.hpp"

using namespace mlp;

namespace {

// Independent brute force over all assignments, last variable fastest.
std::optional<Assignment> brute_lexmax(const Formula& f) {
    for (long m = (1L << f.n) - 1; m >= 0; --m) {
        Assignment s(f.n);
        for (int i = 0; i < f.n; ++i) s[i] = (m >> (f.n - 1 - i)) & 1;
        if (eval(f, s)) return s;
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("DIMACS CNF") {
    Formula a = parse_cnf("p cnf 1 1\n1 0\n");
    CHECK(to_sexpr(a) == "v1");
    Formula b = parse_cnf("p cnf 2 2\n1 2 0\n-1 0\n");
    CHECK(to_sexpr(b) == "(and (or v1 v2) (not v1))");
    CHECK_THROWS_AS(parse_cnf("p cnf 1 1\n2 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_cnf("1 0\n"), std::invalid_argument);
}

TEST_CASE("QDIMACS") {
    Qbf h = parse_qdimacs("p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n");
    CHECK(h.blocks.size() == 2);
    CHECK(h.blocks[1] == std::vector<int>{2});
    CHECK_THROWS_AS(parse_qdimacs("p cnf 2 1\na 1 0\ne 2 0\n1 2 0\n"), std::invalid_argument);
    Qbf plain = parse_qdimacs("p cnf 2 1\n1 2 0\n");
    CHECK(plain.blocks.size() == 1);
    CHECK(plain.blocks[0].size() == 2);
}

TEST_CASE("evaluation and lexmax") {
    Formula nv = parse_cnf("p cnf 1 1\n-1 0\n");
    CHECK_FALSE(eval(nv, {1}));
    Formula o = parse_cnf("p cnf 2 1\n1 2 0\n");
    CHECK(eval(o, {0, 1}));
    Formula c = cnf_formula(1, {{1}, {-1}});
    CHECK_FALSE(eval(c, {0}));
    CHECK_FALSE(eval(c, {1}));
    CHECK(*lexmax_sat(o) == Assignment{1, 1});
    CHECK_FALSE(lexmax_sat(c).has_value());
    CHECK(*lexmax_sat(nv) == Assignment{0});
}

TEST_CASE("QBF truth and lexmax") {
    Qbf a = parse_qdimacs("p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n");
    CHECK(qbf_truth(a));
    CHECK(*qbf_lexmax(a) == Assignment{1});
    Qbf b = parse_qdimacs("p cnf 2 2\ne 1 0\na 2 0\n1 0\n2 0\n");
    CHECK_FALSE(qbf_truth(b));
    CHECK_FALSE(qbf_lexmax(b).has_value());
    Qbf t;
    t.blocks = {{1}};
    t.matrix = cnf_formula(1, {{1, -1}});
    CHECK(qbf_truth(t));
    CHECK(*qbf_lexmax(t) == Assignment{1});
}

TEST_CASE("lexmax matches brute force on random CNFs and the AST family") {
    Rng rng(11);
    for (int t = 0; t < 300; ++t) {
        Formula f = random_cnf(rng, 1 + t % 7, 10);
        CHECK(lexmax_sat(f) == brute_lexmax(f));
    }
    auto fam = ast_family(3);
    CHECK(fam.size() > 100);
    for (const auto& f : fam) CHECK(lexmax_sat(f) == brute_lexmax(f));
}

TEST_CASE("QBF truth with blocks fixed agrees with substitution") {
    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        Qbf h = random_qbf(rng, {1, 1, 1}, 4);
        bool any = false;
        for (int s = 0; s <= 1; ++s) any = any || qbf_truth_fixed(h, {{s}});
        CHECK(any == qbf_truth(h));
    }
}

TEST_CASE("truth-table CNF") {
    for (uint32_t tt = 0; tt < 16; ++tt) {
        Formula f = truth_table_cnf(2, tt);
        for (uint32_t r = 0; r < 4; ++r) CHECK(eval(f, {int(r >> 1), int(r & 1)}) == bool((tt >> r) & 1));
    }
}
