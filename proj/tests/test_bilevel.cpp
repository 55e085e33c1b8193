#include <doctest.h>

#include "mlp/certificates.hpp"
#include "mlp/gadgets.hpp"
#include "mlp/solver.hpp"
#include "mlp/sweeps.hpp"

using namespace mlp;

namespace {

bool has_pattern(const std::vector<CompPattern>& ps, std::vector<char> w) {
    for (const auto& p : ps)
        if (p.omega == w) return true;
    return false;
}

}  // namespace

TEST_CASE("complementarity patterns") {
    // follower min x2 s.t. x2 >= b
    Bilevel a;
    a.n1 = 1;
    a.n2 = 1;
    a.lower.push_back({{{1, Rat(1)}}, Rat(0), false});
    a.f_upper = {Rat(0), Rat(0)};
    a.f_lower = {Rat(0), Rat(1)};
    auto pa = enumerate_patterns(a);
    CHECK(has_pattern(pa, {1}));
    CHECK_FALSE(has_pattern(pa, {0}));

    Bilevel z = a;
    z.f_lower = {Rat(0), Rat(0)};
    CHECK(has_pattern(enumerate_patterns(z), {0}));

    Bilevel two = a;
    two.lower.push_back({{{1, Rat(-1)}}, Rat(-1), false});
    auto p2 = enumerate_patterns(two);
    CHECK(has_pattern(p2, {1, 0}));
    CHECK(has_pattern(p2, {1, 1}));
    CHECK_FALSE(has_pattern(p2, {0, 1}));
    CHECK_FALSE(has_pattern(p2, {0, 0}));
}

TEST_CASE("bilevel solve examples") {
    // leader min -x2, follower min x2 s.t. 0 <= x2 <= x1, 0 <= x1 <= 1
    Builder b(2);
    int x1 = b.var(1, "x"), x2 = b.var(2, "y");
    b.box(2, x1);
    b.ge(2, {{x2, 1}}, 0);
    b.ge(2, {{x1, 1}, {x2, -1}}, 0);
    b.obj(1, x2, -1);
    b.obj(2, x2, 1);
    MlpInstance inst = b.build().first;
    SolveOutcome o = bilevel_solve(inst);
    CHECK(o.status == Status::Attained);
    CHECK(o.value == Rat(0));
    // grid brute force: the follower always answers x2 = 0
    Bilevel bl = Bilevel::from(inst);
    for (int i = 0; i <= 8; ++i) {
        Vec x(1);
        x(0) = Rat(i, 8);
        LpResult r = follower_solve(bl, x);
        CHECK(r.value == Rat(0));
    }

    GadgetInstance g = sat_to_blp(parse_cnf("p cnf 1 1\n1 0\n"));
    SolveOutcome s = bilevel_solve(g.instance);
    CHECK(s.status == Status::Attained);
    CHECK(s.value == Rat(0));
    CHECK(s.witness.flat()(g.varmap.at("s[0]")) == Rat(1));

    Builder e(2);
    int u = e.var(1, "x");
    e.var(2, "y");
    e.ge(2, {{u, 1}}, 1);
    e.ge(2, {{u, -1}}, 0);
    CHECK(bilevel_solve(e.build().first).status == Status::Infeasible);
}

TEST_CASE("branch and bound agrees with the full piece enumeration") {
    Rng rng(17);
    for (int t = 0; t < 150; ++t) {
        RandomShape s;
        s.max_rows = 3;
        s.box_follower = t % 3 != 0;
        MlpInstance inst = random_instance(rng, s);
        Bilevel bl = Bilevel::from(inst);
        SolveOutcome a = bilevel_solve(bl), b = bilevel_solve_enum(bl);
        CHECK(a.status == b.status);
        if (a.finite() && b.finite()) CHECK(a.value == b.value);
        if (a.status == Status::Attained) CHECK(bilevel_feasible(bl, a.witness.flat()));
    }
}

TEST_CASE("k-level verification on QBF gadgets") {
    Qbf t = parse_qdimacs("p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n");
    SolveOutcome a = klevel_verify(qbf_to_klp(t).instance);
    CHECK(a.finite());
    CHECK(a.value == Rat(0));
    Qbf f = parse_qdimacs("p cnf 2 2\ne 1 0\na 2 0\n1 0\n2 0\n");
    SolveOutcome b = klevel_verify(qbf_to_klp(f).instance);
    CHECK(b.value == Rat(1));
    // cross-check: fix s1 binary and solve levels 2-3 directly
    GadgetInstance g = qbf_to_klp(t);
    std::optional<Rat> best;
    for (int s = 0; s <= 1; ++s) {
        Vec up = zeros(g.instance.offset(2));
        up(g.varmap.role("s1").at(0)) = s;
        auto lv = klevel_evaluate(g.instance, up);
        if (lv && lv->v.back() && (!best || *lv->v.back() < *best)) best = lv->v.back();
    }
    CHECK(best == Rat(0));
}

TEST_CASE("non-attainment examples") {
    GadgetInstance k3 = example_nonattain(Example::k3);
    CertOptions co;
    co.param = k3.varmap.at("x1");
    CertReport r = attainment_certificate(k3.instance, co);
    CHECK(r.outcome.status == Status::FiniteValue);
    CHECK(r.outcome.value == Rat(-1));
    CHECK(r.outcome.attainment == Attainment::NotAttained);

    // k3 at x1 = 1: level 2 picks x2 = 1 with x3 = 0, leader value 0
    Vec up(1);
    up(0) = 1;
    auto lv = klevel_evaluate(k3.instance, up);
    REQUIRE(lv);
    CHECK(*lv->v.back() == Rat(0));
    CHECK(lv->z(k3.varmap.at("x2")) == Rat(1));
    CHECK(lv->z(k3.varmap.at("x3")) == Rat(0));

    GadgetInstance k4 = example_nonattain(Example::k4);
    Vec u4 = zeros(k4.instance.offset(3));
    u4(0) = 1;
    auto at1 = klevel_lex(k4.instance, 2, u4);
    REQUIRE(at1);
    CHECK(*at1->v.back() == Rat(0));
    CHECK(at1->z(k4.varmap.at("x3")) == Rat(1));
    for (int j = 1; j <= 6; ++j) {
        Vec u = zeros(k4.instance.offset(3));
        u(0) = Rat(1) - pow2(-j);
        auto near = klevel_lex(k4.instance, 2, u);
        REQUIRE(near);
        CHECK(*near->v.back() == -(Rat(1) - pow2(-j)));
    }
    std::string why;
    CHECK(no_point_at_most(k4.instance, Rat(-1), {}, CertOptions{k4.varmap.at("x1")}, &why));
}

TEST_CASE("sensitivity delta") {
    Mat id(2, 2);
    id << Rat(1), Rat(0), Rat(0), Rat(1);
    CHECK(sensitivity_delta(id).delta == Rat(1));
    Mat two(1, 1);
    two << Rat(2);
    CHECK(sensitivity_delta(two).delta == Rat(1, 2));
    Mat up(2, 2);
    up << Rat(1), Rat(1), Rat(0), Rat(1);
    CHECK(sensitivity_delta(up).delta == Rat(1));
    Mat zero(2, 2);
    zero << Rat(0), Rat(0), Rat(0), Rat(0);
    CHECK(sensitivity_delta(zero).all_singular);
    CHECK_THROWS_AS(sensitivity_delta(Mat::Constant(30, 30, Rat(1))), CapExceeded);
}

TEST_CASE("restricting the top level") {
    GadgetInstance g = feas_gadget_k5(parse_qdimacs("p cnf 4 1\ne 1 0\na 2 0\ne 3 0\na 4 0\n1 2 0\n"), Feas5Part::one);
    Vec s(1);
    s(0) = 1;
    Varmap vm;
    auto r = restrict_top(g.instance, s, &g.varmap, &vm);
    REQUIRE(r);
    CHECK(r->instance.k() == 4);
    CHECK(r->instance.n_total() == g.instance.n_total() - 1);
    CHECK(vm.has("x1[0]"));
}
