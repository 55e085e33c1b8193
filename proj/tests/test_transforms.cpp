#include <doctest.h>

#include "mlp/gadgets.hpp"
#include "mlp/solver.hpp"
#include "mlp/sweeps.hpp"
#include "mlp/transforms.hpp"

using namespace mlp;

namespace {

bool same(const SolveOutcome& a, const SolveOutcome& b) {
    if (a.status != b.status) return false;
    return !a.finite() || a.value == b.value;
}

}  // namespace

TEST_CASE("forward_constraints") {
    Builder b(2);
    int x = b.var(1, "x"), y = b.var(2, "y");
    b.box(2, y);
    b.box(2, x);
    MlpInstance plain = b.build().first;
    CHECK(format_mlp1(forward_constraints(plain)) == format_mlp1(plain));

    b.ge(1, {{x, 1}}, 0);
    MlpInstance lead = b.build().first;
    MlpInstance fw = forward_constraints(lead);
    CHECK(fw.m(1) == 0);
    CHECK(fw.m(2) == lead.m(2) + 1);

    Rng rng(23);
    for (int t = 0; t < 40; ++t) {
        RandomShape s;
        s.k = 3;
        s.upper_rows = 2;
        MlpInstance inst = random_instance(rng, s);
        CHECK(same(klevel_verify(inst), klevel_verify(forward_constraints(inst))));
    }
}

TEST_CASE("scale_rhs") {
    Builder b(2);
    int x = b.var(1, "x"), y = b.var(2, "y");
    b.ge(2, {{x, 1}}, 1);
    b.ge(2, {{y, 1}}, -1);
    MlpInstance inst = b.build().first;
    CHECK(format_mlp1(scale_rhs(inst, 1)) == format_mlp1(inst));
    MlpInstance two = scale_rhs(inst, 2);
    CHECK(two.b(2)(0) == Rat(2));
    CHECK(two.b(2)(1) == Rat(-2));
    CHECK_THROWS(scale_rhs(inst, 0));

    Rng rng(29);
    for (int t = 0; t < 100; ++t) {
        MlpInstance r = random_instance(rng, RandomShape{});
        Rat lam = t % 2 ? Rat(3) : Rat(1, 2);
        SolveOutcome a = bilevel_solve(r);
        if (!a.finite()) continue;
        Vec z = a.witness.flat();
        CHECK(bilevel_feasible(Bilevel::from(scale_rhs(r, lam)), z * lam));
    }
}

TEST_CASE("compact_powers") {
    Builder b(2);
    int g = b.var(1, "g"), y = b.var(2, "y");
    b.box(2, g);
    b.box(2, y);
    b.obj(1, g, Rat(-1, 2));
    auto [inst, vm] = b.build();
    CompactResult one = compact_powers(inst, {{0, 1}}, &vm);
    REQUIRE(one.chain_ends.size() == 1);
    int h = one.chain_ends[0];
    CHECK(one.instance.objective(1)(h) == Rat(-1));
    CHECK(one.instance.objective(1)(0) == Rat(0));

    // g fixed to 1 with a chain of length 3 forces h = 1/8
    Builder c(2);
    int g3 = c.var(1, "g");
    int y3 = c.var(2, "y");
    c.box(2, g3);
    c.box(2, y3);
    c.ge(2, {{g3, 1}}, 1);
    c.obj(1, g3, Rat(-1, 8));
    MlpInstance fixed = c.build().first;
    CompactResult three = compact_powers(fixed, {{0, 3}});
    SolveOutcome o = bilevel_solve(three.instance);
    REQUIRE(o.status == Status::Attained);
    CHECK(o.witness.flat()(three.chain_ends[0]) == Rat(1, 8));
    CHECK(o.value == bilevel_solve(fixed).value);
    CHECK(check_conditions(three.instance).c3);

    Rng rng(31);
    for (int t = 0; t < 15; ++t) {
        Formula f = random_cnf(rng, 1 + t % 5, 6);
        CHECK(bilevel_solve(lexsat_to_blp(f, true).instance).value == bilevel_solve(lexsat_to_blp(f, false).instance).value);
    }
}

TEST_CASE("t_companion") {
    Builder b(2);
    int x = b.var(1, "x"), y = b.var(2, "y");
    b.box(2, y);
    b.ge(2, {{x, 1}, {y, 1}}, 0);
    b.obj(2, y, 1);
    MlpInstance inst = b.build().first;
    MlpInstance t2 = t_companion(inst, Companion::T2);
    long B = BoundFn::for_instance(BoundFn::Kind::psi2, inst).evaluate(encoding_size(inst));
    CHECK(t2.k() == 1);
    CHECK(t2.objective(1)(1) == Rat(1));
    bool lo = false, hi = false;
    for (int r = 0; r < t2.m(1); ++r) {
        Vec row = t2.row(1, r);
        if (row(0) == Rat(1) && row(1).is_zero() && t2.b(1)(r) == -pow2(B)) lo = true;
        if (row(0) == Rat(-1) && row(1).is_zero() && t2.b(1)(r) == -pow2(B)) hi = true;
    }
    CHECK(lo);
    CHECK(hi);

    Builder e(2);
    int u = e.var(1, "x"), w = e.var(2, "y");
    e.box(2, w);
    e.ge(2, {{u, 1}}, 1);
    e.ge(2, {{u, -1}}, 0);
    MlpInstance inf = e.build().first;
    MlpInstance ti = t_companion(inf, Companion::T2);
    LpProblem p(ti.n_total());
    for (int r = 0; r < ti.m(1); ++r) p.ge(sparse(ti.row(1, r)), ti.b(1)(r));
    CHECK(lp_solve(p).status == LpStatus::Infeasible);
}

TEST_CASE("binarize_lift") {
    Builder b(2);
    int x = b.var(1, "x"), y = b.var(2, "y");
    b.box(2, x);
    b.box(2, y);
    b.obj(1, x, 1);
    MlpInstance inst = b.build().first;
    MlpInstance lift = binarize_lift(inst, {0});
    CHECK(lift.k() == 3);
    Vec half(1);
    half(0) = Rat(1, 2);
    CHECK_FALSE(klevel_evaluate(lift, half).has_value());
    Vec one(1);
    one(0) = 1;
    auto lv = klevel_evaluate(lift, one);
    REQUIRE(lv);
    CHECK(lv->z(lift.n_total() - 1) == Rat(0));

    Builder nb(2);
    int v = nb.var(1, "x");
    nb.var(2, "y");
    nb.ge(2, {{v, 1}}, 0);
    CHECK_THROWS(binarize_lift(nb.build().first, {0}));
}
