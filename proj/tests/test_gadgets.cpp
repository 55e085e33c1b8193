#include <doctest.h>

#include "mlp/certificates.hpp"
#include "mlp/gadgets.hpp"
#include "mlp/solver.hpp"
#include "mlp/sweeps.hpp"

using namespace mlp;

namespace {

Formula cnf(const char* text) { return parse_cnf(text); }
Qbf qbf(const char* text) { return parse_qdimacs(text); }

}  // namespace

TEST_CASE("SAT gadget") {
    GadgetInstance v1 = sat_to_blp(cnf("p cnf 1 1\n1 0\n"));
    ConditionReport cr = check_conditions(v1.instance);
    CHECK(cr.c1);
    CHECK(cr.c2);
    CHECK(bilevel_solve(v1.instance).value == Rat(0));
    CHECK(bilevel_solve(sat_to_blp(cnf("p cnf 1 2\n1 0\n-1 0\n")).instance).value == Rat(1));
    SatOptions so;
    so.signed_value = true;
    CHECK(bilevel_solve(sat_to_blp(cnf("p cnf 1 1\n1 0\n"), so).instance).value == Rat(-1));

    // s = 1/2: the follower sets v = 1/2, costing c_pen / 2 in the leader objective
    Bilevel bl = Bilevel::from(v1.instance);
    Vec x = zeros(bl.n1);
    x(v1.varmap.at("s[0]")) = Rat(1, 2);
    x(v1.varmap.at("F[0]")) = Rat(1, 2);
    x(v1.varmap.at("NF[0]")) = Rat(1, 2);
    LpResult r = follower_solve(bl, x);
    REQUIRE(r.status == LpStatus::Optimal);
    int v = v1.varmap.role("v").at(0);
    CHECK(r.x(v - bl.n1) == Rat(1, 2));
    CHECK(v1.instance.objective(1)(v) * r.x(v - bl.n1) == Rat(3, 2));
}

TEST_CASE("LEXSAT gadget") {
    Formula f = cnf("p cnf 2 1\n1 2 0\n");
    GadgetInstance g = lexsat_to_blp(f, false);
    SolveOutcome o = bilevel_solve(g.instance);
    CHECK(o.value == Rat(-3, 4));
    Vec z = o.witness.flat();
    CHECK(z(g.varmap.role("s")[0]) == Rat(1));
    CHECK(z(g.varmap.role("s")[1]) == Rat(1));
    ConditionReport plain = check_conditions(g.instance);
    CHECK(plain.c1);
    CHECK(plain.c2);
    CHECK_FALSE(plain.c3);
    ConditionReport cc = check_conditions(lexsat_to_blp(f, true).instance);
    CHECK(cc.c1);
    CHECK(cc.c2);
    CHECK(cc.c3);
    CHECK(bilevel_solve(lexsat_to_blp(cnf("p cnf 2 3\n1 0\n-1 0\n2 0\n"), false).instance).value == Rat(1, 4));

    // binary s: the follower sets g = s
    Bilevel bl = Bilevel::from(g.instance);
    for (int a = 0; a <= 1; ++a) {
        Vec x = o.witness.flat().head(bl.n1);
        x(g.varmap.role("s")[1]) = a;
        auto fr = follower_solve(bl, x);
        if (fr.status != LpStatus::Optimal) continue;
        CHECK(fr.x(g.varmap.role("g")[1] - bl.n1) == Rat(a));
    }
}

TEST_CASE("QBF gadget") {
    Qbf t = qbf("p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n");
    Qbf f = qbf("p cnf 2 2\ne 1 0\na 2 0\n1 0\n2 0\n");
    CHECK(klevel_verify(qbf_to_klp(t).instance).value == Rat(0));
    CHECK(klevel_verify(qbf_to_klp(f).instance).value == Rat(1));
    QlpOptions s;
    s.search = true;
    CHECK(klevel_verify(qbf_to_klp(t, s).instance).value == Rat(-1, 2));
    CHECK(klevel_verify(qbf_to_klp(f, s).instance).value == Rat(1, 2));

    // binary s1 = (1): every optimum of levels 2-3 has the F gate at 1
    GadgetInstance g = qbf_to_klp(t);
    Vec up(1);
    up(0) = 1;
    int F = g.varmap.role("F").at(0);
    auto range = range_on_bottom_optima(g.instance, up, F);
    REQUIRE(range);
    CHECK(range->first == Rat(1));
    CHECK(range->second == Rat(1));
    // fractional s1: q1 = 1 on every optimum
    up(0) = Rat(1, 2);
    auto q = range_on_bottom_optima(g.instance, up, g.varmap.role("q1").at(0));
    REQUIRE(q);
    CHECK(q->first == Rat(1));
}

TEST_CASE("attainment gadget cases") {
    struct C {
        const char* text;
        Rat value;
        Attainment att;
    };
    C cases[] = {
        {"p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n-1 -2 0\n", Rat(1, 2), Attainment::Attained},
        {"p cnf 3 3\ne 1 2 0\na 3 0\n1 0\n-2 0\n3 -3 0\n", Rat(-1, 2), Attainment::Attained},
        {"p cnf 3 3\ne 1 2 0\na 3 0\n1 0\n2 0\n3 -3 0\n", Rat(-3, 4), Attainment::NotAttained},
    };
    for (const auto& c : cases) {
        GadgetInstance g = attain_gadget_k3(qbf(c.text));
        CertOptions co;
        co.param = g.varmap.at("x1");
        SolveOutcome o = attainment_certificate(g.instance, co).outcome;
        CHECK(o.value == c.value);
        CHECK(o.attainment == c.att);
    }
}

TEST_CASE("SAT-UNSAT gadget") {
    Formula sat = cnf("p cnf 1 1\n1 0\n"), unsat = cnf("p cnf 1 2\n1 0\n-1 0\n");
    CHECK(bilevel_solve(sat_unsat_attain(sat, unsat).instance).status == Status::Attained);
    CHECK(bilevel_solve(sat_unsat_attain(unsat, sat).instance).status == Status::Infeasible);
    CHECK(bilevel_solve(sat_unsat_attain(sat, sat).instance).status == Status::Unbounded);
}

TEST_CASE("scaling feasibility gadget") {
    GadgetInstance g = pi_feasibility_gadget(qbf("p cnf 2 2\ne 1 0\na 2 0\n1 0\n2 0\n"));
    for (int lam = 1; lam <= 3; ++lam) {
        KlevelOptions ko;
        ko.enum_scale = lam;
        Vec up = zeros(g.instance.offset(g.instance.k() - 1));
        auto lv = klevel_lex(g.instance, 2, up, ko);
        REQUIRE(lv);
        CHECK(*lv->v[0] == Rat(0));
    }
    CHECK_THROWS(pi_feasibility_gadget(qbf("p cnf 1 1\n1 0\n")));
}

TEST_CASE("k = 5 feasibility gadget pieces") {
    Qbf h = qbf("p cnf 4 2\ne 1 0\na 2 0\ne 3 0\na 4 0\n1 2 0\n3 4 0\n");
    REQUIRE(qbf_truth(h));
    auto part = [&](Feas5Part p, const Rat& s1) {
        GadgetInstance g = feas_gadget_k5(h, p);
        Vec l1(1);
        l1(0) = s1;
        Varmap vm;
        auto r = restrict_top(g.instance, l1, &g.varmap, &vm);
        CertOptions co;
        bool two = p == Feas5Part::two;
        co.param = vm.role(two ? "x1'" : "x1").at(0);
        co.sunk = {vm.role(two ? "y'" : "y").at(0)};
        return attainment_certificate(r->instance, co).outcome;
    };
    auto m = qbf_lexmax(h);
    CHECK(part(Feas5Part::one, Rat((*m)[0])).attainment == Attainment::Attained);
    CHECK(part(Feas5Part::two, Rat((*m)[0])).attainment == Attainment::Attained);
    CHECK(part(Feas5Part::one, Rat(1, 2)).attainment == Attainment::NotAttained);
    CHECK_THROWS(feas_gadget_k5(qbf("p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n")));
}

TEST_CASE("varmaps cover every variable once") {
    Rng rng(41);
    for (int t = 0; t < 10; ++t) {
        Qbf h = random_qbf(rng, {1, 2}, 3);
        for (const GadgetInstance& g : {qbf_to_klp(h), attain_gadget_k3(h), sat_to_blp(h.matrix), lexsat_to_blp(h.matrix, true)}) {
            REQUIRE(static_cast<int>(g.varmap.vars.size()) == g.instance.n_total());
            for (int j = 0; j < g.instance.n_total(); ++j) CHECK(g.varmap.vars[j].global == j);
        }
    }
}
