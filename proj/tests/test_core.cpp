#include <doctest.h>

#include "mlp/core.hpp"

using namespace mlp;

namespace {

MlpInstance one_row(int k, Rat coef, Rat rhs) {
    Builder b(k);
    int x = b.var(1, "x");
    for (int l = 2; l <= k; ++l) b.var(l, "y");
    b.ge(k, {{x, coef}}, rhs);
    return b.build().first;
}

}  // namespace

TEST_CASE("residuals") {
    MlpInstance a = one_row(1, 1, 0);
    Point p = Point::zero(a);
    CHECK(residuals_at(a, p, 1)(0) == Rat(0));
    MlpInstance b = one_row(1, 1, 1);
    p.x[0](0) = 3;
    CHECK(residuals_at(b, p, 1)(0) == Rat(2));
    MlpInstance c = one_row(1, -1, 0);
    p.x[0](0) = 1;
    CHECK(residuals_at(c, p, 1)(0) == Rat(-1));
    CHECK_FALSE(satisfies_rows(c, p));
}

TEST_CASE("objective values") {
    Builder b(2);
    int x1 = b.var(1, "x"), x2 = b.var(2, "y");
    MlpInstance zero = b.build().first;
    CHECK(objective_at(zero, Point::zero(zero), 1) == Rat(0));
    b.obj(1, x1, 1);
    b.obj(1, x2, -2);
    MlpInstance inst = b.build().first;
    Point p = Point::zero(inst);
    p.x[0](0) = 1;
    p.x[1](0) = 1;
    CHECK(objective_at(inst, p, 1) == Rat(-1));

    Builder one(1);
    int x = one.var(1, "x");
    one.obj(1, x, 1);
    MlpInstance k1 = one.build().first;
    Point q = Point::zero(k1);
    q.x[0](0) = 5;
    CHECK(objective_at(k1, q, 1) == Rat(5));
}

TEST_CASE("conditions") {
    Builder b(2);
    int x = b.var(1, "x"), y = b.var(2, "y");
    b.box(2, x);
    b.box(2, y);
    CHECK(check_conditions(b.build().first).c1);
    CHECK(check_conditions(b.build().first).c2);

    Builder no_box(2);
    int x1 = no_box.var(1, "x");
    int y1 = no_box.var(2, "y");
    no_box.box(2, y1);
    no_box.ge(2, {{x1, 1}}, 0);
    CHECK_FALSE(check_conditions(no_box.build().first).c2);

    Builder big(2);
    int u = big.var(1, "x"), w = big.var(2, "y");
    big.box(2, u);
    big.box(2, w);
    big.ge(2, {{u, 3}}, 0);  // n + 1 with n = 2
    ConditionReport r = check_conditions(big.build().first);
    CHECK_FALSE(r.c3);
    CHECK(r.summary() == "C1=yes C2=yes C3=no");

    Builder lead(2);
    int z = lead.var(1, "x");
    lead.var(2, "y");
    lead.ge(1, {{z, 1}}, 0);
    CHECK_FALSE(check_conditions(lead.build().first).c1);
}

TEST_CASE("MLP1 round trip and errors") {
    Builder b(3);
    int x = b.var(1, "x"), y = b.var(2, "y"), z = b.var(3, "z");
    b.ge(1, {{x, 1}}, Rat(-1, 2));
    b.ge(3, {{x, 2}, {y, -1}, {z, Rat(1, 3)}}, 1);
    b.box(3, z);
    b.obj(1, y, -1);
    b.obj(2, z, 5);
    b.obj(3, z, Rat(-7, 4));
    MlpInstance inst = b.build().first;
    std::string text = format_mlp1(inst);
    MlpInstance back = parse_mlp1(text);
    CHECK(format_mlp1(back) == text);
    CHECK(back.n_total() == 3);
    CHECK(back.objective(3)(2) == Rat(-7, 4));

    CHECK_THROWS_AS(parse_mlp1("mlp k=1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_mlp1("mlp k=1\ndims n=1 m=1\nA 1 1 : 1 2\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_mlp1("mlp k=2\ndims n=1,1 m=0,0\nc 2 1 : 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_mlp1("mlp k=1\ndims n=1 m=0\nc 1 1 : 2/4\n"), std::invalid_argument);

    Point p = Point::zero(inst);
    p.x[2](0) = Rat(1, 2);
    CHECK(parse_point(inst, format_point(p)).flat() == p.flat());
}

TEST_CASE("builder layout and varmap") {
    Builder b(2);
    int y = b.var(2, "y");
    int x = b.var(1, "x");
    auto [inst, vm] = b.build();
    auto lay = b.layout();
    CHECK(lay[x] == 0);
    CHECK(lay[y] == 1);
    CHECK(vm.at("x[0]") == 0);
    CHECK(vm.role("y") == std::vector<int>{1});
    CHECK(inst.level_of(1) == 2);
    CHECK(vm.to_json("g", "src").find("\"roles\"") != std::string::npos);
}
