#include <doctest.h>

#include <random>

#include "mlp/linalg.hpp"
#include "mlp/lp.hpp"

using namespace mlp;

TEST_CASE("LP basics") {
    LpProblem a(1);
    a.ge({{0, 1}}, 0);
    a.obj = {1};
    LpResult ra = lp_solve(a);
    CHECK(ra.status == LpStatus::Optimal);
    CHECK(ra.value == Rat(0));
    CHECK(ra.x(0) == Rat(0));

    LpProblem b(1);
    b.ge({{0, 1}}, 0);
    b.obj = {-1};
    LpResult rb = lp_solve(b);
    CHECK(rb.status == LpStatus::Unbounded);
    CHECK(rb.ray(0).sign() > 0);

    LpProblem c(1);
    c.ge({{0, 1}}, 1);
    c.ge({{0, -1}}, 0);
    CHECK(lp_solve(c).status == LpStatus::Infeasible);
}

TEST_CASE("LP matches vertex enumeration on random boxed 2-variable problems") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> co(-4, 4);
    for (int t = 0; t < 300; ++t) {
        std::vector<std::pair<std::array<Rat, 2>, Rat>> rows = {
            {{Rat(1), Rat(0)}, Rat(-5)}, {{Rat(-1), Rat(0)}, Rat(-5)}, {{Rat(0), Rat(1)}, Rat(-5)}, {{Rat(0), Rat(-1)}, Rat(-5)}};
        int m = 1 + t % 4;
        for (int r = 0; r < m; ++r) rows.push_back({{Rat(co(rng)), Rat(co(rng))}, Rat(co(rng))});
        std::vector<Rat> obj = {Rat(co(rng)), Rat(co(rng))};
        LpProblem p(2);
        for (const auto& [a, b] : rows) p.ge({{0, a[0]}, {1, a[1]}}, b);
        p.obj = obj;
        LpResult res = lp_solve(p);

        std::optional<Rat> best;
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = i + 1; j < rows.size(); ++j) {
                const auto& [a, b] = rows[i];
                const auto& [c, d] = rows[j];
                Rat det = a[0] * c[1] - a[1] * c[0];
                if (det.is_zero()) continue;
                Rat x = (b * c[1] - a[1] * d) / det, y = (a[0] * d - b * c[0]) / det;
                bool ok = true;
                for (const auto& [e, f] : rows) ok = ok && !(e[0] * x + e[1] * y < f);
                if (!ok) continue;
                Rat v = obj[0] * x + obj[1] * y;
                if (!best || v < *best) best = v;
            }
        if (best) {
            REQUIRE(res.status == LpStatus::Optimal);
            CHECK(res.value == *best);
        } else {
            CHECK(res.status == LpStatus::Infeasible);
        }
    }
}

TEST_CASE("equality rows and bounds") {
    LpProblem p(2);
    p.eq({{0, 1}, {1, 1}}, 1);
    p.lo[0] = Rat(0);
    p.lo[1] = Rat(0);
    p.obj = {Rat(2), Rat(1)};
    LpResult r = lp_solve(p);
    CHECK(r.status == LpStatus::Optimal);
    CHECK(r.value == Rat(1));
    CHECK(r.x(1) == Rat(1));
}

TEST_CASE("exact inverse") {
    Mat a(2, 2);
    a << Rat(1), Rat(1), Rat(0), Rat(1);
    auto inv = inverse(a);
    REQUIRE(inv);
    CHECK((*inv)(0, 1) == Rat(-1));
    Mat s(2, 2);
    s << Rat(1), Rat(2), Rat(2), Rat(4);
    CHECK_FALSE(inverse(s).has_value());
}
