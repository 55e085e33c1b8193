#pragma once

#include <optional>
#include <vector>

#include "mlp/core.hpp"

namespace mlp {

struct LpRow {
    Terms terms;      // sparse coefficients
    Rat rhs;
    bool eq = false;  // terms == rhs instead of terms >= rhs
};

// min obj'x subject to rows and optional variable bounds. Variables are free
// unless bounded; single-variable rows are turned into bounds internally.
struct LpProblem {
    int n = 0;
    std::vector<LpRow> rows;
    std::vector<Rat> obj;
    std::vector<std::optional<Rat>> lo, hi;

    explicit LpProblem(int n_ = 0) : n(n_), obj(n_, Rat(0)), lo(n_), hi(n_) {}
    void ge(Terms t, Rat rhs) { rows.push_back({std::move(t), std::move(rhs), false}); }
    void eq(Terms t, Rat rhs) { rows.push_back({std::move(t), std::move(rhs), true}); }
};

enum class LpStatus { Infeasible, Unbounded, Optimal };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rat value;
    Vec x;    // optimal vertex, or the last feasible vertex when unbounded
    Vec ray;  // improving direction when unbounded
    long pivots = 0;
};

// Exact bounded-variable primal simplex with Bland's rule.
LpResult lp_solve(const LpProblem& p);

// Terms helper: dense vector to sparse terms with an index offset.
Terms sparse(const Vec& v, int offset = 0);

}  // namespace mlp
