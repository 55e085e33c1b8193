#include <algorithm>
#include <numeric>

#include "mlp/linalg.hpp"
#include "mlp/solver.hpp"

namespace mlp {

namespace {

// Calls f on every s-subset of {0..n-1}.
template <typename F>
void subsets(int n, int s, F&& f) {
    std::vector<int> idx(s);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        f(idx);
        int t = s - 1;
        while (t >= 0 && idx[t] == n - s + t) --t;
        if (t < 0) return;
        ++idx[t];
        for (int u = t + 1; u < s; ++u) idx[u] = idx[u - 1] + 1;
    }
}

}  // namespace

DeltaResult sensitivity_delta(const Mat& a, long cap_subsets) {
    int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols());
    // sum over s of C(m, s) C(n, s), stopping once over the cap
    long count = 0;
    double cm = 1, cn = 1;
    for (int s = 1; s <= std::min(m, n) && count <= cap_subsets; ++s) {
        cm = cm * (m - s + 1) / s;
        cn = cn * (n - s + 1) / s;
        count += static_cast<long>(std::min(cm * cn, 1e15));
    }
    if (count > cap_subsets)
        throw CapExceeded("submatrix enumeration refuses a " + std::to_string(m) + "x" + std::to_string(n) + " matrix");
    DeltaResult res;
    res.delta = 0;
    bool any = false;
    for (int s = 1; s <= std::min(m, n); ++s) {
        subsets(m, s, [&](const std::vector<int>& rows) {
            subsets(n, s, [&](const std::vector<int>& cols) {
                Mat b(s, s);
                for (int i = 0; i < s; ++i)
                    for (int j = 0; j < s; ++j) b(i, j) = a(rows[i], cols[j]);
                auto inv = inverse(b);
                if (!inv) return;
                any = true;
                for (Eigen::Index i = 0; i < inv->size(); ++i) res.delta = max(res.delta, abs(inv->data()[i]));
            });
        });
    }
    res.all_singular = !any;
    return res;
}

SensitivityReport sensitivity_check(const MlpInstance& inst, const Vec& b1, const Vec& b2) {
    if (inst.k() != 2 || inst.m(1) != 0) throw std::invalid_argument("sensitivity check needs a bilevel instance without leader rows");
    if (b1.size() != inst.m(2) || b2.size() != inst.m(2)) throw std::invalid_argument("right-hand side has wrong length");
    SensitivityReport rep;
    Mat full(inst.m(2), inst.n_total());
    full << inst.A(2, 1), inst.A(2, 2);
    rep.delta = sensitivity_delta(full).delta;

    auto solve_at = [&](const Vec& b) {
        MlpData d = inst.data();
        d.b[1] = b;
        return bilevel_solve(MlpInstance(std::move(d)));
    };
    SolveOutcome o1 = solve_at(b1), o2 = solve_at(b2);
    rep.finite = o1.finite() && o2.finite();
    if (!rep.finite) return rep;
    rep.v1 = o1.value;
    rep.v2 = o2.value;
    rep.lhs = abs(o1.value - o2.value);

    Rat a21 = 0;
    for (Eigen::Index r = 0; r < inst.A(2, 1).rows(); ++r) {
        Rat s = 0;
        for (Eigen::Index j = 0; j < inst.A(2, 1).cols(); ++j) s += abs(inst.A(2, 1)(r, j));
        a21 = max(a21, s);
    }
    Rat m1 = Rat(inst.n_total()) * rep.delta;              // feasibility displacement
    Rat m2 = Rat(inst.n(2)) * rep.delta * (Rat(1) + a21 * m1);  // follower re-optimization
    Rat c1 = norm_1(inst.objective(1));
    rep.bound = c1 * max(m1, m2) * norm_inf(Vec(b1 - b2));
    rep.holds = !(rep.bound < rep.lhs);
    return rep;
}

}  // namespace mlp
