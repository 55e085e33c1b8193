#include <algorithm>
#include <random>

#include "mlp/solver.hpp"

namespace mlp {

namespace {

// Global column -> column of the bottom bilevel, or -1 when the column is fixed.
struct ColMap {
    std::vector<int> local;
    std::vector<int> global;  // inverse
};

ColMap bottom_cols(const MlpInstance& inst, const std::vector<int>& sunk) {
    int k = inst.k(), base = inst.offset(k - 1);
    ColMap cm;
    cm.local.assign(inst.n_total(), -1);
    auto add = [&](int g) {
        cm.local[g] = static_cast<int>(cm.global.size());
        cm.global.push_back(g);
    };
    for (int j = 0; j < inst.n(k - 1); ++j) add(base + j);
    for (int g : sunk) {
        if (inst.level_of(g) != 1 || k < 3) throw std::invalid_argument("sunk variables must belong to level 1 of a k >= 3 instance");
        add(g);
    }
    for (int j = 0; j < inst.n(k); ++j) add(inst.offset(k) + j);
    return cm;
}

LpRow restrict_row(const ColMap& cm, const Vec& row, const Rat& rhs, const Vec& upper) {
    LpRow out{{}, rhs, false};
    for (int j = 0; j < row.size(); ++j) {
        if (row(j).is_zero()) continue;
        if (cm.local[j] < 0) out.rhs -= row(j) * upper(j);
        else out.terms.emplace_back(cm.local[j], row(j));
    }
    return out;
}

std::pair<Rat, std::vector<Rat>> restrict_obj(const MlpInstance& inst, const ColMap& cm, int level, const Vec& upper) {
    Vec c = inst.objective(level);
    Rat k0 = 0;
    std::vector<Rat> v(cm.global.size(), Rat(0));
    for (int j = 0; j < c.size(); ++j) {
        if (c(j).is_zero()) continue;
        if (cm.local[j] < 0) k0 += c(j) * upper(j);
        else v[cm.local[j]] = c(j);
    }
    return {k0, v};
}

bool lex_less(const std::vector<std::optional<Rat>>& a, const std::vector<std::optional<Rat>>& b) {
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] && b[i]) {
            if (*a[i] < *b[i]) return true;
            if (*b[i] < *a[i]) return false;
        } else if (a[i] && !b[i]) {
            return true;
        } else if (!a[i] && b[i]) {
            return false;
        }
    }
    return false;
}

}  // namespace

Bilevel bottom_bilevel(const MlpInstance& inst, const Vec& upper, const std::vector<int>& sunk) {
    int k = inst.k();
    if (k < 2) throw std::invalid_argument("bottom bilevel needs k >= 2");
    if (upper.size() != inst.offset(k - 1)) throw std::invalid_argument("upper values have wrong length");
    ColMap cm = bottom_cols(inst, sunk);
    Bilevel bl;
    bl.n1 = inst.n(k - 1) + static_cast<int>(sunk.size());
    bl.n2 = inst.n(k);
    Vec full = zeros(inst.n_total());
    full.head(upper.size()) = upper;
    for (int l = k - 1; l <= k; ++l)
        for (int r = 0; r < inst.m(l); ++r)
            (l == k ? bl.lower : bl.upper).push_back(restrict_row(cm, inst.row(l, r), inst.b(l)(r), full));
    bl.f_upper = restrict_obj(inst, cm, k - 1, full).second;
    bl.f_lower = restrict_obj(inst, cm, k, full).second;
    return bl;
}

std::optional<LexValue> klevel_evaluate(const MlpInstance& inst, const Vec& upper, const KlevelOptions& opt) {
    int k = inst.k();
    ColMap cm = bottom_cols(inst, opt.sunk);
    Vec full = zeros(inst.n_total());
    full.head(upper.size()) = upper;
    Bilevel bl = bottom_bilevel(inst, upper, opt.sunk);
    auto [k0, f] = restrict_obj(inst, cm, k - 1, full);
    bl.f_upper = f;
    SolveOutcome o = bilevel_solve(bl, opt.bilevel);
    if (o.status == Status::Infeasible) return std::nullopt;
    if (o.status == Status::Unbounded) throw std::runtime_error("lower levels unbounded; outside the verifier's scope");
    LexValue lv;
    lv.v.push_back(o.value + k0);
    Vec zb = o.witness.flat();
    Rat prev = o.value;
    for (int j = k - 2; j >= 1; --j) {
        // Stay in the optimal set of the level below, then add level j's rows.
        Terms t;
        for (size_t v = 0; v < bl.f_upper.size(); ++v)
            if (!bl.f_upper[v].is_zero()) t.emplace_back(static_cast<int>(v), -bl.f_upper[v]);
        bl.upper.push_back({t, -prev, false});
        for (int r = 0; r < inst.m(j); ++r) bl.upper.push_back(restrict_row(cm, inst.row(j, r), inst.b(j)(r), full));
        auto [kj, fj] = restrict_obj(inst, cm, j, full);
        bl.f_upper = fj;
        SolveOutcome oj = bilevel_solve(bl, opt.bilevel);
        if (oj.status == Status::Unbounded) throw std::runtime_error("upper objective unbounded on the optimal set");
        if (oj.status == Status::Infeasible) {
            if (static_cast<int>(lv.v.size()) < k - 1) lv.v.resize(k - 1);
            break;
        }
        lv.v.push_back(oj.value + kj);
        prev = oj.value;
        zb = oj.witness.flat();
    }
    lv.z = full;
    for (size_t c = 0; c < cm.global.size(); ++c) lv.z(cm.global[c]) = zb(static_cast<Eigen::Index>(c));
    return lv;
}

std::optional<LexValue> klevel_lex(const MlpInstance& inst, int level, Vec& upper, const KlevelOptions& opt) {
    int k = inst.k();
    if (level == k - 1) return klevel_evaluate(inst, upper, opt);
    if (level < 1 || level > k - 1) throw std::invalid_argument("klevel_lex level out of range");
    int n = inst.n(level), off = inst.offset(level);
    std::vector<int> free;
    for (int j = 0; j < n; ++j)
        if (level != 1 || std::find(opt.sunk.begin(), opt.sunk.end(), off + j) == opt.sunk.end()) free.push_back(off + j);
    if (free.size() > 62) throw CapExceeded("too many enumerated variables at one level");
    std::optional<LexValue> best;
    int nf = static_cast<int>(free.size());
    for (uint64_t mask = 0; mask < (uint64_t(1) << nf); ++mask) {
        for (int j = 0; j < nf; ++j) upper(free[j]) = ((mask >> (nf - 1 - j)) & 1u) ? opt.enum_scale : Rat(0);
        auto r = klevel_lex(inst, level + 1, upper, opt);
        if (!r) continue;
        r->v.erase(r->v.begin());
        if (!r->v[0]) continue;
        if (!best || lex_less(r->v, best->v)) best = std::move(r);
    }
    return best;
}

SolveOutcome klevel_verify(const MlpInstance& inst, const KlevelOptions& opt) {
    int k = inst.k();
    SolveOutcome out;
    if (k < 3) throw std::invalid_argument("klevel_verify needs k >= 3; use bilevel_solve for k = 2");
    if (k - 2 > opt.depth_cap) throw CapExceeded("enumeration depth " + std::to_string(k - 2) + " over cap");
    int nb = inst.offset(k - 1) - static_cast<int>(opt.sunk.size());
    if (nb > opt.binary_vars_cap) throw CapExceeded("enumerated variables " + std::to_string(nb) + " over cap");
    Vec upper = zeros(inst.offset(k - 1));
    auto best = klevel_lex(inst, 1, upper, opt);
    if (!best) {
        out.note = "no binary upper-level choice is feasible";
        return out;
    }
    out.status = Status::FiniteValue;
    out.attainment = Attainment::Unknown;
    out.value = *best->v[0];
    if (opt.fractional_samples > 0) {
        std::mt19937_64 rng(opt.seed);
        const Rat grid[3] = {Rat(1, 4), Rat(1, 2), Rat(3, 4)};
        int bad = 0;
        for (int t = 0; t < opt.fractional_samples; ++t) {
            Vec u = zeros(inst.offset(k - 1));
            for (int j = 0; j < inst.n(1); ++j) u(j) = grid[rng() % 3];
            auto r = k == 3 ? klevel_evaluate(inst, u, opt) : klevel_lex(inst, 2, u, opt);
            if (!r) continue;
            const auto& v1 = r->v.back();
            if (v1 && *v1 < out.value) ++bad;
        }
        out.note = bad == 0 ? "dominance ok" : "dominance violated at " + std::to_string(bad) + " samples";
    }
    out.witness = Point::from_flat(inst, best->z);
    return out;
}

}  // namespace mlp
