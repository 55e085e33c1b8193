#include "mlp/transforms.hpp"

#include <stdexcept>

namespace mlp {

BoundFn BoundFn::for_instance(Kind kind, const MlpInstance& inst) {
    BoundFn f;
    f.kind = kind;
    f.n = std::max(1, inst.n_total());
    return f;
}

long BoundFn::evaluate(long sigma) const { return std::max(sigma, coef * n * n * sigma); }

std::string BoundFn::name() const {
    switch (kind) {
        case Kind::psi2: return "psi2";
        case Kind::psi3: return "psi3";
        default: return "phi_k";
    }
}

namespace {

// Copies variables level by level; rows and objectives are added by the caller.
Builder skeleton(const MlpInstance& inst, int k_out, const std::vector<int>& level_map) {
    Builder b(k_out);
    for (int g = 0; g < inst.n_total(); ++g) {
        int l = inst.level_of(g);
        b.var(level_map[l], "x" + std::to_string(l), "x" + std::to_string(l) + "[" + std::to_string(g - inst.offset(l)) + "]");
    }
    return b;
}

Terms row_terms(const Vec& row) {
    Terms t;
    for (int j = 0; j < row.size(); ++j)
        if (!row(j).is_zero()) t.emplace_back(j, row(j));
    return t;
}

bool touches_above(const MlpInstance& inst, const Vec& row, int l) {
    for (int j = inst.offset(l + 1); j < row.size(); ++j)
        if (!row(j).is_zero()) return true;
    return false;
}

}  // namespace

bool has_unit_box(const MlpInstance& inst, int v) {
    bool lo = false, hi = false;
    for (int l = 1; l <= inst.k(); ++l) {
        for (int r = 0; r < inst.m(l); ++r) {
            Vec row = inst.row(l, r);
            bool single = true;
            for (int j = 0; j < row.size() && single; ++j)
                if (j != v && !row(j).is_zero()) single = false;
            if (!single) continue;
            if (row(v) == Rat(1) && inst.b(l)(r).is_zero()) lo = true;
            if (row(v) == Rat(-1) && inst.b(l)(r) == Rat(-1)) hi = true;
        }
    }
    return lo && hi;
}

MlpInstance forward_constraints(const MlpInstance& inst) {
    int k = inst.k();
    std::vector<int> lm(k + 1);
    for (int l = 1; l <= k; ++l) lm[l] = l;
    Builder b = skeleton(inst, k, lm);
    std::vector<std::pair<Terms, Rat>> moved;
    for (int l = 1; l <= k; ++l) {
        for (int r = 0; r < inst.m(l); ++r) {
            Vec row = inst.row(l, r);
            if (l < k && !touches_above(inst, row, l)) moved.emplace_back(row_terms(row), inst.b(l)(r));
            else b.ge(l, row_terms(row), inst.b(l)(r));
        }
    }
    for (auto& [t, rhs] : moved) b.ge(k, t, rhs);
    for (int l = 1; l <= k; ++l) {
        Vec c = inst.objective(l);
        for (int j = 0; j < c.size(); ++j)
            if (!c(j).is_zero()) b.obj(l, j, c(j));
    }
    return b.build().first;
}

MlpInstance scale_rhs(const MlpInstance& inst, const Rat& lambda) {
    if (lambda.sign() <= 0) throw std::invalid_argument("scale_rhs needs lambda > 0");
    if (!check_conditions(inst).c1) throw std::invalid_argument("scale_rhs needs C1 (no constraints above the last level)");
    MlpData d = inst.data();
    for (auto& bl : d.b) bl *= lambda;
    return MlpInstance(std::move(d));
}

CompactResult compact_powers(const MlpInstance& inst, const std::vector<std::pair<int, int>>& weights, const Varmap* vm) {
    int k = inst.k();
    Builder b = builder_from(inst, vm);
    std::vector<int> ends;
    for (const auto& [g, e] : weights) {
        if (e <= 0) throw std::invalid_argument("compact_powers needs a positive exponent");
        if (g < 0 || g >= inst.n_total()) throw std::invalid_argument("compact_powers variable out of range");
        if (!has_unit_box(inst, g)) throw std::invalid_argument("compact_powers needs a [0,1]-boxed variable");
        std::string base = vm && g < static_cast<int>(vm->vars.size()) ? vm->vars[g].name : "v" + std::to_string(g);
        int prev = g;
        for (int p = 1; p <= e; ++p) {
            int h = b.var(k, "h", "h(" + base + ")[" + std::to_string(p) + "]");
            b.eq(k, {{h, 2}, {prev, -1}}, 0);
            b.box(k, h);
            prev = h;
        }
        Rat a = inst.objective(1)(g);
        if (!a.is_zero()) {
            b.obj(1, g, -a);
            b.obj(1, prev, a * pow2(e));
        }
        ends.push_back(prev);
    }
    auto [out, map] = b.build();
    std::vector<int> lay = b.layout();
    for (int& h : ends) h = lay[h];
    return {std::move(out), std::move(map), std::move(ends)};
}

MlpInstance t_companion(const MlpInstance& inst, Companion which) {
    BoundFn::Kind kind = which == Companion::T3 ? BoundFn::Kind::psi3 : BoundFn::Kind::psi2;
    return t_companion(inst, which, BoundFn::for_instance(kind, inst));
}

MlpInstance t_companion(const MlpInstance& inst, Companion which, const BoundFn& psi) {
    int k = inst.k();
    ConditionReport cr = check_conditions(inst);
    const char* name = which == Companion::T2 ? "T2" : which == Companion::T3 ? "T3" : "T4";
    int want = which == Companion::T2 ? 2 : which == Companion::T3 ? 3 : 4;
    if (k != want) throw std::invalid_argument(std::string(name) + " requires k = " + std::to_string(want));
    if (!cr.c1) throw std::invalid_argument(std::string(name) + " requires C1 (no constraints above the last level)");
    if (which == Companion::T4 && !cr.c2) throw std::invalid_argument("T4 requires C2 (unit boxes in the last level)");

    std::vector<int> lm(k + 1);
    for (int l = 1; l <= k; ++l) lm[l] = std::max(1, l - 1);
    Builder b = skeleton(inst, k - 1, lm);
    if (which != Companion::T4) {
        Rat big = pow2(psi.evaluate(encoding_size(inst)));
        for (int j = 0; j < inst.n(1); ++j) {
            b.ge(1, {{j, 1}}, -big);
            b.ge(1, {{j, -1}}, -big);
        }
    }
    for (int l = 1; l <= k; ++l)
        for (int r = 0; r < inst.m(l); ++r) b.ge(lm[l], row_terms(inst.row(l, r)), inst.b(l)(r));
    for (int l = 2; l <= k; ++l) {
        Vec c = inst.objective(l);
        for (int j = 0; j < c.size(); ++j)
            if (!c(j).is_zero()) b.obj(l - 1, j, c(j));
    }
    return b.build().first;
}

MlpInstance binarize_lift(const MlpInstance& inst, const std::vector<int>& binary_vars) {
    int k = inst.k();
    for (int v : binary_vars) {
        if (v < 0 || v >= inst.n_total()) throw std::invalid_argument("binarize_lift variable out of range");
        if (!has_unit_box(inst, v)) throw std::invalid_argument("binarize_lift needs [0,1]-boxed variables; x" + std::to_string(v) + " is not");
    }
    Builder b = builder_from(inst);
    b.push_level();
    Terms sum;
    for (int v : binary_vars) {
        int w = b.var(k + 1, "w", "w(" + std::to_string(v) + ")");
        b.ge(k + 1, {{v, 1}, {w, -1}}, 0);
        b.ge(k + 1, {{v, -1}, {w, -1}}, -1);
        b.box(k + 1, w);
        b.obj(k + 1, w, -1);
        sum.emplace_back(w, -1);
    }
    b.ge(k, sum, 0);
    return b.build().first;
}

}  // namespace mlp
