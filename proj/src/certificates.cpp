#include "mlp/certificates.hpp"

#include <algorithm>
#include <map>

namespace mlp {

namespace {

Terms obj_terms(const Vec& c, const Rat& scale = Rat(1)) {
    Terms t;
    for (int j = 0; j < c.size(); ++j)
        if (!c(j).is_zero()) t.emplace_back(j, c(j) * scale);
    return t;
}

Rat dot(const Vec& a, const Vec& b) {
    Rat s = 0;
    for (int j = 0; j < a.size(); ++j)
        if (!a(j).is_zero()) s += a(j) * b(j);
    return s;
}

std::vector<Rat> sample_grid(int depth) {
    std::vector<Rat> xs{Rat(0)};
    for (int j = 1; j <= depth; ++j) xs.push_back(Rat(1) - pow2(-j));
    xs.push_back(Rat(1));
    return xs;
}

// Level-1 value and witness with the level-1 variables set in `upper`.
std::optional<LexValue> lower_response(const MlpInstance& inst, Vec upper, const KlevelOptions& ko) {
    return inst.k() == 3 ? klevel_evaluate(inst, upper, ko) : klevel_lex(inst, 2, upper, ko);
}

// The collapsed relaxation: levels 1..k-1 lead, level k follows.
Bilevel collapsed(const MlpInstance& inst) {
    int k = inst.k();
    Bilevel bl;
    bl.n1 = inst.offset(k);
    bl.n2 = inst.n(k);
    for (int l = 1; l <= k; ++l)
        for (int r = 0; r < inst.m(l); ++r)
            (l == k ? bl.lower : bl.upper).push_back({sparse(inst.row(l, r)), inst.b(l)(r), false});
    bl.f_upper.assign(inst.n_total(), Rat(0));
    Vec fk = inst.objective(k);
    bl.f_lower.assign(fk.begin(), fk.end());
    return bl;
}

std::optional<Rat> bl_min(Bilevel bl, int var, int sign) {
    std::fill(bl.f_upper.begin(), bl.f_upper.end(), Rat(0));
    bl.f_upper[var] = Rat(sign);
    SolveOutcome o = bilevel_solve(bl);
    if (!o.finite()) return std::nullopt;
    return o.value * Rat(sign);
}

// Level-2 value at x = c with the level-3 rows tight at z_a kept tight. The dual
// certificate of that piece does not depend on x, so along [a, c] the level-2 value
// is at most the line through (a, f2(z_a)) and (c, result).
std::optional<Rat> piece_value(const MlpInstance& inst, int param, const std::vector<std::pair<int, Rat>>& fixed,
                               const Vec& za, const Rat& c) {
    Vec f2 = inst.objective(2);
    LpProblem p(inst.n_total());
    for (int l = 2; l <= 3; ++l)
        for (int r = 0; r < inst.m(l); ++r) {
            Vec row = inst.row(l, r);
            bool tight = l == 3 && dot(row, za) == inst.b(l)(r);
            p.rows.push_back({sparse(row), inst.b(l)(r), tight});
        }
    for (const auto& [v, val] : fixed) p.eq({{v, Rat(1)}}, val);
    p.eq({{param, Rat(1)}}, c);
    p.obj.assign(f2.begin(), f2.end());
    LpResult r = lp_solve(p);
    if (r.status != LpStatus::Optimal) return std::nullopt;
    return r.value;
}

// f2 <= pa + (pc - pa) (x - a) / (c - a), valid for x between a and c.
void segment_cut(const MlpInstance& inst, Bilevel& bl, int param, const std::vector<std::pair<int, Rat>>& fixed,
                 const Rat& a, const Vec& za, const Rat& c) {
    auto pc = piece_value(inst, param, fixed, za, c);
    if (!pc) return;
    Rat pa = dot(inst.objective(2), za);
    Rat slope = (*pc - pa) / (c - a);
    Terms t = obj_terms(inst.objective(2), Rat(-1));
    t.emplace_back(param, slope);
    bl.upper.push_back({t, slope * a - pa, false});
}

void interpolation_cuts(const MlpInstance& inst, Bilevel& bl, int param, const std::vector<std::pair<int, Rat>>& fixed,
                        const std::map<Rat, Vec>& responses) {
    auto z0 = responses.find(Rat(0)), z1 = responses.find(Rat(1));
    if (z0 != responses.end()) segment_cut(inst, bl, param, fixed, Rat(0), z0->second, Rat(1));
    if (z1 != responses.end()) segment_cut(inst, bl, param, fixed, Rat(1), z1->second, Rat(0));
}

// k = 3 with the parameter free in the relaxation: split its range at the sampled
// points and cut each segment from both of its endpoints.
bool segments_infeasible(const MlpInstance& inst, const Bilevel& base, int param,
                         const std::vector<std::pair<int, Rat>>& fixed, const std::map<Rat, Vec>& responses,
                         std::string* why) {
    BilevelOptions feas;
    feas.feasibility_only = true;
    auto lo = bl_min(base, param, 1), hi = bl_min(base, param, -1);
    if (!lo || !hi) {
        if (why) *why = "parameter unbounded in the relaxation";
        return false;
    }
    if (responses.empty() || *lo < responses.begin()->first || responses.rbegin()->first < *hi) {
        if (why) *why = "parameter range not covered by samples";
        return false;
    }
    for (auto it = responses.begin(); std::next(it) != responses.end(); ++it) {
        auto nx = std::next(it);
        if (nx->first < *lo || *hi < it->first) continue;
        Bilevel bl = base;
        bl.upper.push_back({{{param, Rat(1)}}, it->first, false});
        bl.upper.push_back({{{param, Rat(-1)}}, -nx->first, false});
        segment_cut(inst, bl, param, fixed, it->first, it->second, nx->first);
        segment_cut(inst, bl, param, fixed, nx->first, nx->second, it->first);
        if (bilevel_solve(bl, feas).status != Status::Infeasible) {
            if (why) *why = "segment [" + it->first.str() + ", " + nx->first.str() + "] feasible";
            return false;
        }
    }
    if (why) *why = "every parameter segment infeasible";
    return true;
}

bool le_test(const MlpInstance& inst, const Rat& v, const std::vector<std::pair<int, Rat>>& fixed, const CertOptions& opt,
             const std::map<Rat, Vec>* responses, std::string* why) {
    int k = inst.k();
    Bilevel bl = collapsed(inst);
    for (const auto& [var, val] : fixed) bl.upper.push_back({{{var, Rat(1)}}, val, true});
    bl.upper.push_back({obj_terms(inst.objective(1), Rat(-1)), -v, false});
    if (k == 3 && opt.interpolation && opt.param >= 0 && responses) interpolation_cuts(inst, bl, opt.param, fixed, *responses);

    // Variables whose values feed the value cuts: the parameter and levels 2..k-2.
    std::vector<int> watch;
    if (opt.param >= 0) watch.push_back(opt.param);
    for (int g = inst.offset(2); g < inst.offset(k - 1); ++g) watch.push_back(g);
    std::vector<char> cut_done(k, 0);
    BilevelOptions feas;
    feas.feasibility_only = true;
    for (int round = 0; round < opt.rounds; ++round) {
        if (bilevel_solve(bl, feas).status == Status::Infeasible) {
            if (why) *why = "relaxation infeasible after " + std::to_string(round) + " cut rounds";
            return true;
        }
        std::map<int, Rat> pinned;
        for (int g : watch) {
            auto lo = bl_min(bl, g, 1), hi = bl_min(bl, g, -1);
            if (lo && hi && *lo == *hi) pinned[g] = *lo;
        }
        if (opt.param >= 0 && !pinned.count(opt.param)) {
            if (k == 3 && responses) return segments_infeasible(inst, bl, opt.param, fixed, *responses, why);
            if (why) *why = "parameter not pinned by the relaxation";
            return false;
        }
        Vec upper = zeros(inst.offset(k - 1));
        for (const auto& [var, val] : fixed) upper(var) = val;
        bool added = false;
        for (int l = 2; l <= k - 1; ++l) {
            bool known = true;
            for (int g = inst.offset(2); g < inst.offset(l); ++g) known = known && pinned.count(g);
            if (!known) break;
            for (const auto& [g, val] : pinned) upper(g) = val;
            if (cut_done[l]) continue;
            Vec u = upper;
            auto phi = klevel_lex(inst, l, u, opt.klevel);
            if (!phi || !phi->v[0]) {
                if (why) *why = "no feasible continuation at the pinned values";
                return true;
            }
            bl.upper.push_back({obj_terms(inst.objective(l), Rat(-1)), -*phi->v[0], false});
            cut_done[l] = 1;
            added = true;
        }
        if (!added) {
            if (why) *why = "relaxation feasible and no further value cut applies";
            return false;
        }
    }
    if (why) *why = "cut rounds exhausted";
    return false;
}

}  // namespace

bool no_point_at_most(const MlpInstance& inst, const Rat& v, const std::vector<std::pair<int, Rat>>& fixed,
                      const CertOptions& opt, std::string* why) {
    return le_test(inst, v, fixed, opt, nullptr, why);
}

CertReport attainment_certificate(const MlpInstance& inst, const CertOptions& opt) {
    int k = inst.k();
    CertReport rep;
    if (k == 2) {
        rep.outcome = bilevel_solve(inst, opt.klevel.bilevel);
        return rep;
    }
    if (k - 2 > opt.klevel.depth_cap) throw CapExceeded("enumeration depth " + std::to_string(k - 2) + " over cap");
    if (opt.param >= 0 && inst.level_of(opt.param) != 1) throw std::invalid_argument("parameter must be a level-1 variable");
    KlevelOptions ko = opt.klevel;
    ko.sunk = opt.sunk;
    for (int j = 0; j < inst.n(1); ++j)
        if (j != opt.param && std::find(opt.sunk.begin(), opt.sunk.end(), j) == opt.sunk.end()) rep.enumerated.push_back(j);
    int ne = static_cast<int>(rep.enumerated.size());
    int nb = ne + inst.offset(k - 1) - inst.offset(2);
    if (nb > ko.binary_vars_cap) throw CapExceeded("enumerated variables " + std::to_string(nb) + " over cap");

    std::vector<Rat> xs = opt.param >= 0 ? sample_grid(opt.depth) : std::vector<Rat>{Rat(0)};
    std::optional<Rat> best_sample, best_limit;
    Vec best_z;
    std::vector<std::map<Rat, Vec>> responses(size_t(1) << ne);
    for (uint64_t mask = 0; mask < (uint64_t(1) << ne); ++mask) {
        AssignmentCurve cur;
        Vec upper = zeros(inst.offset(k - 1));
        for (int j = 0; j < ne; ++j) {
            int bit = static_cast<int>((mask >> (ne - 1 - j)) & 1u);
            cur.bits.push_back(bit);
            upper(rep.enumerated[j]) = Rat(bit);
        }
        for (const Rat& x : xs) {
            if (opt.param >= 0) upper(opt.param) = x;
            CurvePoint pt{x, std::nullopt, {}};
            if (auto r = lower_response(inst, upper, ko)) {
                pt.value = r->v.back();
                pt.z = r->z;
                if (pt.value) responses[mask][x] = r->z;
            }
            if (pt.value && (!best_sample || *pt.value < *best_sample)) {
                best_sample = pt.value;
                best_z = pt.z;
            }
            cur.points.push_back(std::move(pt));
        }
        if (opt.param >= 0 && opt.depth >= 3) {
            // affine fit in eps = 2^-j over the three points nearest to 1
            const auto& p = cur.points;
            size_t i3 = p.size() - 2, i2 = i3 - 1, i1 = i2 - 1;
            if (p[i1].value && p[i2].value && p[i3].value) {
                Rat e1 = Rat(1) - p[i1].x, e2 = Rat(1) - p[i2].x, e3 = Rat(1) - p[i3].x;
                Rat slope = (*p[i1].value - *p[i2].value) / (e1 - e2);
                if (*p[i2].value + slope * (e3 - e2) == *p[i3].value) cur.limit = *p[i3].value - slope * e3;
            }
        }
        if (cur.limit && (!best_limit || *cur.limit < *best_limit)) best_limit = cur.limit;
        rep.curves.push_back(std::move(cur));
    }

    SolveOutcome& out = rep.outcome;
    if (!best_sample && !best_limit) {
        out.status = Status::Infeasible;
        out.note = "no feasible point for any binary upper-level choice";
        return rep;
    }
    if (best_sample && (!best_limit || !(*best_limit < *best_sample))) {
        out.status = Status::Attained;
        out.attainment = Attainment::Attained;
        out.value = *best_sample;
        out.witness = Point::from_flat(inst, best_z);
        out.note = "minimum reached at a sampled parameter value";
        return rep;
    }
    out.status = Status::FiniteValue;
    out.value = *best_limit;
    std::string fail;
    for (uint64_t mask = 0; mask < (uint64_t(1) << ne); ++mask) {
        std::vector<std::pair<int, Rat>> fixed;
        for (int j = 0; j < ne; ++j) fixed.emplace_back(rep.enumerated[j], Rat(rep.curves[mask].bits[j]));
        // levels 2..k-2 take binary values in the k-level solver; branch on them the same way
        int lo = inst.offset(2), nm = inst.offset(k - 1) - lo;
        bool ok = true;
        std::string why;
        for (uint64_t mid = 0; ok && mid < (uint64_t(1) << nm); ++mid) {
            auto fx = fixed;
            for (int j = 0; j < nm; ++j) fx.emplace_back(lo + j, ((mid >> j) & 1u) ? ko.enum_scale : Rat(0));
            ok = le_test(inst, out.value, fx, opt, &responses[mask], &why);
        }
        ++rep.tests;
        if (ok) ++rep.passed;
        else if (fail.empty()) fail = why;
    }
    if (rep.passed == rep.tests) {
        out.attainment = Attainment::NotAttained;
        out.note = "value approached at the parameter limit; no feasible point reaches it";
    } else {
        out.attainment = Attainment::Unknown;
        out.note = "non-attainment not certified: " + fail;
    }
    return rep;
}

std::optional<Restricted> restrict_top(const MlpInstance& inst, const Vec& level1, const Varmap* vm, Varmap* vm_out) {
    int k = inst.k();
    if (k < 2) throw std::invalid_argument("restrict_top needs k >= 2");
    if (level1.size() != inst.n(1)) throw std::invalid_argument("restrict_top: wrong number of level-1 values");
    int n1 = inst.n(1);
    Builder b(k - 1);
    Restricted res;
    for (int g = n1; g < inst.n_total(); ++g) {
        int l = inst.level_of(g);
        std::string role = vm ? vm->vars[g].role : "x" + std::to_string(l);
        std::string name = vm ? vm->vars[g].name : "x" + std::to_string(l) + "[" + std::to_string(g - inst.offset(l)) + "]";
        b.var(l - 1, role, name);
        res.from.push_back(g);
    }
    auto split = [&](const Vec& row, Rat& rhs) {
        Terms t;
        for (int j = 0; j < row.size(); ++j) {
            if (row(j).is_zero()) continue;
            if (j < n1) rhs -= row(j) * level1(j);
            else t.emplace_back(j - n1, row(j));
        }
        return t;
    };
    for (int r = 0; r < inst.m(1); ++r) {
        Rat rhs = inst.b(1)(r);
        Terms t = split(inst.row(1, r), rhs);
        if (!t.empty()) throw std::invalid_argument("restrict_top: level-1 row involves lower-level variables");
        if (rhs.sign() > 0) return std::nullopt;
    }
    for (int l = 2; l <= k; ++l)
        for (int r = 0; r < inst.m(l); ++r) {
            Rat rhs = inst.b(l)(r);
            Terms t = split(inst.row(l, r), rhs);
            b.ge(l - 1, t, rhs);
        }
    for (int l = 2; l <= k; ++l) {
        Vec c = inst.objective(l);
        for (int j = n1; j < c.size(); ++j)
            if (!c(j).is_zero()) b.obj(l - 1, j - n1, c(j));
    }
    auto [out, map] = b.build();
    res.instance = out;
    if (vm_out) *vm_out = map;
    return res;
}

std::optional<std::pair<Rat, Rat>> range_on_bottom_optima(const MlpInstance& inst, const Vec& upper, int var) {
    int k = inst.k();
    int base = inst.offset(k - 1);
    if (var < base) throw std::invalid_argument("range_on_bottom_optima: variable must belong to the bottom two levels");
    Bilevel bl = bottom_bilevel(inst, upper);
    SolveOutcome o = bilevel_solve(bl);
    if (o.status == Status::Infeasible) return std::nullopt;
    if (o.status == Status::Unbounded) throw std::runtime_error("bottom levels unbounded");
    Terms t;
    for (size_t j = 0; j < bl.f_upper.size(); ++j)
        if (!bl.f_upper[j].is_zero()) t.emplace_back(static_cast<int>(j), -bl.f_upper[j]);
    bl.upper.push_back({t, -o.value, false});
    auto lo = bl_min(bl, var - base, 1), hi = bl_min(bl, var - base, -1);
    if (!lo || !hi) throw std::runtime_error("range over bottom optima is unbounded");
    return std::make_pair(*lo, *hi);
}

}  // namespace mlp
