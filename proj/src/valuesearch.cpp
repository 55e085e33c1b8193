#include "mlp/valuesearch.hpp"

#include <memory>

#include "mlp/transforms.hpp"

namespace mlp {

Rat simplest_rational(const Rat& lo, const Rat& hi) {
    if (hi < lo) throw std::invalid_argument("simplest_rational: empty interval");
    if (lo.sign() <= 0 && hi.sign() >= 0) return Rat(0);
    if (hi.sign() < 0) return -simplest_rational(-hi, -lo);
    Rat fl(floor(lo));
    if (fl == lo) return lo;
    if (!(hi < fl + Rat(1))) return fl + Rat(1);
    // lo and hi share the integer part; recurse on the reciprocals of the fractional parts
    return fl + Rat(1) / simplest_rational(Rat(1) / (hi - fl), Rat(1) / (lo - fl));
}

Rat reconstruct_rational(const Rat& lo, const Rat& hi, long phi) {
    if (hi < lo) throw std::invalid_argument("reconstruct_rational: lo > hi");
    if (encoding_size(lo) <= phi) return lo;
    if (encoding_size(hi) <= phi) return hi;
    Rat r = simplest_rational(lo, hi);
    if (encoding_size(r) > phi)
        throw BoundViolated("bound violated: no rational of size <= " + std::to_string(phi) + " in [" + lo.str() + ", " +
                            hi.str() + "]");
    return r;
}

ValueSearch binary_search_value(const DecisionOracle& o, long phi) {
    if (phi < 3) throw std::invalid_argument("binary_search_value needs phi >= 3");
    ValueSearch res;
    SolveOutcome& out = res.outcome;
    auto ask = [&](const Rat& t) {
        ++res.queries;
        return o.le(t);
    };
    if (o.infeasible) {
        ++res.queries;
        if (o.infeasible()) {
            out.status = Status::Infeasible;
            return res;
        }
    }
    if (o.unbounded) {
        ++res.queries;
        if (o.unbounded()) {
            out.status = Status::Unbounded;
            return res;
        }
    }
    // Nonzero values of size <= phi have 2^-(phi-2) < |V| < 2^(phi-2).
    long lo_e = -(phi - 2), hi_e = phi - 2;
    Rat lo, hi;
    if (ask(Rat(0))) {
        if (!ask(-pow2(lo_e))) {
            out.status = Status::Attained;
            out.value = Rat(0);
            return res;
        }
        while (hi_e - lo_e > 1) {
            long mid = lo_e + (hi_e - lo_e) / 2;
            if (ask(-pow2(mid))) lo_e = mid;
            else hi_e = mid;
        }
        lo = -pow2(hi_e);
        hi = -pow2(lo_e);
    } else {
        while (hi_e - lo_e > 1) {
            long mid = lo_e + (hi_e - lo_e) / 2;
            if (ask(pow2(mid))) hi_e = mid;
            else lo_e = mid;
        }
        lo = pow2(lo_e);
        hi = pow2(hi_e);
    }
    // |V| >= 2^lo_e gives bits(q) <= (phi - 1 - lo_e) / 2 for every candidate here,
    // so two candidates are more than 2^-2B apart.
    long B = std::min(phi - 2, (phi - 1 - lo_e) / 2);
    if (B < 0) B = 0;
    Rat width = pow2(-2 * B);
    while (width < hi - lo) {
        Rat mid = (lo + hi) / Rat(2);
        if (ask(mid)) hi = mid;
        else lo = mid;
    }
    Rat r = reconstruct_rational(lo, hi, phi);
    if (r == lo) throw BoundViolated("bound violated: reconstructed value sits on an excluded endpoint");
    if (!ask(r)) throw InconsistentOracle("oracle answered no at the reconstructed value " + r.str());
    out.status = Status::Attained;
    out.value = r;
    return res;
}

long default_phi(const MlpInstance& inst) {
    return BoundFn::for_instance(BoundFn::Kind::phi_k, inst).evaluate(encoding_size(inst));
}

namespace {

Bilevel as_bilevel(const MlpInstance& inst) {
    if (inst.k() == 2) return Bilevel::from(inst);
    Bilevel bl;
    bl.n1 = inst.n(1);
    for (int r = 0; r < inst.m(1); ++r) bl.upper.push_back({sparse(inst.row(1, r)), inst.b(1)(r), false});
    Vec f = inst.objective(1);
    bl.f_upper.assign(f.begin(), f.end());
    bl.f_lower.assign(bl.n1, Rat(0));
    return bl;
}

}  // namespace

DecisionOracle oracle_from_solver(const MlpInstance& inst, const KlevelOptions& opt) {
    DecisionOracle o;
    if (inst.k() <= 2) {
        auto bl = std::make_shared<Bilevel>(as_bilevel(inst));
        BilevelOptions feas = opt.bilevel;
        feas.feasibility_only = true;
        o.name = "solver-bilevel";
        o.le = [bl, feas](const Rat& t) {
            Bilevel b = *bl;
            Terms row;
            for (size_t j = 0; j < b.f_upper.size(); ++j)
                if (!b.f_upper[j].is_zero()) row.emplace_back(static_cast<int>(j), -b.f_upper[j]);
            b.upper.push_back({row, -t, false});
            return bilevel_solve(b, feas).status != Status::Infeasible;
        };
        o.infeasible = [bl, feas] { return bilevel_solve(*bl, feas).status == Status::Infeasible; };
        BilevelOptions full = opt.bilevel;
        o.unbounded = [bl, full] { return bilevel_solve(*bl, full).status == Status::Unbounded; };
        return o;
    }
    auto cache = std::make_shared<std::optional<SolveOutcome>>();
    auto get = [cache, inst, opt]() -> const SolveOutcome& {
        if (!*cache) *cache = klevel_verify(inst, opt);
        return **cache;
    };
    o.name = "solver-klevel";
    o.le = [get](const Rat& t) {
        const SolveOutcome& s = get();
        return s.finite() && !(t < s.value);
    };
    o.infeasible = [get] { return get().status == Status::Infeasible; };
    o.unbounded = [get] { return get().status == Status::Unbounded; };
    return o;
}

namespace {

Rat weighted_bits(const Assignment& m) {
    Rat s = 0;
    for (size_t i = 0; i < m.size(); ++i)
        if (m[i]) s += pow2(-static_cast<long>(i + 1));
    return s;
}

}  // namespace

GadgetValue predicted_value(const GadgetInstance& g) {
    GadgetValue v;
    const std::string& n = g.gadget;
    const Formula& f = g.qbf.matrix;
    auto finite = [&](const Rat& val, bool attained = true) {
        v.status = attained ? Status::Attained : Status::FiniteValue;
        v.value = val;
        v.attained = attained;
    };
    if (n == "sat2blp" || n == "sat2blp-signed") {
        bool sat = lexmax_sat(f).has_value();
        finite(g.signed_value ? Rat(sat ? -1 : 0) : Rat(sat ? 0 : 1));
    } else if (n == "lexsat2blp" || n == "lexsat2blp-compact") {
        auto m = lexmax_sat(f);
        finite(m ? -weighted_bits(*m) : pow2(-f.n));
    } else if (n == "qbf2klp" || n == "qbf2klp-signed") {
        bool t = qbf_truth(g.qbf);
        finite(g.signed_value ? Rat(t ? -1 : 0) : Rat(t ? 0 : 1));
    } else if (n == "qbf2klp-search") {
        auto m = qbf_lexmax(g.qbf);
        finite(m ? -weighted_bits(*m) : pow2(-static_cast<long>(g.qbf.blocks[0].size())));
    } else if (n == "attain3") {
        auto m = qbf_lexmax(g.qbf);
        if (m) finite(-weighted_bits(*m), m->back() == 0);
        else finite(pow2(-static_cast<long>(g.qbf.blocks[0].size())));
    } else if (n == "example-k3" || n == "example-k4") {
        finite(Rat(-1), false);
    } else if (n == "satunsat") {
        bool s1 = lexmax_sat(f).has_value(), s2 = lexmax_sat(g.second).has_value();
        if (!s1) v.status = Status::Infeasible;
        else if (s2) v.status = Status::Unbounded;
        else finite(Rat(0));
    } else if (n == "pifeas") {
        if (qbf_truth(g.qbf)) v.status = Status::Infeasible;
        else finite(Rat(0));
    } else if (n == "feas5") {
        if (qbf_truth(g.qbf)) finite(Rat(0));
        else v.status = Status::Infeasible;
    } else {
        throw std::invalid_argument("no value lemma for gadget '" + n + "'");
    }
    return v;
}

DecisionOracle oracle_from_gadget(const GadgetInstance& g) {
    auto pv = std::make_shared<GadgetValue>(predicted_value(g));
    DecisionOracle o;
    o.name = "gadget-" + g.gadget;
    o.le = [pv](const Rat& t) {
        if (pv->status == Status::Infeasible) return false;
        if (pv->status == Status::Unbounded) return true;
        return pv->value < t || (pv->value == t && pv->attained);
    };
    o.infeasible = [pv] { return pv->status == Status::Infeasible; };
    o.unbounded = [pv] { return pv->status == Status::Unbounded; };
    return o;
}

}  // namespace mlp
