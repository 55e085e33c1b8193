#include "mlp/gadgets.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "mlp/transforms.hpp"

namespace mlp {

namespace {

struct Circuit {
    int F = -1, NF = -1;
    std::vector<int> gates;  // every gate output except F and NF
};

// Gate-hull rows for each node of f, written at level `rows`. Gate outputs,
// F and NF belong to `owner`. A leaf or constant root still gets its own F.
Circuit add_circuit(Builder& b, const Formula& f, const std::vector<int>& inputs, int owner, int rows,
                    const std::string& gate_role, const std::string& sfx) {
    Circuit c;
    std::vector<int> h(f.nodes.size(), -1);
    size_t cur = 0;
    auto gate = [&](const std::string& role) {
        int u = b.var(owner, (cur == static_cast<size_t>(f.root) ? std::string("F") : role) + sfx);
        b.box(rows, u);
        return u;
    };
    for (size_t i = 0; i < f.nodes.size(); ++i) {
        cur = i;
        const Node& nd = f.nodes[i];
        switch (nd.op) {
            case Op::Var: h[i] = inputs.at(nd.var - 1); break;
            case Op::Const: {
                int u = gate(gate_role);
                if (nd.var) b.ge(rows, {{u, 1}}, 1);
                else b.ge(rows, {{u, -1}}, 0);
                h[i] = u;
                c.gates.push_back(u);
                break;
            }
            case Op::Not: {
                int u = gate(gate_role);
                b.eq(rows, {{u, 1}, {h[nd.a], 1}}, 1);
                h[i] = u;
                c.gates.push_back(u);
                break;
            }
            case Op::And: {
                int u = gate(gate_role);
                b.ge(rows, {{h[nd.a], 1}, {u, -1}}, 0);
                b.ge(rows, {{h[nd.b], 1}, {u, -1}}, 0);
                b.ge(rows, {{u, 1}, {h[nd.a], -1}, {h[nd.b], -1}}, -1);
                h[i] = u;
                c.gates.push_back(u);
                break;
            }
            case Op::Or: {
                int u = gate(gate_role);
                b.ge(rows, {{u, 1}, {h[nd.a], -1}}, 0);
                b.ge(rows, {{u, 1}, {h[nd.b], -1}}, 0);
                b.ge(rows, {{h[nd.a], 1}, {h[nd.b], 1}, {u, -1}}, 0);
                h[i] = u;
                c.gates.push_back(u);
                break;
            }
        }
    }
    const Node& rt = f.nodes.at(f.root);
    cur = f.nodes.size();
    if (rt.op == Op::Var) {
        c.F = gate("F");
        b.eq(rows, {{c.F, 1}, {h[f.root], -1}}, 0);
    } else {
        c.F = h[f.root];
        c.gates.erase(std::find(c.gates.begin(), c.gates.end(), c.F));
    }
    c.NF = gate("NF");
    b.eq(rows, {{c.F, 1}, {c.NF, 1}}, 1);
    return c;
}

// v <= x, v <= 1 - x, 0 <= v <= 1; v belongs to `level`, rows at `rows`.
int add_penalty(Builder& b, int x, int level, int rows, const std::string& role) {
    int v = b.var(level, role);
    b.ge(rows, {{x, 1}, {v, -1}}, 0);
    b.ge(rows, {{x, -1}, {v, -1}}, -1);
    b.box(rows, v);
    return v;
}

struct CoreOpts {
    int k = 2;
    const std::vector<int>* shared_s1 = nullptr;
    std::vector<char> skip_obj;  // per level (1-based), objective left to the caller
    int K = 4;
    Rat c_pen = 3;
    bool signed_value = false;
    std::string sfx, s_role = "s", gate_role = "p", pen_role = "r";
};

struct Core {
    std::vector<std::vector<int>> s;  // s[l-1]
    Circuit c;
    std::vector<int> r, q;
    std::vector<std::vector<int>> w;  // w[l-1]
};

// Formula machinery of the QLP family. Levels 1..k-2 own s_l, level k-1 owns
// s_{k-1}, the gates, F and NF, level k owns every penalty. All rows sit in level k.
Core qlp_core(Builder& b, const Qbf& h, const CoreOpts& o) {
    int k = o.k;
    if (static_cast<int>(h.blocks.size()) != k - 1) throw std::invalid_argument("block count must be k - 1");
    Core core;
    std::vector<int> inputs(h.matrix.n, -1);
    for (int l = 1; l <= k - 1; ++l) {
        std::vector<int> sl;
        const auto& blk = h.blocks[l - 1];
        for (size_t j = 0; j < blk.size(); ++j) {
            int v;
            if (l == 1 && o.shared_s1) {
                v = o.shared_s1->at(j);
            } else {
                v = b.var(l, o.s_role + (k == 2 ? "" : std::to_string(l)) + o.sfx);
                b.box(k, v);
            }
            sl.push_back(v);
            inputs[blk[j] - 1] = v;
        }
        core.s.push_back(sl);
    }
    core.c = add_circuit(b, h.matrix, inputs, k - 1, k, o.gate_role, o.sfx);

    std::vector<int> judged = core.s[k - 2];
    judged.insert(judged.end(), core.c.gates.begin(), core.c.gates.end());
    judged.push_back(core.c.F);
    judged.push_back(core.c.NF);
    for (int x : judged) {
        int r = add_penalty(b, x, k, k, o.pen_role + o.sfx);
        b.obj(k, r, -1);
        b.obj(k - 1, r, o.c_pen);
        core.r.push_back(r);
    }
    core.w.resize(k - 2);
    for (int l = 1; l <= k - 2; ++l) {
        Terms agg;
        for (int x : core.s[l - 1]) {
            int w = add_penalty(b, x, k, k, "w" + std::to_string(l) + o.sfx);
            b.obj(k, w, -1);
            core.w[l - 1].push_back(w);
            agg.emplace_back(w, o.K);
        }
        int q = b.var(k, "q" + std::to_string(l) + o.sfx);
        b.box(k, q);
        agg.emplace_back(q, -1);
        b.ge(k, agg, 0);
        b.obj(k, q, -1);
        core.q.push_back(q);
    }
    auto skip = [&](int l) { return l < static_cast<int>(o.skip_obj.size()) && o.skip_obj[l]; };
    for (int l = 1; l <= k - 1; ++l) {
        if (skip(l)) continue;
        if (l == 1 && o.signed_value) b.obj(l, core.c.F, -1);
        else b.obj(l, l % 2 == 1 ? core.c.NF : core.c.F, 1);
        if (l <= k - 2) b.obj(l, core.q[l - 1], 2);
    }
    return core;
}

Qbf single_block(const Formula& f) {
    Qbf h;
    h.matrix = f;
    h.blocks.emplace_back();
    for (int v = 1; v <= f.n; ++v) h.blocks[0].push_back(v);
    return h;
}

GadgetInstance finish(const Builder& b, const std::vector<std::pair<int, int>>& weights, const std::string& name,
                      const std::string& source) {
    auto [inst, vm] = b.build();
    GadgetInstance g{inst, vm, name, source, {}, {}, false, false};
    if (!weights.empty()) {
        std::vector<int> lay = b.layout();
        std::vector<std::pair<int, int>> gw;
        for (auto [h, e] : weights) gw.emplace_back(lay[h], e);
        CompactResult cr = compact_powers(inst, gw, &vm);
        g.instance = cr.instance;
        g.varmap = cr.varmap;
    }
    return g;
}

// sum_{i} coef_i / 2^i on the listed handles at level 1.
void add_powers(Builder& b, const std::vector<int>& vars, int count, const Rat& sign) {
    for (int i = 1; i <= count; ++i) b.obj(1, vars[i - 1], sign / pow2(i));
}

// Pinned variable with value 1 owned by `level`.
int add_one(Builder& b, int level) {
    int one = b.var(level, "one");
    b.eq(level, {{one, 1}}, 1);
    b.box(level, one);
    return one;
}

}  // namespace

std::string qbf_sexpr(const Qbf& h) {
    std::ostringstream os;
    for (size_t l = 0; l < h.blocks.size(); ++l) {
        os << (l % 2 == 0 ? "(exists (" : "(forall (");
        for (size_t j = 0; j < h.blocks[l].size(); ++j) os << (j ? " " : "") << "v" << h.blocks[l][j];
        os << ") ";
    }
    os << to_sexpr(h.matrix) << std::string(h.blocks.size(), ')');
    return os.str();
}

GadgetInstance sat_to_blp(const Formula& f, const SatOptions& opt) {
    f.validate();
    Builder b(2);
    CoreOpts o;
    o.k = 2;
    o.c_pen = opt.c_pen;
    o.signed_value = opt.signed_value;
    o.gate_role = "u";
    o.pen_role = "v";
    qlp_core(b, single_block(f), o);
    GadgetInstance g = finish(b, {}, opt.signed_value ? "sat2blp-signed" : "sat2blp", to_sexpr(f));
    g.qbf = single_block(f);
    g.signed_value = opt.signed_value;
    return g;
}

GadgetInstance lexsat_to_blp(const Formula& f, bool compact) {
    f.validate();
    Builder b(2);
    CoreOpts o;
    o.k = 2;
    o.gate_role = "u";
    o.pen_role = "v";
    Core core = qlp_core(b, single_block(f), o);
    std::vector<int> g;
    for (int s : core.s[0]) {
        int gi = b.var(2, "g");
        b.ge(2, {{gi, 1}, {s, -2}}, -1);
        b.box(2, gi);
        b.obj(2, gi, 1);
        g.push_back(gi);
    }
    add_powers(b, g, f.n, Rat(-1));
    std::vector<std::pair<int, int>> weights;
    if (compact)
        for (int i = 1; i <= f.n; ++i) weights.emplace_back(g[i - 1], i);
    GadgetInstance out = finish(b, weights, compact ? "lexsat2blp-compact" : "lexsat2blp", to_sexpr(f));
    out.qbf = single_block(f);
    out.search = true;
    return out;
}

GadgetInstance qbf_to_klp(const Qbf& h, const QlpOptions& opt) {
    h.validate();
    int k = static_cast<int>(h.blocks.size()) + 1;
    if (k < 3) throw std::invalid_argument("qbf_to_klp needs at least 2 blocks (k >= 3)");
    Builder b(k);
    CoreOpts o;
    o.k = k;
    o.K = opt.level_penalty;
    o.signed_value = opt.signed_value;
    Core core = qlp_core(b, h, o);
    std::vector<std::pair<int, int>> weights;
    if (opt.search) {
        int n1 = static_cast<int>(core.s[0].size());
        add_powers(b, core.s[0], n1, Rat(-1));
        for (int i = 1; i <= n1; ++i) weights.emplace_back(core.s[0][i - 1], i);
    }
    std::string name = opt.search ? "qbf2klp-search" : opt.signed_value ? "qbf2klp-signed" : "qbf2klp";
    GadgetInstance g = finish(b, weights, name, qbf_sexpr(h));
    g.qbf = h;
    g.signed_value = opt.signed_value;
    g.search = opt.search;
    return g;
}

GadgetInstance example_nonattain(Example which) {
    if (which == Example::k4) {
        Builder b(4);
        int x1 = b.var(1, "x1", "x1"), x2 = b.var(2, "x2", "x2"), x3 = b.var(3, "x3", "x3"), x4 = b.var(4, "x4", "x4");
        b.box(1, x1);
        b.eq(2, {{x2, 1}}, 0);
        b.box(2, x2);
        b.box(3, x3);
        b.ge(4, {{x3, 1}, {x4, -1}}, 0);
        b.ge(4, {{x1, -1}, {x3, -1}, {x4, -1}}, -2);
        b.box(4, x4);
        b.obj(1, x3, 1);
        b.obj(1, x1, -1);
        b.obj(2, x3, -1);
        b.obj(3, x4, 1);
        b.obj(4, x4, -1);
        return finish(b, {}, "example-k4", "nonattainment example, four levels");
    }
    Builder b(3);
    int x1 = b.var(1, "x1", "x1"), x2 = b.var(2, "x2", "x2"), x3 = b.var(3, "x3", "x3");
    b.box(1, x1);
    b.ge(2, {{x1, 1}, {x2, -1}}, 0);
    b.eq(2, {{x3, 1}}, 0);
    b.box(2, x2);
    b.ge(3, {{x2, 1}, {x3, -1}}, 0);
    b.ge(3, {{x2, -1}, {x3, -1}}, -1);
    b.box(3, x3);
    b.obj(1, x2, 1);
    b.obj(1, x1, -1);
    b.obj(2, x2, -1);
    b.obj(3, x3, -1);
    return finish(b, {}, "example-k3", "nonattainment example, three levels");
}

GadgetInstance attain_gadget_k3(const Qbf& h) {
    h.validate();
    if (h.blocks.size() != 2) throw std::invalid_argument("attain_gadget_k3 needs exactly 2 blocks");
    Builder b(3);
    CoreOpts o;
    o.k = 3;
    Core core = qlp_core(b, h, o);
    const auto& s1 = core.s[0];
    int n1 = static_cast<int>(s1.size());
    int x1 = b.var(1, "x1", "x1"), x2 = b.var(2, "x2", "x2"), x3 = b.var(3, "x3", "x3"), y = b.var(3, "y", "y");
    int one = add_one(b, 3);
    b.box(1, x1);
    b.ge(2, {{x1, 1}, {x2, -1}}, 0);
    b.eq(2, {{x3, 1}}, 0);
    b.box(2, x2);
    b.ge(3, {{x2, 1}, {x3, -1}}, 0);
    b.ge(3, {{x2, -1}, {x3, -1}}, -1);
    b.box(3, x3);
    b.box(3, y);
    // 6 (y - 1/2) >= -s1_n and 6 (y - 1/2) >= x2 - x1 - 1 + F
    b.ge(3, {{y, 6}, {s1.back(), 1}}, 3);
    b.ge(3, {{y, 6}, {x2, -1}, {x1, 1}, {core.c.F, -1}}, 2);
    add_powers(b, s1, n1 - 1, Rat(-1));
    b.obj(1, y, Rat(6) / pow2(n1));
    b.obj(1, one, Rat(-3) / pow2(n1));
    b.obj(2, x2, -1);
    b.obj(3, x3, -1);
    std::vector<std::pair<int, int>> weights;
    for (int i = 1; i < n1; ++i) weights.emplace_back(s1[i - 1], i);
    weights.emplace_back(y, n1);
    weights.emplace_back(one, n1);
    GadgetInstance g = finish(b, weights, "attain3", qbf_sexpr(h));
    g.qbf = h;
    return g;
}

GadgetInstance sat_unsat_attain(const Formula& f1, const Formula& f2) {
    f1.validate();
    f2.validate();
    GadgetInstance g1 = sat_to_blp(f1, {3, true}), g2 = sat_to_blp(f2, {3, true});
    const MlpInstance &a = g1.instance, &c = g2.instance;
    Builder b(2);
    auto copy_vars = [&](const GadgetInstance& g, const std::string& sfx) {
        std::vector<int> h;
        for (const auto& vi : g.varmap.vars) h.push_back(b.var(vi.level, vi.role + sfx, vi.name + sfx));
        return h;
    };
    std::vector<int> h1 = copy_vars(g1, "^1"), h2 = copy_vars(g2, "^2");
    int sc = b.var(1, "scale", "scale");
    auto terms = [](const Vec& row, const std::vector<int>& h) {
        Terms t;
        for (int j = 0; j < row.size(); ++j)
            if (!row(j).is_zero()) t.emplace_back(h[j], row(j));
        return t;
    };
    // copy-1 objective <= -1
    Terms lk = terms(a.objective(1), h1);
    for (auto& [v, coef] : lk) coef = -coef;
    b.ge(1, lk, 1);
    for (int r = 0; r < a.m(2); ++r) b.ge(2, terms(a.row(2, r), h1), a.b(2)(r));
    for (int r = 0; r < c.m(2); ++r) {
        Terms t = terms(c.row(2, r), h2);
        if (!c.b(2)(r).is_zero()) t.emplace_back(sc, -c.b(2)(r));
        b.ge(2, t, 0);
    }
    auto objs = [&](const MlpInstance& in, const std::vector<int>& h, int from, int to) {
        Vec o = in.objective(from);
        for (int j = 0; j < o.size(); ++j)
            if (!o(j).is_zero()) b.obj(to, h[j], o(j));
    };
    objs(a, h1, 2, 2);
    objs(c, h2, 2, 2);
    objs(c, h2, 1, 1);
    GadgetInstance g = finish(b, {}, "satunsat", to_sexpr(f1) + " ; " + to_sexpr(f2));
    g.qbf = single_block(f1);
    g.second = f2;
    return g;
}

GadgetInstance pi_feasibility_gadget(const Qbf& h) {
    QlpOptions qo;
    qo.signed_value = true;
    GadgetInstance inner = qbf_to_klp(h, qo);
    const MlpInstance& in = inner.instance;
    int k = in.k();
    Builder b(k + 1);
    std::vector<int> hv;
    for (const auto& vi : inner.varmap.vars) hv.push_back(b.var(vi.level + 1, vi.role, vi.name));
    int sc = b.var(2, "scale", "scale");
    b.ge(2, {{sc, 1}}, 1);
    for (int l = 1; l <= k; ++l) {
        for (int r = 0; r < in.m(l); ++r) {
            Vec row = in.row(l, r);
            Terms t;
            for (int j = 0; j < row.size(); ++j)
                if (!row(j).is_zero()) t.emplace_back(hv[j], row(j));
            if (!in.b(l)(r).is_zero()) t.emplace_back(sc, -in.b(l)(r));
            b.ge(l + 1, t, 0);
        }
        Vec o = in.objective(l);
        for (int j = 0; j < o.size(); ++j)
            if (!o(j).is_zero()) b.obj(l + 1, hv[j], o(j));
    }
    GadgetInstance g = finish(b, {}, "pifeas", qbf_sexpr(h));
    g.qbf = h;
    return g;
}

GadgetInstance feas_gadget_k5(const Qbf& h, Feas5Part part) {
    h.validate();
    if (h.blocks.size() != 4) throw std::invalid_argument("feas_gadget_k5 needs exactly 4 blocks");
    Builder b(5);
    std::vector<int> s1;
    for (size_t j = 0; j < h.blocks[0].size(); ++j) {
        int v = b.var(1, "s1");
        b.box(5, v);
        s1.push_back(v);
    }
    auto copy = [&](bool two) {
        std::string sfx = two ? "'" : "";
        CoreOpts o;
        o.k = 5;
        o.shared_s1 = &s1;
        o.skip_obj = {0, 0, 1, 0, 0, 0};
        o.sfx = sfx;
        Core core = qlp_core(b, h, o);
        int x1 = b.var(2, "x1" + sfx), y = b.var(2, "y" + sfx), x2 = b.var(3, "x2" + sfx), x3 = b.var(4, "x3" + sfx),
            x4 = b.var(5, "x4" + sfx);
        b.box(2, x1);
        b.box(2, y);
        b.eq(3, {{x2, 1}}, 0);
        b.box(3, x2);
        b.box(4, x3);
        b.ge(5, {{x3, 1}, {x4, -1}}, 0);
        b.ge(5, {{x1, -1}, {x3, -1}, {x4, -1}}, -2);
        b.box(5, x4);
        if (!two) {
            b.ge(2, {{y, 6}}, 2);
            b.ge(2, {{y, 6}, {x3, -1}, {x1, 1}, {core.q[0], -1}}, 2);
        } else {
            b.ge(2, {{y, 6}, {core.c.F, -1}, {core.q[1], -2}}, 2);
            b.ge(2, {{y, 6}, {x3, -1}, {x1, 1}}, 3);
        }
        b.obj(2, y, 6);
        b.obj(3, x3, -1);
        b.obj(4, x4, 1);
        b.obj(5, x4, -1);
    };
    if (part != Feas5Part::two) copy(false);
    if (part != Feas5Part::one) copy(true);
    const char* name = part == Feas5Part::both ? "feas5" : part == Feas5Part::one ? "feas5-one" : "feas5-two";
    GadgetInstance g = finish(b, {}, name, qbf_sexpr(h));
    g.qbf = h;
    return g;
}

}  // namespace mlp
