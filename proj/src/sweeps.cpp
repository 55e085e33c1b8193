#include "mlp/sweeps.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>

#include "mlp/certificates.hpp"
#include "mlp/gadgets.hpp"
#include "mlp/solver.hpp"
#include "mlp/transforms.hpp"
#include "mlp/valuesearch.hpp"

namespace mlp {

void SweepResult::check(bool c, const std::string& what) {
    ++total;
    if (c) ++passed;
    else if (failures.size() < 8) failures.push_back(what);
}

std::string SweepResult::summary() const {
    return std::string(ok() ? "PASS " : "FAIL ") + std::to_string(passed) + "/" + std::to_string(total);
}

namespace {

int uni(Rng& r, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(r); }

SweepResult timed(const std::string& name, const std::function<void(SweepResult&)>& body) {
    SweepResult r;
    r.name = name;
    auto t0 = std::chrono::steady_clock::now();
    body(r);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

int pick(int v, int dflt) { return v < 0 ? dflt : v; }

KlevelOptions kopts(const SweepOptions& o) {
    KlevelOptions ko;
    ko.binary_vars_cap = o.cap_vars;
    return ko;
}

Rat weighted(const Assignment& m) {
    Rat s = 0;
    for (size_t i = 0; i < m.size(); ++i)
        if (m[i]) s += pow2(-static_cast<long>(i + 1));
    return s;
}

std::string outcome_str(const SolveOutcome& s) {
    std::string a = s.attainment == Attainment::Attained ? "attained"
                    : s.attainment == Attainment::NotAttained ? "not-attained"
                                                              : "unknown";
    return s.str() + (s.finite() ? " " + a : "");
}

// Exact value of a k <= 3 instance: bilevel solve, or binary enumeration for k = 3.
SolveOutcome solve_small(const MlpInstance& inst, const SweepOptions& o, const Rat& enum_scale = Rat(1)) {
    if (inst.k() == 2) return bilevel_solve(inst);
    KlevelOptions ko = kopts(o);
    ko.enum_scale = enum_scale;
    return klevel_verify(inst, ko);
}

LpResult solve_single(const MlpInstance& inst) {
    LpProblem p(inst.n_total());
    for (int r = 0; r < inst.m(1); ++r) p.ge(sparse(inst.row(1, r)), inst.b(1)(r));
    Vec c = inst.objective(1);
    p.obj.assign(c.begin(), c.end());
    return lp_solve(p);
}

bool same_outcome(const SolveOutcome& a, const SolveOutcome& b, const Rat& scale = Rat(1)) {
    if (a.finite() != b.finite()) return false;
    if (!a.finite()) return a.status == b.status;
    return a.value * scale == b.value;
}

}  // namespace

// ---- generators ----

Formula random_cnf(Rng& rng, int n, int max_clauses, int max_len) {
    std::vector<std::vector<int>> cls;
    int m = uni(rng, 1, max_clauses);
    std::vector<int> vars(n);
    std::iota(vars.begin(), vars.end(), 1);
    for (int i = 0; i < m; ++i) {
        int len = uni(rng, 1, std::min(max_len, n));
        std::shuffle(vars.begin(), vars.end(), rng);
        std::vector<int> c;
        for (int j = 0; j < len; ++j) c.push_back(uni(rng, 0, 1) ? vars[j] : -vars[j]);
        cls.push_back(c);
    }
    return cnf_formula(n, cls);
}

Qbf random_qbf(Rng& rng, const std::vector<int>& block_sizes, int max_clauses, int max_len) {
    Qbf h;
    int n = 0;
    for (int s : block_sizes) {
        std::vector<int> blk;
        for (int j = 0; j < s; ++j) blk.push_back(++n);
        h.blocks.push_back(blk);
    }
    h.matrix = random_cnf(rng, n, max_clauses, max_len);
    return h;
}

std::vector<Formula> ast_family(int max_gates) {
    struct T {
        char op;
        int var, a, b;
        std::string key;
    };
    std::vector<T> pool;
    std::vector<std::vector<int>> by(max_gates + 1);
    for (int v = 1; v <= 3; ++v) {
        pool.push_back({'v', v, -1, -1, "v" + std::to_string(v)});
        by[0].push_back(static_cast<int>(pool.size()) - 1);
    }
    for (int g = 1; g <= max_gates; ++g) {
        for (int t : by[g - 1]) {
            if (pool[t].op == 'n') continue;
            pool.push_back({'n', 0, t, -1, "(not " + pool[t].key + ")"});
            by[g].push_back(static_cast<int>(pool.size()) - 1);
        }
        for (int ga = 0; ga < g; ++ga)
            for (int l : by[ga])
                for (int r : by[g - 1 - ga]) {
                    if (!(pool[l].key < pool[r].key)) continue;
                    for (char op : {'a', 'o'}) {
                        std::string k = std::string(op == 'a' ? "(and " : "(or ") + pool[l].key + " " + pool[r].key + ")";
                        pool.push_back({op, 0, l, r, k});
                        by[g].push_back(static_cast<int>(pool.size()) - 1);
                    }
                }
    }
    std::vector<Formula> out;
    for (const auto& level : by)
        for (int t : level) {
            std::vector<int> seen;
            std::function<void(int)> walk = [&](int i) {
                if (pool[i].op == 'v') {
                    if (std::find(seen.begin(), seen.end(), pool[i].var) == seen.end()) seen.push_back(pool[i].var);
                    return;
                }
                walk(pool[i].a);
                if (pool[i].b >= 0) walk(pool[i].b);
            };
            walk(t);
            bool canon = true;
            for (size_t j = 0; j < seen.size(); ++j) canon = canon && seen[j] == static_cast<int>(j + 1);
            if (!canon) continue;
            Formula f;
            std::function<int(int)> emit = [&](int i) -> int {
                const T& x = pool[i];
                if (x.op == 'v') return f.leaf(x.var);
                if (x.op == 'n') return f.neg(emit(x.a));
                int a = emit(x.a), b = emit(x.b);
                return x.op == 'a' ? f.conj(a, b) : f.disj(a, b);
            };
            f.root = emit(t);
            f.n = static_cast<int>(seen.size());
            out.push_back(std::move(f));
        }
    return out;
}

Formula truth_table_cnf(int n, uint32_t table) {
    std::vector<std::vector<int>> cls;
    for (uint32_t r = 0; r < (1u << n); ++r) {
        if ((table >> r) & 1u) continue;
        std::vector<int> c;
        for (int i = 1; i <= n; ++i) c.push_back(((r >> (n - i)) & 1u) ? -i : i);
        cls.push_back(c);
    }
    return cnf_formula(n, cls);
}

MlpInstance random_instance(Rng& rng, const RandomShape& s) {
    Builder b(s.k);
    std::vector<std::vector<int>> lv(s.k + 1);
    for (int l = 1; l <= s.k; ++l) {
        int n = uni(rng, 1, s.max_n);
        for (int j = 0; j < n; ++j) lv[l].push_back(b.var(l, "x" + std::to_string(l)));
    }
    auto coef = [&] { return Rat(uni(rng, -s.coef, s.coef)); };
    auto row_over = [&](int upto) {
        Terms t;
        for (int l = 1; l <= upto; ++l)
            for (int v : lv[l]) {
                Rat c = coef();
                if (!c.is_zero()) t.emplace_back(v, c);
            }
        return t;
    };
    for (int l = 1; l <= s.k; ++l)
        for (int v : lv[l]) {
            if (!s.box_last) continue;
            if (l == s.k && !s.box_follower) {
                b.ge(s.k, {{v, 1}}, 0);
                continue;
            }
            b.box(s.k, v);
        }
    for (int l = 1; l < s.k; ++l) {
        int m = uni(rng, 0, s.upper_rows);
        for (int r = 0; r < m; ++r) {
            Terms t = row_over(l);
            if (!t.empty()) b.ge(l, t, Rat(uni(rng, -2, 0)));
        }
    }
    int m = uni(rng, 1, s.max_rows);
    for (int r = 0; r < m; ++r) {
        Terms t = row_over(s.k);
        if (!t.empty()) b.ge(s.k, t, Rat(uni(rng, -2, 1)));
    }
    for (int l = 1; l <= s.k; ++l)
        for (int i = l; i <= s.k; ++i)
            for (int v : lv[i]) b.obj(l, v, coef());
    return b.build().first;
}

// ---- families ----

std::vector<Formula> satblp_family(const SweepOptions& o) {
    std::vector<Formula> fam = ast_family(4);
    Rng rng(o.seed);
    int nmax = pick(o.n, 8), trials = pick(o.trials, 200);
    for (int t = 0; t < trials; ++t) fam.push_back(random_cnf(rng, uni(rng, 1, nmax), 12));
    return fam;
}

std::vector<Formula> lexsat_family(const SweepOptions& o, bool sat) {
    Rng rng(o.seed + (sat ? 101 : 202));
    // default 120 = 100 satisfiable + 20 unsatisfiable
    int total = pick(o.trials, 120), nmax = pick(o.n, 8);
    int trials = sat ? total - total / 6 : total / 6;
    std::vector<Formula> fam;
    while (static_cast<int>(fam.size()) < trials) {
        int n = uni(rng, 1, nmax);
        Formula f = sat ? random_cnf(rng, n, 12) : random_cnf(rng, n, 12, 2);
        if (lexmax_sat(f).has_value() == sat) fam.push_back(std::move(f));
    }
    return fam;
}

std::vector<Formula> compact_family(const SweepOptions& o) {
    Rng rng(o.seed + 303);
    int nmax = pick(o.n, 5), trials = pick(o.trials, 50);
    std::vector<Formula> fam;
    for (int t = 0; t < trials; ++t) fam.push_back(random_cnf(rng, uni(rng, 1, nmax), 8));
    return fam;
}

std::vector<Qbf> qlp_family(const SweepOptions& o) {
    std::vector<Qbf> fam;
    for (uint32_t tt = 0; tt < 16; ++tt) {
        Qbf h;
        h.blocks = {{1}, {2}};
        h.matrix = truth_table_cnf(2, tt);
        fam.push_back(h);
    }
    // two clauses, each joining one literal of block 1 with one of block 2
    std::vector<std::vector<int>> cl;
    for (int a : {1, -1, 2, -2})
        for (int b : {3, -3, 4, -4}) cl.push_back({a, b});
    for (size_t i = 0; i < cl.size(); ++i)
        for (size_t j = i; j < cl.size(); ++j) {
            Qbf h;
            h.blocks = {{1, 2}, {3, 4}};
            h.matrix = cnf_formula(4, {cl[i], cl[j]});
            fam.push_back(h);
        }
    Rng rng(o.seed + 404);
    int trials = pick(o.trials, 50), nmax = pick(o.n, 3);
    for (int t = 0; t < trials; ++t) fam.push_back(random_qbf(rng, {uni(rng, 1, nmax), uni(rng, 1, nmax)}, 6));
    return fam;
}

// ---- suites ----

SweepResult verify_satblp(const SweepOptions& o) {
    return timed("satblp", [&](SweepResult& r) {
        int nsat = 0;
        for (const Formula& f : satblp_family(o)) {
            GadgetInstance g = sat_to_blp(f);
            ConditionReport cr = check_conditions(g.instance);
            bool sat = lexmax_sat(f).has_value();
            nsat += sat;
            SolveOutcome s = bilevel_solve(g.instance);
            r.check(cr.c1 && cr.c2 && s.status == Status::Attained && s.value == Rat(sat ? 0 : 1),
                    to_sexpr(f) + " -> " + s.str());
        }
        r.notes.push_back(std::to_string(nsat) + " satisfiable, " + std::to_string(r.total - nsat) + " unsatisfiable");
    });
}

SweepResult verify_lexsat(const SweepOptions& o) {
    return timed("lexsat", [&](SweepResult& r) {
        for (const Formula& f : lexsat_family(o, true)) {
            GadgetInstance g = lexsat_to_blp(f, false);
            SolveOutcome s = bilevel_solve(g.instance);
            Assignment m = *lexmax_sat(f);
            bool ok = s.status == Status::Attained && s.value == -weighted(m);
            if (ok) {
                Vec z = s.witness.flat();
                std::vector<int> sv = g.varmap.role("s");
                for (size_t i = 0; i < sv.size(); ++i) ok = ok && z(sv[i]) == Rat(m[i]);
            }
            r.check(ok, to_sexpr(f) + " -> " + s.str());
        }
        for (const Formula& f : lexsat_family(o, false)) {
            SolveOutcome s = bilevel_solve(lexsat_to_blp(f, false).instance);
            r.check(s.status == Status::Attained && s.value == pow2(-f.n), to_sexpr(f) + " (unsat) -> " + s.str());
        }
    });
}

SweepResult verify_compact(const SweepOptions& o) {
    return timed("compact", [&](SweepResult& r) {
        for (const Formula& f : compact_family(o)) {
            GadgetInstance c = lexsat_to_blp(f, true);
            ConditionReport cr = check_conditions(c.instance);
            SolveOutcome a = bilevel_solve(lexsat_to_blp(f, false).instance), b = bilevel_solve(c.instance);
            r.check(cr.c1 && cr.c2 && cr.c3 && a.status == Status::Attained && b.status == Status::Attained &&
                        a.value == b.value,
                    to_sexpr(f) + " " + cr.summary() + " " + a.str() + " vs " + b.str());
        }
    });
}

SweepResult verify_qlp(const SweepOptions& o) {
    return timed("qlp", [&](SweepResult& r) {
        for (const Qbf& h : qlp_family(o)) {
            bool truth = qbf_truth(h);
            SolveOutcome s = klevel_verify(qbf_to_klp(h).instance, kopts(o));
            r.check(s.finite() && s.value == Rat(truth ? 0 : 1), qbf_sexpr(h) + " -> " + s.str());
            QlpOptions qo;
            qo.search = true;
            SolveOutcome t = klevel_verify(qbf_to_klp(h, qo).instance, kopts(o));
            auto m = qbf_lexmax(h);
            Rat want = m ? -weighted(*m) : pow2(-static_cast<long>(h.blocks[0].size()));
            r.check(t.finite() && t.value == want, qbf_sexpr(h) + " search -> " + t.str() + " want " + want.str());
        }
    });
}

SweepResult verify_penalty(const SweepOptions& o) {
    return timed("penalty", [&](SweepResult& r) {
        Rng rng(o.seed + 505);
        int gadgets = pick(o.trials, 10);
        std::vector<std::vector<Rat>> grid;
        const Rat vals[5] = {Rat(0), Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1)};
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b)
                for (int c = 0; c < 5; ++c) {
                    std::vector<Rat> p{vals[a], vals[b], vals[c]};
                    bool binary = std::all_of(p.begin(), p.end(), [](const Rat& x) { return x.is_integer(); });
                    if (!binary) grid.push_back(p);
                }
        for (int t = 0; t < gadgets; ++t) {
            Qbf h = random_qbf(rng, {3, uni(rng, 1, 2)}, 5);
            GadgetInstance g = qbf_to_klp(h);
            int q1 = g.varmap.role("q1").at(0);
            std::shuffle(grid.begin(), grid.end(), rng);
            for (int i = 0; i < 50; ++i) {
                Vec u(3);
                for (int j = 0; j < 3; ++j) u(j) = grid[i][j];
                auto range = range_on_bottom_optima(g.instance, u, q1);
                r.check(range && range->first == Rat(1) && range->second == Rat(1),
                        qbf_sexpr(h) + " at (" + u(0).str() + "," + u(1).str() + "," + u(2).str() + ")");
            }
        }
    });
}

SweepResult verify_examples(const SweepOptions& o) {
    return timed("examples", [&](SweepResult& r) {
        for (Example w : {Example::k3, Example::k4}) {
            GadgetInstance g = example_nonattain(w);
            CertOptions co;
            co.klevel = kopts(o);
            co.param = g.varmap.at("x1");
            CertReport rep = attainment_certificate(g.instance, co);
            const SolveOutcome& s = rep.outcome;
            r.check(s.status == Status::FiniteValue && s.value == Rat(-1) && s.attainment == Attainment::NotAttained,
                    g.gadget + " -> " + outcome_str(s));
            r.check(rep.tests > 0 && rep.passed == rep.tests, g.gadget + " value <= -1 test not infeasible everywhere");
            for (int j = 1; j <= 10; ++j) {
                Rat beta = pow2(j);
                Vec u = zeros(g.instance.offset(g.instance.k() - 1));
                u(co.param) = Rat(1) - Rat(1) / beta;
                auto lv = g.instance.k() == 3 ? klevel_evaluate(g.instance, u) : klevel_lex(g.instance, 2, u);
                bool ok = lv && lv->v.back() && *lv->v.back() == Rat(-1) + Rat(1) / beta &&
                          satisfies_rows(g.instance, Point::from_flat(g.instance, lv->z));
                r.check(ok, g.gadget + " witness at beta = " + beta.str());
            }
        }
    });
}

SweepResult verify_attain(const SweepOptions& o) {
    return timed("attain", [&](SweepResult& r) {
        Rng rng(o.seed + 606);
        int trials = pick(o.trials, 30);
        int counts[3] = {0, 0, 0};
        for (int t = 0; t < trials; ++t) {
            int want_case = t % 3;  // 0 false, 1 true with last bit 0, 2 true with last bit 1
            Qbf h;
            for (int attempt = 0;; ++attempt) {
                h = random_qbf(rng, {uni(rng, 1, 2), uni(rng, 1, 2)}, 4);
                auto m = qbf_lexmax(h);
                int c = !m ? 0 : m->back() == 0 ? 1 : 2;
                if (c == want_case || attempt > 2000) break;
            }
            auto m = qbf_lexmax(h);
            int c = !m ? 0 : m->back() == 0 ? 1 : 2;
            ++counts[c];
            GadgetInstance g = attain_gadget_k3(h);
            CertOptions co;
            co.klevel = kopts(o);
            co.param = g.varmap.at("x1");
            const SolveOutcome s = attainment_certificate(g.instance, co).outcome;
            Rat want = m ? -weighted(*m) : pow2(-static_cast<long>(h.blocks[0].size()));
            bool attained_expected = !(m && m->back() == 1);
            bool ok = s.finite() && s.value == want &&
                      (attained_expected ? s.attainment == Attainment::Attained
                                         : s.attainment == Attainment::NotAttained);
            r.check(ok, qbf_sexpr(h) + " -> " + outcome_str(s) + " want " + want.str() +
                            (attained_expected ? " attained" : " not-attained"));
        }
        r.notes.push_back("cases: " + std::to_string(counts[0]) + " false, " + std::to_string(counts[1]) +
                          " true/last bit 0, " + std::to_string(counts[2]) + " true/last bit 1");
    });
}

SweepResult verify_satunsat(const SweepOptions&) {
    return timed("satunsat", [&](SweepResult& r) {
        std::vector<Formula> pool = {cnf_formula(1, {{1}}), cnf_formula(2, {{1, 2}, {-1}}), cnf_formula(1, {{1}, {-1}}),
                                     cnf_formula(2, {{1}, {-1, 2}, {-2}})};
        bool seen[2][2] = {{false, false}, {false, false}};
        for (const Formula& f1 : pool)
            for (const Formula& f2 : pool) {
                bool s1 = lexmax_sat(f1).has_value(), s2 = lexmax_sat(f2).has_value();
                seen[s1][s2] = true;
                SolveOutcome s = bilevel_solve(sat_unsat_attain(f1, f2).instance);
                Status want = !s1 ? Status::Infeasible : s2 ? Status::Unbounded : Status::Attained;
                r.check(s.status == want && (s.status == Status::Attained) == (s1 && !s2),
                        to_sexpr(f1) + " ; " + to_sexpr(f2) + " -> " + s.str());
            }
        r.check(seen[0][0] && seen[0][1] && seen[1][0] && seen[1][1], "all four (sat, unsat) combinations realized");
    });
}

namespace {

SolveOutcome feas_part(const GadgetInstance& g, const Rat& s1, bool two, const SweepOptions& o) {
    Vec l1(1);
    l1(0) = s1;
    Varmap vm;
    auto res = restrict_top(g.instance, l1, &g.varmap, &vm);
    if (!res) throw std::runtime_error("level-1 rows violated");
    CertOptions co;
    co.klevel = kopts(o);
    co.param = vm.role(two ? "x1'" : "x1").at(0);
    co.sunk = {vm.role(two ? "y'" : "y").at(0)};
    return attainment_certificate(res->instance, co).outcome;
}

}  // namespace

SweepResult verify_feas(const SweepOptions& o) {
    return timed("feas", [&](SweepResult& r) {
        Rng rng(o.seed + 707);
        int trials = pick(o.trials, 10), ntrue = 0;
        for (int t = 0; t < trials; ++t) {
            Qbf h;
            for (int attempt = 0;; ++attempt) {
                h = random_qbf(rng, {1, 1, 1, 1}, 3);
                if (qbf_truth(h) == (t % 2 == 0) || attempt > 200) break;
            }
            bool truth = qbf_truth(h);
            ntrue += truth;
            GadgetInstance one = feas_gadget_k5(h, Feas5Part::one), two = feas_gadget_k5(h, Feas5Part::two);
            bool feasible = false;
            for (int s = 0; s <= 1; ++s) {
                bool ht = qbf_truth_fixed(h, {{s}});
                SolveOutcome a = feas_part(one, Rat(s), false, o), b = feas_part(two, Rat(s), true, o);
                bool a_in = a.attainment == Attainment::Attained, b_in = b.attainment == Attainment::Attained;
                bool b_out = b.attainment == Attainment::NotAttained || b.status == Status::Infeasible;
                std::string tag = qbf_sexpr(h) + " s1=" + std::to_string(s);
                if (ht) r.check(a_in && b_in, tag + ": both S nonempty (" + outcome_str(a) + "; " + outcome_str(b) + ")");
                else r.check(b_out, tag + ": second S empty (" + outcome_str(b) + ")");
                feasible = feasible || (a_in && b_in);
            }
            for (const Rat& s : {Rat(1, 4), Rat(1, 2), Rat(3, 4)}) {
                SolveOutcome a = feas_part(one, s, false, o);
                r.check(a.attainment == Attainment::NotAttained || a.status == Status::Infeasible,
                        qbf_sexpr(h) + " s1=" + s.str() + ": first S empty (" + outcome_str(a) + ")");
            }
            r.check(feasible == truth, qbf_sexpr(h) + ": feasibility " + std::to_string(feasible));
        }
        r.notes.push_back(std::to_string(ntrue) + " true, " + std::to_string(trials - ntrue) + " false");
    });
}

SweepResult verify_pifeas(const SweepOptions& o) {
    return timed("pifeas", [&](SweepResult& r) {
        Rng rng(o.seed + 808);
        int trials = pick(o.trials, 6);
        for (int t = 0; t < trials; ++t) {
            Qbf h = random_qbf(rng, {1, 1}, 3);
            bool truth = qbf_truth(h);
            GadgetInstance g = pi_feasibility_gadget(h);
            std::optional<Rat> v1;
            for (int lam = 1; lam <= 3; ++lam) {
                KlevelOptions ko;
                ko.enum_scale = lam;
                Vec up = zeros(g.instance.offset(g.instance.k() - 1));
                auto lv = klevel_lex(g.instance, 2, up, ko);
                bool ok = lv && lv->v[0];
                if (ok && lam == 1) v1 = *lv->v[0];
                ok = ok && v1 && *lv->v[0] == Rat(lam) * *v1;
                r.check(ok, qbf_sexpr(h) + " scale " + std::to_string(lam));
            }
            // value -1 at scale 1 means the scaled values run to -infinity: no optimum, infeasible
            r.check(v1 && (*v1 == Rat(truth ? -1 : 0)), qbf_sexpr(h) + " value at scale 1");
        }
    });
}

SweepResult verify_transforms(const SweepOptions& o) {
    return timed("transforms", [&](SweepResult& r) {
        Rng rng(o.seed + 909);
        int trials = pick(o.trials, 100);
        long fwd = 0, scl = 0, comp = 0, bin = 0;
        for (int t = 0; t < trials; ++t) {
            RandomShape s;
            s.k = uni(rng, 2, 3);
            s.upper_rows = 2;
            MlpInstance inst = random_instance(rng, s);
            SolveOutcome a = solve_small(inst, o), b = solve_small(forward_constraints(inst), o);
            r.check(same_outcome(a, b), "forward_constraints changed " + outcome_str(a) + " to " + outcome_str(b));
            if (inst.k() == 2) {
                // branch and bound against the full piece enumeration
                SolveOutcome e = bilevel_solve_enum(Bilevel::from(inst), o.cap_rows);
                r.check(same_outcome(a, e), "bilevel_solve " + outcome_str(a) + " vs enumeration " + outcome_str(e));
            }
            ++fwd;
        }
        const Rat lambdas[3] = {Rat(1, 2), Rat(2), Rat(3)};
        for (int t = 0; t < trials; ++t) {
            RandomShape s;
            s.k = uni(rng, 2, 3);
            MlpInstance inst = random_instance(rng, s);
            Rat lam = lambdas[t % 3];
            MlpInstance sc = scale_rhs(inst, lam);
            SolveOutcome a = solve_small(inst, o), b = solve_small(sc, o, lam);
            bool ok = same_outcome(a, b, lam);
            if (ok && a.finite() && inst.k() == 2) {
                Vec z = a.witness.flat();
                ok = bilevel_feasible(Bilevel::from(sc), z * lam);
            }
            r.check(ok, "scale_rhs by " + lam.str() + ": " + outcome_str(a) + " vs " + outcome_str(b));
            ++scl;
        }
        for (int t = 0; t < trials; ++t) {
            RandomShape s;
            s.k = 2;
            s.box_follower = uni(rng, 0, 2) != 0;
            s.max_rows = 3;
            MlpInstance inst = random_instance(rng, s);
            BilevelOptions feas;
            feas.feasibility_only = true;
            bool feasible = bilevel_solve(inst, feas).status != Status::Infeasible;
            LpResult c = solve_single(t_companion(inst, Companion::T2));
            r.check(feasible == (c.status == LpStatus::Optimal), "t_companion: feasible " + std::to_string(feasible));
            ++comp;
        }
        for (int t = 0; t < std::max(1, trials * 3 / 10); ++t) {
            RandomShape s;
            s.k = 2;
            MlpInstance inst = random_instance(rng, s);
            int n1 = inst.n(1);
            std::vector<int> xs(n1);
            std::iota(xs.begin(), xs.end(), 0);
            MlpInstance lift = binarize_lift(inst, xs);
            // binary enumeration oracle on the original
            std::optional<Rat> best;
            for (int mask = 0; mask < (1 << n1); ++mask) {
                Bilevel bl = Bilevel::from(inst);
                for (int j = 0; j < n1; ++j) bl.upper.push_back({{{j, Rat(1)}}, Rat((mask >> j) & 1), true});
                SolveOutcome so = bilevel_solve(bl);
                if (so.finite() && (!best || so.value < *best)) best = so.value;
            }
            SolveOutcome lv = klevel_verify(lift, kopts(o));
            bool ok = best ? lv.finite() && lv.value == *best : lv.status == Status::Infeasible;
            Vec half = zeros(n1);
            half(0) = Rat(1, 2);
            ok = ok && !klevel_evaluate(lift, half).has_value();
            r.check(ok, "binarize_lift: " + outcome_str(lv) + " vs " + (best ? best->str() : "INFEASIBLE"));
            ++bin;
        }
        r.notes.push_back(std::to_string(fwd) + " forward, " + std::to_string(scl) + " scale, " + std::to_string(comp) +
                          " companion, " + std::to_string(bin) + " binarize");
    });
}

SweepResult verify_sensitivity(const SweepOptions& o) {
    return timed("sensitivity", [&](SweepResult& r) {
        Rng rng(o.seed + 1010);
        int trials = pick(o.trials, 100), skipped = 0, moved = 0;
        // draw until `trials` pairs have two finite values
        for (int attempt = 0; r.total < trials && attempt < 50 * trials; ++attempt) {
            RandomShape s;
            s.k = 2;
            s.max_rows = 3;
            MlpInstance inst = random_instance(rng, s);
            Vec b1 = inst.b(2), b2 = b1;
            for (int i = 0; i < b2.size(); ++i) b2(i) += Rat(uni(rng, -2, 2), 2);
            SensitivityReport rep = sensitivity_check(inst, b1, b2);
            if (!rep.finite) {
                ++skipped;
                continue;
            }
            moved += rep.lhs.sign() != 0;
            r.check(rep.holds, "|" + rep.v1.str() + " - " + rep.v2.str() + "| > " + rep.bound.str());
        }
        r.notes.push_back(std::to_string(moved) + " pairs with different values, " + std::to_string(skipped) +
                          " draws without two finite values skipped");
    });
}

SweepResult verify_valuesearch(const SweepOptions& o) {
    return timed("valuesearch", [&](SweepResult& r) {
        r.check(reconstruct_rational(Rat(2), Rat(2), 8) == Rat(2), "[2,2] -> 2");
        r.check(reconstruct_rational(Rat(4285, 10000), Rat(4286, 10000), 10) == Rat(3, 7), "-> 3/7");
        r.check(reconstruct_rational(Rat(333, 1000), Rat(334, 1000), 8) == Rat(1, 3), "-> 1/3");
        for (const Rat& v : {Rat(0), Rat(-1)}) {
            DecisionOracle orc;
            orc.le = [v](const Rat& t) { return !(t < v); };
            r.check(binary_search_value(orc, 4).outcome.value == v, "planted " + v.str() + " at phi 4");
        }
        Rng rng(o.seed + 1111);
        const long phi = 64;
        long maxq = 0;
        int trials = pick(o.trials, 1000);
        for (int t = 0; t < trials; ++t) {
            int tot = uni(rng, 2, static_cast<int>(phi) - 1);
            int bq = uni(rng, 1, tot - 1), bp = tot - bq;
            auto rnd = [&](int bits) {
                mpz_class x = mpz_class(1) << (bits - 1);
                for (int i = 0; i < bits - 1; ++i)
                    if (uni(rng, 0, 1)) x += mpz_class(1) << i;
                return x;
            };
            mpz_class p = rnd(bp), q = rnd(bq);
            if (uni(rng, 0, 1)) p = -p;
            if (t % 97 == 0) p = 0;
            Rat v{mpq_class(p, q)};
            while (encoding_size(v) > phi) v = v / Rat(2);
            DecisionOracle orc;
            orc.le = [&v](const Rat& x) { return !(x < v); };
            ValueSearch vs = binary_search_value(orc, phi);
            maxq = std::max(maxq, vs.queries);
            r.check(vs.outcome.value == v && vs.queries <= 2 * phi + 4,
                    "planted " + v.str() + " got " + vs.outcome.value.str() + " in " + std::to_string(vs.queries));
        }
        r.notes.push_back("max queries " + std::to_string(maxq) + " (budget " + std::to_string(2 * phi + 4) + ")");
    });
}

SweepResult verify_oracles(const SweepOptions& o) {
    return timed("oracles", [&](SweepResult& r) {
        long searches = 0;
        auto agree = [&](const GadgetInstance& g, int n, bool search) {
            DecisionOracle a = oracle_from_solver(g.instance), b = oracle_from_gadget(g);
            GadgetValue pv = predicted_value(g);
            std::string tag = g.gadget + " " + g.source;
            bool ok = a.infeasible() == b.infeasible() && a.unbounded() == b.unbounded();
            if (ok && pv.status != Status::Infeasible && pv.status != Status::Unbounded) {
                Rat d = pow2(-(n + 2));
                for (const Rat& t : {pv.value - d, pv.value, pv.value + d, Rat(-1), Rat(0), Rat(1)})
                    ok = ok && a.le(t) == b.le(t);
            }
            if (ok && search) {
                long phi = 2 * n + 8;
                ValueSearch va = binary_search_value(a, phi), vb = binary_search_value(b, phi);
                ok = va.outcome.value == pv.value && vb.outcome.value == pv.value;
                ++searches;
            }
            r.check(ok, tag);
        };
        int idx = 0;
        for (const Formula& f : satblp_family(o)) agree(sat_to_blp(f), f.n, idx++ % 25 == 0);
        for (bool sat : {true, false})
            for (const Formula& f : lexsat_family(o, sat)) agree(lexsat_to_blp(f, false), f.n, idx++ % 5 == 0);
        for (const Formula& f : compact_family(o)) agree(lexsat_to_blp(f, true), f.n, idx++ % 5 == 0);
        for (const Qbf& h : qlp_family(o)) {
            int n = h.total_vars();
            agree(qbf_to_klp(h), n, false);
            QlpOptions qo;
            qo.search = true;
            agree(qbf_to_klp(h, qo), n, idx++ % 5 == 0);
        }
        r.notes.push_back(std::to_string(searches) + " full value searches with both oracles");
    });
}

}  // namespace mlp
