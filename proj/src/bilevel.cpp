#include <algorithm>
#include <numeric>

#include "mlp/linalg.hpp"
#include "mlp/solver.hpp"

namespace mlp {

std::string SolveOutcome::str() const {
    switch (status) {
    case Status::Infeasible: return "INFEASIBLE";
    case Status::Unbounded: return "UNBOUNDED";
    default: return "VALUE " + value.str() + (value.is_integer() ? "/1" : "");
    }
}

SolveOutcome to_outcome(const LpResult& r, const MlpInstance* inst) {
    SolveOutcome o;
    if (r.status == LpStatus::Infeasible) return o;
    if (r.status == LpStatus::Unbounded) {
        o.status = Status::Unbounded;
        return o;
    }
    o.status = Status::Attained;
    o.attainment = Attainment::Attained;
    o.value = r.value;
    if (inst) o.witness = Point::from_flat(*inst, r.x);
    else o.witness.x = {r.x};
    return o;
}

Bilevel Bilevel::from(const MlpInstance& inst) {
    if (inst.k() != 2) throw std::invalid_argument("bilevel view needs k = 2");
    Bilevel bl;
    bl.n1 = inst.n(1);
    bl.n2 = inst.n(2);
    for (int l = 1; l <= 2; ++l)
        for (int r = 0; r < inst.m(l); ++r) {
            LpRow row{sparse(inst.row(l, r)), inst.b(l)(r), false};
            (l == 1 ? bl.upper : bl.lower).push_back(std::move(row));
        }
    Vec f1 = inst.objective(1), f2 = inst.objective(2);
    bl.f_upper.assign(f1.begin(), f1.end());
    bl.f_lower.assign(f2.begin(), f2.end());
    return bl;
}

LpResult follower_solve(const Bilevel& bl, const Vec& x) {
    LpProblem p(bl.n2);
    for (const auto& row : bl.lower) {
        Terms t;
        Rat rhs = row.rhs;
        for (const auto& [j, a] : row.terms) {
            if (j < bl.n1) rhs -= a * x(j);
            else t.emplace_back(j - bl.n1, a);
        }
        p.rows.push_back({std::move(t), rhs, row.eq});
    }
    for (int j = 0; j < bl.n2; ++j) p.obj[j] = bl.f_lower[bl.n1 + j];
    return lp_solve(p);
}

namespace {

Rat eval_terms(const Terms& t, const Vec& z) {
    Rat s = 0;
    for (const auto& [j, a] : t)
        if (!z(j).is_zero()) s += a * z(j);
    return s;
}

bool row_holds(const LpRow& r, const Vec& z) {
    Rat v = eval_terms(r.terms, z);
    return r.eq ? v == r.rhs : !(v < r.rhs);
}

Rat eval_obj(const std::vector<Rat>& c, const Vec& z, int from = 0) {
    Rat s = 0;
    for (size_t j = from; j < c.size(); ++j)
        if (!c[j].is_zero() && !z(j).is_zero()) s += c[j] * z(j);
    return s;
}

Point split(const Bilevel& bl, const Vec& z) {
    Point p;
    p.x = {z.head(bl.n1), z.tail(bl.n2)};
    return p;
}

struct Component {
    std::vector<int> rows;                   // indices into lower
    std::vector<int> vars;                   // follower-local indices
    std::vector<std::vector<int>> patterns;  // minimal supports (row indices into lower)
};

class BranchAndBound {
public:
    BranchAndBound(const Bilevel& bl, const BilevelOptions& opt) : bl_(bl), opt_(opt) {}

    SolveOutcome run() {
        SolveOutcome out;
        build_components();
        for (const auto& c : comps_)
            if (c.patterns.empty()) {
                out.note = "follower problem has no optimal solution for any leader choice";
                return out;
            }
        std::vector<int> root(comps_.size(), -1);
        std::vector<std::vector<int>> stack{root};
        bool have = false;
        Rat best;
        Vec best_z;
        while (!stack.empty()) {
            if (++nodes_ > opt_.node_cap) throw CapExceeded("bilevel node cap exceeded");
            std::vector<int> choice = std::move(stack.back());
            stack.pop_back();
            LpResult lp = solve_node(choice);
            if (lp.status == LpStatus::Infeasible) continue;
            bool bounded = lp.status == LpStatus::Optimal;
            if (bounded && have && !(lp.value < best)) continue;
            const Vec& z = lp.x;
            int branch = -1;
            Vec response;
            bool all_opt = true;
            for (size_t c = 0; c < comps_.size(); ++c) {
                if (choice[c] >= 0) continue;
                Vec y;
                if (!component_optimal(static_cast<int>(c), z, y)) {
                    all_opt = false;
                    if (branch < 0) {
                        branch = static_cast<int>(c);
                        response = y;
                    }
                }
            }
            if (bounded && all_opt) {
                if (!have || lp.value < best) {
                    have = true;
                    best = lp.value;
                    best_z = z;
                    if (opt_.feasibility_only) break;
                }
                continue;
            }
            if (branch < 0) {
                for (size_t c = 0; c < comps_.size(); ++c)
                    if (choice[c] < 0) {
                        branch = static_cast<int>(c);
                        break;
                    }
                if (branch < 0) {
                    out.status = Status::Unbounded;
                    out.nodes = nodes_;
                    return out;
                }
            }
            // Children in reverse so that the preferred pattern is explored first.
            const auto& comp = comps_[branch];
            std::vector<int> order(comp.patterns.size());
            std::iota(order.begin(), order.end(), 0);
            if (response.size() > 0) {
                Vec zz = z;
                for (size_t v = 0; v < comp.vars.size(); ++v) zz(bl_.n1 + comp.vars[v]) = response(v);
                std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                    return tight_all(comp.patterns[a], zz) > tight_all(comp.patterns[b], zz);
                });
            }
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                std::vector<int> child = choice;
                child[branch] = *it;
                stack.push_back(std::move(child));
            }
        }
        out.nodes = nodes_;
        if (!have) return out;
        out.status = Status::Attained;
        out.attainment = Attainment::Attained;
        out.value = best;
        out.witness = split(bl_, best_z);
        return out;
    }

private:
    bool tight_all(const std::vector<int>& rows, const Vec& z) const {
        for (int r : rows)
            if (eval_terms(bl_.lower[r].terms, z) != bl_.lower[r].rhs) return false;
        return true;
    }

    void build_components() {
        int n1 = bl_.n1, n2 = bl_.n2;
        std::vector<int> parent(n2);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int a) {
            while (parent[a] != a) a = parent[a] = parent[parent[a]];
            return a;
        };
        std::vector<std::vector<int>> ys(bl_.lower.size());
        for (size_t r = 0; r < bl_.lower.size(); ++r) {
            for (const auto& [j, a] : bl_.lower[r].terms)
                if (j >= n1 && !a.is_zero()) ys[r].push_back(j - n1);
            std::sort(ys[r].begin(), ys[r].end());
            ys[r].erase(std::unique(ys[r].begin(), ys[r].end()), ys[r].end());
            for (size_t t = 1; t < ys[r].size(); ++t) parent[find(ys[r][t])] = find(ys[r][0]);
        }
        std::vector<int> id(n2, -1);
        for (int v = 0; v < n2; ++v) {
            int rt = find(v);
            if (id[rt] < 0) {
                id[rt] = static_cast<int>(comps_.size());
                comps_.emplace_back();
            }
            comps_[id[rt]].vars.push_back(v);
        }
        for (size_t r = 0; r < bl_.lower.size(); ++r)
            if (!ys[r].empty()) comps_[id[find(ys[r][0])]].rows.push_back(static_cast<int>(r));
        comp_of_var_.assign(n2, -1);
        for (size_t c = 0; c < comps_.size(); ++c)
            for (int v : comps_[c].vars) comp_of_var_[v] = static_cast<int>(c);
        for (auto& c : comps_) c.patterns = minimal_patterns(c);
    }

    // Supports S with linearly independent rows carrying a strictly positive
    // multiplier; these are exactly the minimal elements of Omega restricted
    // to the component.
    std::vector<std::vector<int>> minimal_patterns(const Component& c) const {
        int nr = static_cast<int>(c.rows.size()), nv = static_cast<int>(c.vars.size());
        std::vector<int> local(bl_.n2, -1);
        for (int v = 0; v < nv; ++v) local[c.vars[v]] = v;
        Mat M = zeros(nv, nr);
        for (int r = 0; r < nr; ++r)
            for (const auto& [j, a] : bl_.lower[c.rows[r]].terms)
                if (j >= bl_.n1) M(local[j - bl_.n1], r) += a;
        Vec cy(nv);
        for (int v = 0; v < nv; ++v) cy(v) = bl_.f_lower[bl_.n1 + c.vars[v]];
        std::vector<std::vector<int>> out;
        bool zero_c = true;
        for (const auto& x : cy) zero_c = zero_c && x.is_zero();
        if (zero_c) {
            out.push_back({});
            return out;
        }
        long examined = 0;
        int maxs = std::min(nr, nv);
        for (int s = 1; s <= maxs; ++s) {
            std::vector<int> idx(s);
            std::iota(idx.begin(), idx.end(), 0);
            for (;;) {
                if (++examined > opt_.pattern_cap) throw CapExceeded("pattern enumeration cap exceeded");
                Mat sub(nv, s);
                for (int t = 0; t < s; ++t) sub.col(t) = M.col(idx[t]);
                auto lam = solve_unique(sub, cy);
                if (lam) {
                    bool pos = true;
                    for (const auto& x : *lam) pos = pos && x.sign() > 0;
                    if (pos) {
                        std::vector<int> rows;
                        for (int t : idx) rows.push_back(c.rows[t]);
                        out.push_back(rows);
                    }
                }
                int t = s - 1;
                while (t >= 0 && idx[t] == nr - s + t) --t;
                if (t < 0) break;
                ++idx[t];
                for (int u = t + 1; u < s; ++u) idx[u] = idx[u - 1] + 1;
            }
        }
        return out;
    }

    LpResult solve_node(const std::vector<int>& choice) const {
        LpProblem p(bl_.n());
        p.rows = bl_.upper;
        size_t base = p.rows.size();
        p.rows.insert(p.rows.end(), bl_.lower.begin(), bl_.lower.end());
        for (size_t c = 0; c < comps_.size(); ++c)
            if (choice[c] >= 0)
                for (int r : comps_[c].patterns[choice[c]]) p.rows[base + r].eq = true;
        p.obj = bl_.f_upper;
        return lp_solve(p);
    }

    // Is the component's part of z optimal for its own LP at z's leader part?
    bool component_optimal(int c, const Vec& z, Vec& response) const {
        const Component& comp = comps_[c];
        int nv = static_cast<int>(comp.vars.size());
        std::vector<int> local(bl_.n2, -1);
        for (int v = 0; v < nv; ++v) local[comp.vars[v]] = v;
        LpProblem p(nv);
        for (int r : comp.rows) {
            const LpRow& row = bl_.lower[r];
            Terms t;
            Rat rhs = row.rhs;
            for (const auto& [j, a] : row.terms) {
                if (j < bl_.n1) rhs -= a * z(j);
                else t.emplace_back(local[j - bl_.n1], a);
            }
            p.rows.push_back({std::move(t), rhs, row.eq});
        }
        Rat cur = 0;
        for (int v = 0; v < nv; ++v) {
            p.obj[v] = bl_.f_lower[bl_.n1 + comp.vars[v]];
            cur += p.obj[v] * z(bl_.n1 + comp.vars[v]);
        }
        LpResult r = lp_solve(p);
        if (r.status == LpStatus::Optimal) {
            response = r.x;
            return !(r.value < cur);
        }
        response = Vec();
        return false;
    }

    const Bilevel& bl_;
    BilevelOptions opt_;
    std::vector<Component> comps_;
    std::vector<int> comp_of_var_;
    long nodes_ = 0;
};

}  // namespace

bool bilevel_feasible(const Bilevel& bl, const Vec& z) {
    for (const auto& r : bl.upper)
        if (!row_holds(r, z)) return false;
    for (const auto& r : bl.lower)
        if (!row_holds(r, z)) return false;
    LpResult f = follower_solve(bl, z.head(bl.n1));
    if (f.status != LpStatus::Optimal) return false;
    return eval_obj(bl.f_lower, z, bl.n1) == f.value;
}

SolveOutcome bilevel_solve(const Bilevel& bl, const BilevelOptions& opt) {
    BranchAndBound bb(bl, opt);
    return bb.run();
}

SolveOutcome bilevel_solve(const MlpInstance& inst, const BilevelOptions& opt) {
    return bilevel_solve(Bilevel::from(inst), opt);
}

std::vector<CompPattern> enumerate_patterns(const Bilevel& bl, int cap_rows) {
    int m = static_cast<int>(bl.lower.size());
    if (m > cap_rows) throw CapExceeded("pattern enumeration refuses " + std::to_string(m) + " follower rows");
    std::vector<CompPattern> out;
    for (uint64_t mask = 0; mask < (uint64_t(1) << m); ++mask) {
        // Dual system: lambda >= 0, A22' lambda = c22, lambda_j = 0 off the pattern.
        LpProblem p(m);
        for (int j = 0; j < m; ++j) {
            p.lo[j] = Rat(0);
            if (!((mask >> j) & 1u)) p.hi[j] = Rat(0);
        }
        std::vector<Terms> cols(bl.n2);
        for (int r = 0; r < m; ++r)
            for (const auto& [j, a] : bl.lower[r].terms)
                if (j >= bl.n1 && !a.is_zero()) cols[j - bl.n1].emplace_back(r, a);
        for (int v = 0; v < bl.n2; ++v) p.eq(cols[v], bl.f_lower[bl.n1 + v]);
        if (lp_solve(p).status != LpStatus::Infeasible) {
            CompPattern cp;
            cp.omega.resize(m);
            for (int j = 0; j < m; ++j) cp.omega[j] = static_cast<char>((mask >> j) & 1u);
            out.push_back(std::move(cp));
        }
    }
    return out;
}

std::vector<PolyPiece> bilevel_graph(const Bilevel& bl, int cap_rows) {
    std::vector<PolyPiece> out;
    for (auto& cp : enumerate_patterns(bl, cap_rows)) {
        PolyPiece piece;
        piece.rows = bl.lower;
        for (size_t r = 0; r < piece.rows.size(); ++r)
            if (cp.omega[r]) piece.rows[r].eq = true;
        piece.pattern = std::move(cp);
        out.push_back(std::move(piece));
    }
    return out;
}

SolveOutcome bilevel_solve_enum(const Bilevel& bl, int cap_rows) {
    SolveOutcome out;
    bool have = false;
    for (const auto& piece : bilevel_graph(bl, cap_rows)) {
        LpProblem p(bl.n());
        p.rows = bl.upper;
        p.rows.insert(p.rows.end(), piece.rows.begin(), piece.rows.end());
        p.obj = bl.f_upper;
        LpResult r = lp_solve(p);
        if (r.status == LpStatus::Infeasible) continue;
        if (r.status == LpStatus::Unbounded) {
            out.status = Status::Unbounded;
            return out;
        }
        if (!have || r.value < out.value) {
            have = true;
            out.status = Status::Attained;
            out.attainment = Attainment::Attained;
            out.value = r.value;
            out.witness = split(bl, r.x);
        }
    }
    return out;
}

}  // namespace mlp
