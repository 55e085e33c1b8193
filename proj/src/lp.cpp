#include "mlp/lp.hpp"

#include <stdexcept>

namespace mlp {

Terms sparse(const Vec& v, int offset) {
    Terms t;
    for (Eigen::Index j = 0; j < v.size(); ++j)
        if (!v(j).is_zero()) t.emplace_back(static_cast<int>(j) + offset, v(j));
    return t;
}

namespace {

struct Bound {
    bool has = false;
    Rat v;
};

class Simplex {
public:
    explicit Simplex(const LpProblem& p) : p_(p) {}

    LpResult run() {
        LpResult res;
        if (!setup()) return res;
        // Phase 1: drive artificials to zero.
        if (n_art_ > 0) {
            std::vector<Rat> cost(nv_, Rat(0));
            for (int v = art0_; v < nv_; ++v) cost[v] = 1;
            load_costs(cost);
            if (iterate(res) != LpStatus::Optimal) throw std::logic_error("phase 1 unbounded");
            for (int v = art0_; v < nv_; ++v)
                if (!val_[v].is_zero()) return res;
            for (int v = art0_; v < nv_; ++v) hi_[v] = {true, Rat(0)};
        }
        std::vector<Rat> cost(nv_, Rat(0));
        for (int j = 0; j < p_.n; ++j) cost[j] = p_.obj[j];
        load_costs(cost);
        LpStatus st = iterate(res);
        res.status = st;
        res.x = Vec(p_.n);
        for (int j = 0; j < p_.n; ++j) res.x(j) = val_[j];
        Rat z = 0;
        for (int j = 0; j < p_.n; ++j)
            if (!p_.obj[j].is_zero()) z += p_.obj[j] * val_[j];
        res.value = z;
        res.pivots = pivots_;
        return res;
    }

private:
    // Returns false if the bounds alone are contradictory.
    bool setup() {
        int n = p_.n;
        lo_.assign(n, {});
        hi_.assign(n, {});
        for (int j = 0; j < n; ++j) {
            if (p_.lo.size() > static_cast<size_t>(j) && p_.lo[j]) lo_[j] = {true, *p_.lo[j]};
            if (p_.hi.size() > static_cast<size_t>(j) && p_.hi[j]) hi_[j] = {true, *p_.hi[j]};
        }
        std::vector<const LpRow*> general;
        for (const auto& row : p_.rows) {
            int nz = 0, idx = -1;
            Rat a;
            for (const auto& [j, c] : row.terms)
                if (!c.is_zero()) {
                    ++nz;
                    idx = j;
                    a = c;
                }
            if (nz == 0) {
                int s = row.rhs.sign();
                if (row.eq ? s != 0 : s > 0) return false;
                continue;
            }
            if (nz == 1) {
                Rat bnd = row.rhs / a;
                bool lower = a.sign() > 0;
                if (row.eq || lower) tighten_lo(idx, bnd);
                if (row.eq || !lower) tighten_hi(idx, bnd);
                continue;
            }
            general.push_back(&row);
        }
        for (int j = 0; j < n; ++j)
            if (lo_[j].has && hi_[j].has && hi_[j].v < lo_[j].v) return false;

        int m = static_cast<int>(general.size());
        // Variable numbering: structurals, slacks, artificials.
        int slack0 = n;
        nv_ = n + m;
        lo_.resize(nv_);
        hi_.resize(nv_);
        val_.assign(nv_, Rat(0));
        for (int j = 0; j < n; ++j) {
            if (lo_[j].has) val_[j] = lo_[j].v;
            else if (hi_[j].has) val_[j] = hi_[j].v;
        }
        for (int i = 0; i < m; ++i) {
            lo_[slack0 + i] = {true, general[i]->rhs};
            if (general[i]->eq) hi_[slack0 + i] = {true, general[i]->rhs};
        }
        // Slack values and violations.
        std::vector<int> viol;  // +1 below lower, -1 above upper
        std::vector<Rat> sval(m);
        for (int i = 0; i < m; ++i) {
            Rat s = 0;
            for (const auto& [j, c] : general[i]->terms)
                if (!c.is_zero() && !val_[j].is_zero()) s += c * val_[j];
            sval[i] = s;
        }
        art0_ = nv_;
        std::vector<int> art_of(m, -1);
        for (int i = 0; i < m; ++i) {
            const Bound& l = lo_[slack0 + i];
            const Bound& h = hi_[slack0 + i];
            if ((l.has && sval[i] < l.v) || (h.has && h.v < sval[i])) art_of[i] = nv_++;
        }
        n_art_ = nv_ - art0_;
        lo_.resize(nv_);
        hi_.resize(nv_);
        val_.resize(nv_, Rat(0));

        // Dictionary columns: structurals, then the slack of each artificial row.
        N_.clear();
        for (int j = 0; j < n; ++j) N_.push_back(j);
        std::vector<int> slack_col(m, -1);
        for (int i = 0; i < m; ++i)
            if (art_of[i] >= 0) {
                slack_col[i] = static_cast<int>(N_.size());
                N_.push_back(slack0 + i);
            }
        int cols = static_cast<int>(N_.size());
        D_.assign(m + 1, std::vector<Rat>(cols, Rat(0)));
        B_.assign(m, -1);
        for (int i = 0; i < m; ++i) {
            if (art_of[i] < 0) {
                B_[i] = slack0 + i;
                for (const auto& [j, c] : general[i]->terms) D_[i][j] += c;
                val_[slack0 + i] = sval[i];
            } else {
                // art = sigma * (a.x - s), with s nonbasic at the violated bound.
                bool below = lo_[slack0 + i].has && sval[i] < lo_[slack0 + i].v;
                Rat sbound = below ? lo_[slack0 + i].v : hi_[slack0 + i].v;
                int sigma = below ? -1 : 1;
                int a = art_of[i];
                B_[i] = a;
                for (const auto& [j, c] : general[i]->terms) D_[i][j] += sigma == 1 ? c : -c;
                D_[i][slack_col[i]] = Rat(-sigma);
                val_[slack0 + i] = sbound;
                val_[a] = sigma == 1 ? sval[i] - sbound : sbound - sval[i];
                lo_[a] = {true, Rat(0)};
            }
        }
        return true;
    }

    void tighten_lo(int j, const Rat& v) {
        if (!lo_[j].has || lo_[j].v < v) lo_[j] = {true, v};
    }
    void tighten_hi(int j, const Rat& v) {
        if (!hi_[j].has || v < hi_[j].v) hi_[j] = {true, v};
    }

    void load_costs(const std::vector<Rat>& cost) {
        int m = static_cast<int>(B_.size());
        auto& z = D_[m];
        for (size_t j = 0; j < N_.size(); ++j) {
            Rat r = cost[N_[j]];
            for (int i = 0; i < m; ++i)
                if (!cost[B_[i]].is_zero() && !D_[i][j].is_zero()) r += cost[B_[i]] * D_[i][j];
            z[j] = r;
        }
    }

    LpStatus iterate(LpResult& res) {
        int m = static_cast<int>(B_.size());
        int cols = static_cast<int>(N_.size());
        for (;;) {
            const auto& z = D_[m];
            int enter = -1;
            int dir = 0;
            for (int j = 0; j < cols; ++j) {
                int s = z[j].sign();
                if (s == 0) continue;
                int v = N_[j];
                bool can_up = !hi_[v].has || val_[v] < hi_[v].v;
                bool can_down = !lo_[v].has || lo_[v].v < val_[v];
                if ((s < 0 && can_up) || (s > 0 && can_down)) {
                    if (enter < 0 || v < N_[enter]) {
                        enter = j;
                        dir = s < 0 ? 1 : -1;
                    }
                }
            }
            if (enter < 0) return LpStatus::Optimal;

            int ev = N_[enter];
            int leave = -1;  // row index, or -2 for a bound flip
            Rat best;
            int best_var = -1;
            auto offer = [&](const Rat& t, int row, int var) {
                if (leave == -1 || t < best || (t == best && var < best_var)) {
                    best = t;
                    leave = row;
                    best_var = var;
                }
            };
            if (dir > 0 && hi_[ev].has) offer(hi_[ev].v - val_[ev], -2, ev);
            if (dir < 0 && lo_[ev].has) offer(val_[ev] - lo_[ev].v, -2, ev);
            for (int i = 0; i < m; ++i) {
                const Rat& a = D_[i][enter];
                if (a.is_zero()) continue;
                int bv = B_[i];
                int rate = a.sign() * dir;
                if (rate > 0 && hi_[bv].has) offer((hi_[bv].v - val_[bv]) / abs(a), i, bv);
                if (rate < 0 && lo_[bv].has) offer((val_[bv] - lo_[bv].v) / abs(a), i, bv);
            }
            if (leave == -1) {
                res.ray = Vec::Constant(p_.n, Rat(0));
                if (ev < p_.n) res.ray(ev) = dir;
                for (int i = 0; i < m; ++i)
                    if (B_[i] < p_.n && !D_[i][enter].is_zero()) res.ray(B_[i]) = dir > 0 ? D_[i][enter] : -D_[i][enter];
                return LpStatus::Unbounded;
            }
            if (!best.is_zero()) {
                Rat step = dir > 0 ? best : -best;
                val_[ev] += step;
                for (int i = 0; i < m; ++i)
                    if (!D_[i][enter].is_zero()) val_[B_[i]] += D_[i][enter] * step;
            }
            if (leave == -2) continue;
            pivot(leave, enter);
        }
    }

    void pivot(int r, int j) {
        ++pivots_;
        int m = static_cast<int>(B_.size());
        int cols = static_cast<int>(N_.size());
        std::vector<Rat>& row = D_[r];
        Rat inv = Rat(1) / row[j];
        std::vector<int> nz;
        for (int c = 0; c < cols; ++c) {
            if (c == j) continue;
            if (!row[c].is_zero()) {
                row[c] = -(row[c] * inv);
                nz.push_back(c);
            }
        }
        row[j] = inv;
        for (int i = 0; i <= m; ++i) {
            if (i == r) continue;
            std::vector<Rat>& di = D_[i];
            if (di[j].is_zero()) continue;
            Rat coef = di[j];
            for (int c : nz) di[c] += coef * row[c];
            di[j] = coef * inv;
        }
        std::swap(B_[r], N_[j]);
    }

    const LpProblem& p_;
    int nv_ = 0, art0_ = 0, n_art_ = 0;
    long pivots_ = 0;
    std::vector<Bound> lo_, hi_;
    std::vector<Rat> val_;
    std::vector<int> B_, N_;
    std::vector<std::vector<Rat>> D_;
};

}  // namespace

LpResult lp_solve(const LpProblem& p) {
    if (static_cast<int>(p.obj.size()) != p.n) throw std::invalid_argument("objective length mismatch");
    for (const auto& row : p.rows)
        for (const auto& [j, c] : row.terms)
            if (j < 0 || j >= p.n) throw std::invalid_argument("row references unknown variable");
    Simplex s(p);
    return s.run();
}

}  // namespace mlp
