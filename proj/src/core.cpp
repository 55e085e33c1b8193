#include "mlp/core.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mlp {

MlpData::MlpData(int k_, std::vector<int> n_, std::vector<int> m_) : k(k_), n(std::move(n_)), m(std::move(m_)) {
    A.assign(k, {});
    c.assign(k, {});
    b.resize(k);
    for (int l = 0; l < k; ++l) {
        b[l] = zeros(m[l]);
        for (int i = 0; i < k; ++i) {
            A[l].push_back(zeros(m[l], n[i]));
            c[l].push_back(zeros(n[i]));
        }
    }
}

MlpInstance::MlpInstance(MlpData d) {
    if (d.k < 1) throw std::invalid_argument("k must be at least 1");
    auto sz = static_cast<size_t>(d.k);
    if (d.n.size() != sz || d.m.size() != sz || d.A.size() != sz || d.b.size() != sz || d.c.size() != sz)
        throw std::invalid_argument("level count mismatch");
    for (int l = 0; l < d.k; ++l) {
        if (d.n[l] < 0 || d.m[l] < 0) throw std::invalid_argument("negative dimension");
        if (d.b[l].size() != d.m[l]) throw std::invalid_argument("b block has wrong length");
        if (d.A[l].size() != sz || d.c[l].size() != sz) throw std::invalid_argument("block row count mismatch");
        for (int i = 0; i < d.k; ++i) {
            if (d.A[l][i].rows() != d.m[l] || d.A[l][i].cols() != d.n[i])
                throw std::invalid_argument("A block has wrong shape");
            if (d.c[l][i].size() != d.n[i]) throw std::invalid_argument("c block has wrong length");
            if (i < l)
                for (const auto& v : d.c[l][i])
                    if (!v.is_zero()) throw std::invalid_argument("objective touches an earlier level");
        }
    }
    offsets_.assign(d.k + 1, 0);
    for (int l = 0; l < d.k; ++l) offsets_[l + 1] = offsets_[l] + d.n[l];
    d_ = std::make_shared<const MlpData>(std::move(d));
}

int MlpInstance::level_of(int var) const {
    for (int l = 1; l <= k(); ++l)
        if (var < offsets_[l]) return l;
    throw std::out_of_range("variable index out of range");
}

Vec MlpInstance::row(int l, int r) const {
    Vec out(n_total());
    for (int i = 1; i <= k(); ++i) out.segment(offset(i), n(i)) = A(l, i).row(r).transpose();
    return out;
}

Vec MlpInstance::objective(int l) const {
    Vec out = zeros(n_total());
    for (int i = l; i <= k(); ++i) out.segment(offset(i), n(i)) = c(l, i);
    return out;
}

Point Point::zero(const MlpInstance& inst) {
    Point p;
    for (int l = 1; l <= inst.k(); ++l) p.x.push_back(zeros(inst.n(l)));
    return p;
}

Point Point::from_flat(const MlpInstance& inst, const Vec& z) {
    if (z.size() != inst.n_total()) throw std::invalid_argument("point length mismatch");
    Point p;
    for (int l = 1; l <= inst.k(); ++l) p.x.push_back(z.segment(inst.offset(l), inst.n(l)));
    return p;
}

Vec Point::flat() const {
    Eigen::Index n = 0;
    for (const auto& v : x) n += v.size();
    Vec out(n);
    Eigen::Index o = 0;
    for (const auto& v : x) {
        out.segment(o, v.size()) = v;
        o += v.size();
    }
    return out;
}

std::string ConditionReport::summary() const {
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    return std::string("C1=") + yn(c1) + " C2=" + yn(c2) + " C3=" + yn(c3);
}

long encoding_size(const Vec& v) {
    long s = encoding_size(Rat(static_cast<long>(v.size())));
    for (const auto& x : v) s += encoding_size(x);
    return s;
}

long encoding_size(const Mat& a) {
    long s = encoding_size(Rat(static_cast<long>(a.rows()))) + encoding_size(Rat(static_cast<long>(a.cols())));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) s += encoding_size(a(i, j));
    return s;
}

long encoding_size(const MlpInstance& inst) {
    long s = encoding_size(Rat(inst.k()));
    for (int l = 1; l <= inst.k(); ++l) {
        s += encoding_size(Rat(inst.n(l))) + encoding_size(Rat(inst.m(l)));
        s += encoding_size(inst.b(l));
        for (int i = 1; i <= inst.k(); ++i) {
            s += encoding_size(inst.A(l, i));
            if (i >= l) s += encoding_size(inst.c(l, i));
        }
    }
    return s;
}

ConditionReport check_conditions(const MlpInstance& inst) {
    ConditionReport rep;
    int k = inst.k();
    rep.c1 = true;
    for (int l = 1; l < k; ++l)
        if (inst.m(l) > 0) {
            rep.c1 = false;
            rep.violations.push_back("level " + std::to_string(l) + " has " + std::to_string(inst.m(l)) + " rows");
        }

    int n = inst.n_total();
    std::vector<char> lower(n, 0), upper(n, 0);
    for (int r = 0; r < inst.m(k); ++r) {
        Vec row = inst.row(k, r);
        int nz = -1, count = 0;
        for (int j = 0; j < n; ++j)
            if (!row(j).is_zero()) {
                nz = j;
                ++count;
            }
        if (count != 1) continue;
        const Rat& rhs = inst.b(k)(r);
        if (row(nz) == Rat(1) && rhs == Rat(0)) lower[nz] = 1;
        if (row(nz) == Rat(-1) && rhs == Rat(-1)) upper[nz] = 1;
    }
    rep.c2 = true;
    for (int j = 0; j < n; ++j)
        if (!lower[j] || !upper[j]) {
            rep.c2 = false;
            rep.violations.push_back("variable " + std::to_string(j) + " lacks a unit bound row in the last level");
        }

    rep.c3 = true;
    Rat bound(n);
    auto check = [&](const Rat& v, const std::string& where) {
        if (!v.is_integer() || abs(v) > bound) {
            if (rep.c3) rep.violations.push_back(where + " has entry " + v.str() + " outside integers in [-n, n]");
            rep.c3 = false;
        }
    };
    for (int l = 1; l <= k; ++l) {
        for (const auto& v : inst.b(l)) check(v, "b " + std::to_string(l));
        for (int i = 1; i <= k; ++i) {
            const Mat& a = inst.A(l, i);
            for (Eigen::Index r = 0; r < a.rows(); ++r)
                for (Eigen::Index j = 0; j < a.cols(); ++j) check(a(r, j), "A " + std::to_string(l) + " " + std::to_string(i));
            for (const auto& v : inst.c(l, i)) check(v, "c " + std::to_string(l) + " " + std::to_string(i));
        }
    }
    return rep;
}

namespace {

void check_point(const MlpInstance& inst, const Point& p, int level) {
    if (level < 1 || level > inst.k()) throw std::invalid_argument("level out of range");
    if (static_cast<int>(p.x.size()) != inst.k()) throw std::invalid_argument("point has wrong level count");
    for (int l = 1; l <= inst.k(); ++l)
        if (p.x[l - 1].size() != inst.n(l)) throw std::invalid_argument("point block has wrong length");
}

}  // namespace

Vec residuals_at(const MlpInstance& inst, const Point& p, int level) {
    check_point(inst, p, level);
    Vec r = -inst.b(level);
    for (int i = 1; i <= inst.k(); ++i) {
        const Mat& a = inst.A(level, i);
        for (Eigen::Index row = 0; row < a.rows(); ++row) r(row) += dot(a.row(row).transpose(), p.x[i - 1]);
    }
    return r;
}

Rat objective_at(const MlpInstance& inst, const Point& p, int level) {
    check_point(inst, p, level);
    Rat s = 0;
    for (int i = level; i <= inst.k(); ++i) s += dot(inst.c(level, i), p.x[i - 1]);
    return s;
}

bool satisfies_rows(const MlpInstance& inst, const Point& p) {
    for (int l = 1; l <= inst.k(); ++l)
        for (const auto& r : residuals_at(inst, p, l))
            if (r.sign() < 0) return false;
    return true;
}

// ---- MLP1 ----

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<int> parse_int_list(const std::string& s, int line) {
    std::vector<int> out;
    if (s.empty()) return out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t pos;
            int v = std::stoi(tok, &pos);
            if (pos != tok.size() || v < 0) throw std::invalid_argument("");
            out.push_back(v);
        } catch (const std::exception&) {
            throw std::invalid_argument("line " + std::to_string(line) + ": bad dimension list");
        }
    }
    return out;
}

std::vector<Rat> parse_rats(std::istringstream& is, int line) {
    std::vector<Rat> out;
    std::string tok;
    while (is >> tok) {
        try {
            out.push_back(Rat::parse_canonical(tok));
        } catch (const std::exception& e) {
            throw std::invalid_argument("line " + std::to_string(line) + ": " + e.what());
        }
    }
    return out;
}

std::string join(const Vec& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += v(i).str();
    }
    return s;
}

bool all_zero(const Vec& v) {
    for (const auto& x : v)
        if (!x.is_zero()) return false;
    return true;
}

}  // namespace

MlpInstance parse_mlp1(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    int k = -1;
    MlpData d;
    bool have_dims = false;
    std::map<std::string, bool> seen;
    auto fail = [&](const std::string& msg) { throw std::invalid_argument("line " + std::to_string(line) + ": " + msg); };
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw.substr(0, raw.find('#')));
        if (s.empty()) continue;
        if (k < 0) {
            if (s.rfind("mlp k=", 0) != 0) fail("expected 'mlp k=<k>' header");
            try {
                size_t pos;
                k = std::stoi(s.substr(6), &pos);
                if (pos != s.size() - 6 || k < 1) throw std::invalid_argument("");
            } catch (const std::exception&) {
                fail("bad level count");
            }
            continue;
        }
        if (!have_dims) {
            std::istringstream is(s);
            std::string w, ns, ms;
            is >> w >> ns >> ms;
            if (w != "dims" || ns.rfind("n=", 0) != 0 || ms.rfind("m=", 0) != 0) fail("expected 'dims n=... m=...'");
            auto n = parse_int_list(ns.substr(2), line), m = parse_int_list(ms.substr(2), line);
            if (static_cast<int>(n.size()) != k || static_cast<int>(m.size()) != k) fail("dims do not match k");
            d = MlpData(k, n, m);
            have_dims = true;
            continue;
        }
        auto colon = s.find(':');
        if (colon == std::string::npos) fail("expected ':' in block line");
        std::istringstream head(s.substr(0, colon));
        std::string kind;
        head >> kind;
        std::vector<int> idx;
        int v;
        while (head >> v) idx.push_back(v);
        if (!head.eof()) fail("bad block indices");
        std::string key = kind;
        for (int x : idx) key += " " + std::to_string(x);
        if (seen[key]) fail("duplicate block '" + key + "'");
        seen[key] = true;
        std::istringstream body(s.substr(colon + 1));
        auto vals = parse_rats(body, line);
        auto in_range = [&](int x) { return x >= 1 && x <= k; };
        if (kind == "A") {
            if (idx.size() != 2 || !in_range(idx[0]) || !in_range(idx[1])) fail("bad A block indices");
            Mat& a = d.A[idx[0] - 1][idx[1] - 1];
            if (static_cast<Eigen::Index>(vals.size()) != a.size()) fail("A block has wrong entry count");
            for (Eigen::Index r = 0; r < a.rows(); ++r)
                for (Eigen::Index j = 0; j < a.cols(); ++j) a(r, j) = vals[r * a.cols() + j];
        } else if (kind == "b") {
            if (idx.size() != 1 || !in_range(idx[0])) fail("bad b block index");
            Vec& bv = d.b[idx[0] - 1];
            if (static_cast<Eigen::Index>(vals.size()) != bv.size()) fail("b block has wrong entry count");
            for (Eigen::Index r = 0; r < bv.size(); ++r) bv(r) = vals[r];
        } else if (kind == "c") {
            if (idx.size() != 2 || !in_range(idx[0]) || !in_range(idx[1])) fail("bad c block indices");
            if (idx[1] < idx[0]) fail("c block for an earlier level");
            Vec& cv = d.c[idx[0] - 1][idx[1] - 1];
            if (static_cast<Eigen::Index>(vals.size()) != cv.size()) fail("c block has wrong entry count");
            for (Eigen::Index r = 0; r < cv.size(); ++r) cv(r) = vals[r];
        } else {
            fail("unknown block kind '" + kind + "'");
        }
    }
    if (!have_dims) throw std::invalid_argument("missing header or dims line");
    return MlpInstance(std::move(d));
}

std::string format_mlp1(const MlpInstance& inst) {
    std::ostringstream os;
    int k = inst.k();
    os << "mlp k=" << k << "\n";
    os << "dims n=";
    for (int l = 1; l <= k; ++l) os << (l > 1 ? "," : "") << inst.n(l);
    os << " m=";
    for (int l = 1; l <= k; ++l) os << (l > 1 ? "," : "") << inst.m(l);
    os << "\n";
    for (int l = 1; l <= k; ++l) {
        for (int i = 1; i <= k; ++i) {
            const Mat& a = inst.A(l, i);
            if (a.size() == 0) continue;
            Vec flat(a.size());
            bool nz = false;
            for (Eigen::Index r = 0; r < a.rows(); ++r)
                for (Eigen::Index j = 0; j < a.cols(); ++j) {
                    flat(r * a.cols() + j) = a(r, j);
                    nz = nz || !a(r, j).is_zero();
                }
            if (nz) os << "A " << l << " " << i << " : " << join(flat) << "\n";
        }
        if (inst.m(l) > 0 && !all_zero(inst.b(l))) os << "b " << l << " : " << join(inst.b(l)) << "\n";
        for (int i = l; i <= k; ++i)
            if (inst.n(i) > 0 && !all_zero(inst.c(l, i))) os << "c " << l << " " << i << " : " << join(inst.c(l, i)) << "\n";
    }
    return os.str();
}

Point parse_point(const MlpInstance& inst, const std::string& text) {
    Point p = Point::zero(inst);
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    std::vector<char> seen(inst.k(), 0);
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw.substr(0, raw.find('#')));
        if (s.empty() || s[0] != 'x') continue;
        auto colon = s.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("line " + std::to_string(line) + ": expected ':'");
        std::istringstream head(s.substr(1, colon - 1));
        int l = 0;
        if (!(head >> l) || l < 1 || l > inst.k()) throw std::invalid_argument("line " + std::to_string(line) + ": bad level");
        if (seen[l - 1]) throw std::invalid_argument("line " + std::to_string(line) + ": duplicate point block");
        seen[l - 1] = 1;
        std::istringstream body(s.substr(colon + 1));
        auto vals = parse_rats(body, line);
        if (static_cast<int>(vals.size()) != inst.n(l))
            throw std::invalid_argument("line " + std::to_string(line) + ": wrong entry count");
        for (int j = 0; j < inst.n(l); ++j) p.x[l - 1](j) = vals[j];
    }
    return p;
}

std::string format_point(const Point& p) {
    std::ostringstream os;
    for (size_t l = 0; l < p.x.size(); ++l) os << "x " << l + 1 << " : " << join(p.x[l]) << "\n";
    return os.str();
}

// ---- Varmap ----

int Varmap::at(const std::string& name) const {
    for (const auto& v : vars)
        if (v.name == name) return v.global;
    throw std::out_of_range("no variable named " + name);
}

bool Varmap::has(const std::string& name) const {
    return std::any_of(vars.begin(), vars.end(), [&](const VarInfo& v) { return v.name == name; });
}

std::vector<int> Varmap::role(const std::string& r) const {
    std::vector<int> out;
    for (const auto& v : vars)
        if (v.role == r) out.push_back(v.global);
    return out;
}

std::string Varmap::to_json(const std::string& gadget, const std::string& source) const {
    nlohmann::ordered_json j;
    j["gadget"] = gadget;
    j["source"] = source;
    nlohmann::ordered_json vs = nlohmann::ordered_json::array();
    nlohmann::ordered_json roles = nlohmann::ordered_json::object();
    for (const auto& v : vars) {
        vs.push_back({{"name", v.name}, {"role", v.role}, {"level", v.level}, {"index", v.local}, {"global", v.global}});
        roles[v.role].push_back(v.global);
    }
    j["vars"] = vs;
    j["roles"] = roles;
    return j.dump(2) + "\n";
}

// ---- Builder ----

Builder::Builder(int k) : k_(k), obj_(k) {}

int Builder::var(int level, const std::string& role, const std::string& name) {
    if (level < 1 || level > k_) throw std::invalid_argument("level out of range");
    int id = static_cast<int>(vars_.size());
    int idx = role_count_[role]++;
    vars_.push_back({level, role, name.empty() ? role + "[" + std::to_string(idx) + "]" : name});
    return id;
}

void Builder::ge(int level, const Terms& lhs, const Rat& rhs) { rows_.push_back({level, lhs, rhs}); }

void Builder::le(int level, const Terms& lhs, const Rat& rhs) {
    Terms neg;
    for (const auto& [v, a] : lhs) neg.emplace_back(v, -a);
    rows_.push_back({level, neg, -rhs});
}

void Builder::eq(int level, const Terms& lhs, const Rat& rhs) {
    ge(level, lhs, rhs);
    le(level, lhs, rhs);
}

void Builder::box(int level, int v) {
    ge(level, {{v, 1}}, 0);
    ge(level, {{v, -1}}, -1);
}

void Builder::obj(int level, int v, const Rat& coef) {
    if (vars_[v].level < level) throw std::invalid_argument("objective touches an earlier level");
    obj_[level - 1][v] += coef;
}

void Builder::push_level() {
    ++k_;
    obj_.emplace_back();
}

std::vector<int> Builder::layout() const {
    std::vector<int> order(vars_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vars_[a].level < vars_[b].level; });
    std::vector<int> global(vars_.size());
    for (size_t g = 0; g < order.size(); ++g) global[order[g]] = static_cast<int>(g);
    return global;
}

std::pair<MlpInstance, Varmap> Builder::build() const {
    std::vector<int> n(k_, 0), m(k_, 0);
    for (const auto& v : vars_) ++n[v.level - 1];
    for (const auto& r : rows_) ++m[r.level - 1];
    MlpData d(k_, n, m);
    std::vector<int> global = layout();
    std::vector<int> off(k_ + 1, 0);
    for (int l = 0; l < k_; ++l) off[l + 1] = off[l] + n[l];
    auto loc = [&](int v) { return global[v] - off[vars_[v].level - 1]; };
    std::vector<int> rowcount(k_, 0);
    for (const auto& r : rows_) {
        int l = r.level - 1;
        int ri = rowcount[l]++;
        for (const auto& [v, a] : r.lhs) d.A[l][vars_[v].level - 1](ri, loc(v)) += a;
        d.b[l](ri) = r.rhs;
    }
    for (int l = 0; l < k_; ++l)
        for (const auto& [v, a] : obj_[l]) d.c[l][vars_[v].level - 1](loc(v)) += a;
    Varmap vm;
    vm.vars.resize(vars_.size());
    for (size_t v = 0; v < vars_.size(); ++v)
        vm.vars[global[v]] = {vars_[v].name, vars_[v].role, vars_[v].level, loc(static_cast<int>(v)), global[v]};
    return {MlpInstance(std::move(d)), std::move(vm)};
}

Builder builder_from(const MlpInstance& inst, const Varmap* vm) {
    Builder b(inst.k());
    for (int g = 0; g < inst.n_total(); ++g) {
        int l = inst.level_of(g);
        if (vm && g < static_cast<int>(vm->vars.size())) b.var(l, vm->vars[g].role, vm->vars[g].name);
        else b.var(l, "x" + std::to_string(l), "x" + std::to_string(l) + "[" + std::to_string(g - inst.offset(l)) + "]");
    }
    for (int l = 1; l <= inst.k(); ++l) {
        for (int r = 0; r < inst.m(l); ++r) {
            Vec row = inst.row(l, r);
            Terms t;
            for (int j = 0; j < row.size(); ++j)
                if (!row(j).is_zero()) t.emplace_back(j, row(j));
            b.ge(l, t, inst.b(l)(r));
        }
        Vec c = inst.objective(l);
        for (int j = 0; j < c.size(); ++j)
            if (!c(j).is_zero()) b.obj(l, j, c(j));
    }
    return b;
}

}  // namespace mlp
