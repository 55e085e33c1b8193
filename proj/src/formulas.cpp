#include "mlp/formulas.hpp"

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mlp {

int Formula::leaf(int v) {
    if (v < 1) throw std::invalid_argument("variable index must be positive");
    if (v > n) n = v;
    nodes.push_back({Op::Var, -1, -1, v});
    return root = static_cast<int>(nodes.size()) - 1;
}

int Formula::konst(bool value) {
    nodes.push_back({Op::Const, -1, -1, value ? 1 : 0});
    return root = static_cast<int>(nodes.size()) - 1;
}

int Formula::neg(int a) {
    nodes.push_back({Op::Not, a, -1, 0});
    return root = static_cast<int>(nodes.size()) - 1;
}

int Formula::conj(int a, int b) {
    nodes.push_back({Op::And, a, b, 0});
    return root = static_cast<int>(nodes.size()) - 1;
}

int Formula::disj(int a, int b) {
    nodes.push_back({Op::Or, a, b, 0});
    return root = static_cast<int>(nodes.size()) - 1;
}

void Formula::validate() const {
    int sz = static_cast<int>(nodes.size());
    if (root < 0 || root >= sz) throw std::invalid_argument("formula has no root");
    for (int i = 0; i < sz; ++i) {
        const Node& x = nodes[i];
        switch (x.op) {
        case Op::Var:
            if (x.var < 1 || x.var > n) throw std::invalid_argument("variable index out of range");
            break;
        case Op::Const:
            break;
        case Op::Not:
            if (x.a < 0 || x.a >= i) throw std::invalid_argument("gate input does not precede gate");
            break;
        case Op::And:
        case Op::Or:
            if (x.a < 0 || x.a >= i || x.b < 0 || x.b >= i) throw std::invalid_argument("gate input does not precede gate");
            break;
        }
    }
}

int Formula::gate_count() const {
    int g = 0;
    for (const auto& x : nodes) g += x.op == Op::Not || x.op == Op::And || x.op == Op::Or;
    return g;
}

void Qbf::validate() const {
    matrix.validate();
    if (blocks.empty()) throw std::invalid_argument("QBF needs at least one block");
    std::set<int> seen;
    for (const auto& blk : blocks) {
        if (blk.empty()) throw std::invalid_argument("empty quantifier block");
        for (int v : blk) {
            if (v < 1 || v > matrix.n) throw std::invalid_argument("block variable out of range");
            if (!seen.insert(v).second) throw std::invalid_argument("blocks are not disjoint");
        }
    }
    if (static_cast<int>(seen.size()) != matrix.n) throw std::invalid_argument("matrix variable outside every block");
}

int Qbf::total_vars() const {
    int t = 0;
    for (const auto& blk : blocks) t += static_cast<int>(blk.size());
    return t;
}

Formula cnf_formula(int n, const std::vector<std::vector<int>>& clauses) {
    Formula f;
    f.n = n;
    std::map<int, int> lit_node;
    auto lit = [&](int l) {
        auto it = lit_node.find(l);
        if (it != lit_node.end()) return it->second;
        int node;
        if (l > 0) node = f.leaf(l);
        else {
            int pos = lit_node.count(-l) ? lit_node[-l] : (lit_node[-l] = f.leaf(-l));
            node = f.neg(pos);
        }
        return lit_node[l] = node;
    };
    int acc = -1;
    for (const auto& cl : clauses) {
        int c = -1;
        if (cl.empty()) c = f.konst(false);
        for (int l : cl) {
            int x = lit(l);
            c = c < 0 ? x : f.disj(c, x);
        }
        acc = acc < 0 ? c : f.conj(acc, c);
    }
    if (acc < 0) acc = f.konst(true);
    f.root = acc;
    f.n = n;
    return f;
}

namespace {

struct DimacsBody {
    int n = 0;
    std::vector<std::vector<int>> clauses;
    std::vector<std::pair<char, std::vector<int>>> prefix;
};

DimacsBody read_dimacs(const std::string& text, bool allow_prefix) {
    DimacsBody out;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    bool header = false;
    bool in_clauses = false;
    std::vector<int> cur;
    int cur_line = 0;
    auto fail = [&](const std::string& msg) { throw std::invalid_argument("line " + std::to_string(line) + ": " + msg); };
    while (std::getline(in, raw)) {
        ++line;
        std::istringstream ls(raw);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "c") continue;
        if (first == "%") break;
        if (first == "p") {
            if (header) fail("duplicate header");
            std::string fmt;
            long nv = -1, nc = -1;
            std::string extra;
            if (!(ls >> fmt >> nv >> nc) || fmt != "cnf" || nv < 0 || nc < 0 || (ls >> extra)) fail("malformed header");
            out.n = static_cast<int>(nv);
            header = true;
            continue;
        }
        if (!header) fail("clause before header");
        if (first == "e" || first == "a") {
            if (!allow_prefix) fail("quantifier line in CNF input");
            if (in_clauses || !cur.empty()) fail("quantifier line after clauses");
            std::vector<int> vars;
            long v;
            bool closed = false;
            while (ls >> v) {
                if (v == 0) {
                    closed = true;
                    break;
                }
                if (v < 1 || v > out.n) fail("variable out of range");
                vars.push_back(static_cast<int>(v));
            }
            if (!closed) fail("unterminated quantifier line");
            out.prefix.emplace_back(first[0], vars);
            continue;
        }
        std::istringstream toks(raw);
        std::string tok;
        while (toks >> tok) {
            long v;
            try {
                size_t pos;
                v = std::stol(tok, &pos);
                if (pos != tok.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                fail("bad literal '" + tok + "'");
            }
            if (v == 0) {
                out.clauses.push_back(cur);
                cur.clear();
                continue;
            }
            if (v > out.n || -v > out.n) fail("literal out of range");
            if (cur.empty()) cur_line = line;
            cur.push_back(static_cast<int>(v));
            in_clauses = true;
        }
    }
    if (!header) throw std::invalid_argument("line " + std::to_string(line) + ": missing header");
    if (!cur.empty()) throw std::invalid_argument("line " + std::to_string(cur_line) + ": unterminated clause");
    return out;
}

}  // namespace

Formula parse_cnf(const std::string& text) {
    DimacsBody d = read_dimacs(text, false);
    return cnf_formula(d.n, d.clauses);
}

Qbf parse_qdimacs(const std::string& text) {
    DimacsBody d = read_dimacs(text, true);
    Qbf h;
    h.matrix = cnf_formula(d.n, d.clauses);
    std::vector<char> quant;
    for (auto& [q, vars] : d.prefix) {
        if (vars.empty()) throw std::invalid_argument("empty quantifier block");
        if (!quant.empty() && quant.back() == q) {
            h.blocks.back().insert(h.blocks.back().end(), vars.begin(), vars.end());
            continue;
        }
        if (quant.empty() && q == 'a') throw std::invalid_argument("first block must be existential");
        quant.push_back(q);
        h.blocks.push_back(vars);
    }
    std::set<int> bound;
    for (const auto& blk : h.blocks)
        for (int v : blk)
            if (!bound.insert(v).second) throw std::invalid_argument("variable quantified twice");
    std::vector<int> free_vars;
    for (int v = 1; v <= d.n; ++v)
        if (!bound.count(v)) free_vars.push_back(v);
    if (h.blocks.empty()) h.blocks.emplace_back();
    h.blocks.front().insert(h.blocks.front().end(), free_vars.begin(), free_vars.end());
    if (h.blocks.front().empty()) throw std::invalid_argument("empty quantifier block");
    h.validate();
    return h;
}

namespace {

bool eval_vals(const Formula& f, const std::vector<int>& val, std::vector<char>& work) {
    work.resize(f.nodes.size());
    for (size_t i = 0; i < f.nodes.size(); ++i) {
        const Node& x = f.nodes[i];
        switch (x.op) {
        case Op::Var: work[i] = val[x.var - 1] != 0; break;
        case Op::Const: work[i] = x.var != 0; break;
        case Op::Not: work[i] = !work[x.a]; break;
        case Op::And: work[i] = work[x.a] && work[x.b]; break;
        case Op::Or: work[i] = work[x.a] || work[x.b]; break;
        }
    }
    return work[f.root];
}

void check_cap(int n, BruteForceCap cap) {
    if (n > cap.max_vars)
        throw std::length_error("brute-force oracle refuses " + std::to_string(n) + " variables (cap " +
                                std::to_string(cap.max_vars) + ")");
}

// Sets the block's variables from the bits of `mask`, first variable most significant.
void set_block(std::vector<int>& val, const std::vector<int>& blk, uint64_t mask) {
    size_t w = blk.size();
    for (size_t i = 0; i < w; ++i) val[blk[i] - 1] = static_cast<int>((mask >> (w - 1 - i)) & 1u);
}

bool qbf_rec(const Qbf& h, size_t blk, std::vector<int>& val, std::vector<char>& work) {
    if (blk == h.blocks.size()) return eval_vals(h.matrix, val, work);
    bool exists = blk % 2 == 0;
    uint64_t count = uint64_t(1) << h.blocks[blk].size();
    for (uint64_t mask = count; mask-- > 0;) {
        set_block(val, h.blocks[blk], mask);
        bool r = qbf_rec(h, blk + 1, val, work);
        if (exists && r) return true;
        if (!exists && !r) return false;
    }
    return !exists;
}

}  // namespace

bool eval(const Formula& f, const Assignment& s) {
    if (static_cast<int>(s.size()) != f.n) throw std::invalid_argument("assignment length mismatch");
    std::vector<char> work;
    return eval_vals(f, s, work);
}

std::optional<Assignment> lexmax_sat(const Formula& f, BruteForceCap cap) {
    check_cap(f.n, cap);
    std::vector<int> blk(f.n);
    for (int i = 0; i < f.n; ++i) blk[i] = i + 1;
    Assignment s(f.n, 0);
    std::vector<char> work;
    uint64_t count = uint64_t(1) << f.n;
    for (uint64_t mask = count; mask-- > 0;) {
        set_block(s, blk, mask);
        if (eval_vals(f, s, work)) return s;
    }
    return std::nullopt;
}

bool qbf_truth(const Qbf& h, BruteForceCap cap) {
    check_cap(h.total_vars(), cap);
    std::vector<int> val(h.matrix.n, 0);
    std::vector<char> work;
    return qbf_rec(h, 0, val, work);
}

bool qbf_truth_fixed(const Qbf& h, const std::vector<Assignment>& fixed) {
    std::vector<int> val(h.matrix.n, 0);
    for (size_t b = 0; b < fixed.size(); ++b) {
        if (fixed[b].size() != h.blocks[b].size()) throw std::invalid_argument("fixed block length mismatch");
        for (size_t i = 0; i < fixed[b].size(); ++i) val[h.blocks[b][i] - 1] = fixed[b][i];
    }
    std::vector<char> work;
    return qbf_rec(h, fixed.size(), val, work);
}

std::optional<Assignment> qbf_lexmax(const Qbf& h, BruteForceCap cap) {
    check_cap(h.total_vars(), cap);
    const auto& b0 = h.blocks.front();
    std::vector<int> val(h.matrix.n, 0);
    std::vector<char> work;
    uint64_t count = uint64_t(1) << b0.size();
    for (uint64_t mask = count; mask-- > 0;) {
        set_block(val, b0, mask);
        if (qbf_rec(h, 1, val, work)) {
            Assignment s(b0.size());
            for (size_t i = 0; i < b0.size(); ++i) s[i] = val[b0[i] - 1];
            return s;
        }
    }
    return std::nullopt;
}

std::string to_sexpr(const Formula& f) {
    std::vector<std::string> s(f.nodes.size());
    for (size_t i = 0; i < f.nodes.size(); ++i) {
        const Node& x = f.nodes[i];
        switch (x.op) {
        case Op::Var: s[i] = "v" + std::to_string(x.var); break;
        case Op::Const: s[i] = x.var ? "true" : "false"; break;
        case Op::Not: s[i] = "(not " + s[x.a] + ")"; break;
        case Op::And: s[i] = "(and " + s[x.a] + " " + s[x.b] + ")"; break;
        case Op::Or: s[i] = "(or " + s[x.a] + " " + s[x.b] + ")"; break;
        }
    }
    return f.root >= 0 ? s[f.root] : "";
}

}  // namespace mlp
