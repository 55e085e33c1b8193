#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mlp {

enum class Op { Var, Const, Not, And, Or };

struct Node {
    Op op = Op::Var;
    int a = -1;   // first input (node index)
    int b = -1;   // second input
    int var = 0;  // variable index (1-based) for Var, truth value for Const
};

// Boolean circuit in topological order; every gate's inputs precede it.
struct Formula {
    int n = 0;  // variables v1..vn
    std::vector<Node> nodes;
    int root = -1;

    int leaf(int v);  // adds a Var node
    int konst(bool value);
    int neg(int a);
    int conj(int a, int b);
    int disj(int a, int b);

    void validate() const;
    int gate_count() const;  // Not/And/Or nodes
};

using Assignment = std::vector<int>;  // entries in {0,1}; index 0 is v1

struct Qbf {
    std::vector<std::vector<int>> blocks;  // variable indices, block 0 existential, alternating
    Formula matrix;

    void validate() const;
    int total_vars() const;
};

struct BruteForceCap {
    int max_vars = 24;
};

Formula parse_cnf(const std::string& text);
Qbf parse_qdimacs(const std::string& text);

// Builds the circuit form of a clause list (DIMACS literals). NOT gates are shared per variable.
Formula cnf_formula(int n, const std::vector<std::vector<int>>& clauses);

bool eval(const Formula& f, const Assignment& s);

// Lexicographically maximum satisfying assignment, v1 most significant.
std::optional<Assignment> lexmax_sat(const Formula& f, BruteForceCap cap = {});
bool qbf_truth(const Qbf& h, BruteForceCap cap = {});
// Lexicographically maximum first-block assignment s1 with H(s1) true.
std::optional<Assignment> qbf_lexmax(const Qbf& h, BruteForceCap cap = {});
// Truth of H with the first `fixed.size()` blocks fixed (values in block order).
bool qbf_truth_fixed(const Qbf& h, const std::vector<Assignment>& fixed);

std::string to_sexpr(const Formula& f);

}  // namespace mlp
