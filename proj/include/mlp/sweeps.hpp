#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mlp/core.hpp"
#include "mlp/formulas.hpp"

namespace mlp {

using Rng = std::mt19937_64;

// ---- generators ----

// n variables, 1..max_clauses clauses of 1..max_len distinct literals.
Formula random_cnf(Rng& rng, int n, int max_clauses, int max_len = 3);
// Random CNF matrix over n1 + n2 variables, blocks {1..n1}, {n1+1..n1+n2}.
Qbf random_qbf(Rng& rng, const std::vector<int>& block_sizes, int max_clauses, int max_len = 3);
// Trees over v1..v3 with at most `max_gates` NOT/AND/OR gates: AND/OR children in
// canonical order, no double negation, variables named by first occurrence.
std::vector<Formula> ast_family(int max_gates = 4);
// Truth table (bit r = value at assignment r, v1 most significant) as a CNF.
Formula truth_table_cnf(int n, uint32_t table);

struct RandomShape {
    int k = 2;
    int max_n = 2;           // variables per level
    int max_rows = 2;        // random rows at the last level
    int upper_rows = 0;      // max non-linking rows per upper level
    bool box_last = true;    // unit boxes on every variable at the last level
    bool box_follower = true;
    int coef = 2;            // coefficients in [-coef, coef]
};
MlpInstance random_instance(Rng& rng, const RandomShape& s);

// ---- suites ----

struct SweepOptions {
    uint64_t seed = 1;
    int trials = -1;   // suite default when negative
    int n = -1;        // variable cap where the suite has one
    int cap_vars = 16;
    int cap_rows = 16;
};

struct SweepResult {
    std::string name;
    long passed = 0, total = 0;
    std::vector<std::string> failures;  // first few
    std::vector<std::string> notes;
    double seconds = 0;

    bool ok() const { return total > 0 && passed == total; }
    void check(bool c, const std::string& what);
    std::string summary() const;  // "PASS 50/50" or "FAIL 48/50"
};

// Instance families shared by the gadget suites and the oracle agreement check.
std::vector<Formula> satblp_family(const SweepOptions& o);        // AST family + random CNFs
std::vector<Formula> lexsat_family(const SweepOptions& o, bool sat); // random, filtered by satisfiability
std::vector<Formula> compact_family(const SweepOptions& o);
std::vector<Qbf> qlp_family(const SweepOptions& o);

SweepResult verify_satblp(const SweepOptions& o);
SweepResult verify_lexsat(const SweepOptions& o);
SweepResult verify_compact(const SweepOptions& o);
SweepResult verify_qlp(const SweepOptions& o);
SweepResult verify_penalty(const SweepOptions& o);
SweepResult verify_examples(const SweepOptions& o);
SweepResult verify_attain(const SweepOptions& o);
SweepResult verify_satunsat(const SweepOptions& o);
SweepResult verify_feas(const SweepOptions& o);
SweepResult verify_pifeas(const SweepOptions& o);
SweepResult verify_transforms(const SweepOptions& o);
SweepResult verify_sensitivity(const SweepOptions& o);
SweepResult verify_valuesearch(const SweepOptions& o);
SweepResult verify_oracles(const SweepOptions& o);

}  // namespace mlp
