#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlp/core.hpp"
#include "mlp/lp.hpp"

namespace mlp {

enum class Status { Infeasible, Unbounded, Attained, FiniteValue };
enum class Attainment { Attained, NotAttained, Unknown };

struct SolveOutcome {
    Status status = Status::Infeasible;
    Rat value;
    Point witness;
    Attainment attainment = Attainment::Unknown;
    std::string note;
    long nodes = 0;

    bool finite() const { return status == Status::Attained || status == Status::FiniteValue; }
    std::string str() const;  // "VALUE p/q", "INFEASIBLE" or "UNBOUNDED"
};

// Thrown when an exponential enumeration would exceed its configured cap.
struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

SolveOutcome to_outcome(const LpResult& r, const MlpInstance* inst = nullptr);

// Flat bilevel view over z = (x, y): x are the leader's n1 variables, y the
// follower's n2 variables.
struct Bilevel {
    int n1 = 0, n2 = 0;
    std::vector<LpRow> upper;    // leader rows over z
    std::vector<LpRow> lower;    // follower rows over z
    std::vector<Rat> f_upper;    // over z
    std::vector<Rat> f_lower;    // over z, only the y part matters

    int n() const { return n1 + n2; }
    static Bilevel from(const MlpInstance& inst);  // k == 2
};

struct BilevelOptions {
    long node_cap = 2000000;
    long pattern_cap = 200000;   // subsets examined per follower component
    bool feasibility_only = false;
};

// Optimal follower response at leader point x (LP over y).
LpResult follower_solve(const Bilevel& bl, const Vec& x);
// z satisfies all rows and y is optimal for the follower at x.
bool bilevel_feasible(const Bilevel& bl, const Vec& z);

SolveOutcome bilevel_solve(const Bilevel& bl, const BilevelOptions& opt = {});
SolveOutcome bilevel_solve(const MlpInstance& inst, const BilevelOptions& opt = {});

// Complementarity patterns and the polyhedral pieces of the feasible graph.
struct CompPattern {
    std::vector<char> omega;  // one entry per follower row
};

struct PolyPiece {
    CompPattern pattern;
    std::vector<LpRow> rows;  // over z
};

std::vector<CompPattern> enumerate_patterns(const Bilevel& bl, int cap_rows = 16);
std::vector<PolyPiece> bilevel_graph(const Bilevel& bl, int cap_rows = 16);
// Minimizes the leader objective piece by piece over the full enumeration.
SolveOutcome bilevel_solve_enum(const Bilevel& bl, int cap_rows = 16);

// ---- k-level verification for binary-certified upper levels ----

struct KlevelOptions {
    int depth_cap = 3;          // max number of enumerated levels
    int binary_vars_cap = 16;   // max total enumerated variables
    int fractional_samples = 0; // dominance spot-checks at fractional level-1 points
    uint64_t seed = 1;
    std::vector<int> sunk;      // level-1 variables left free and optimized in the last stage
    Rat enum_scale = 1;         // enumerated variables take values in {0, enum_scale}
    BilevelOptions bilevel;
};

// Lexicographic outcome of levels l..1 for fixed choices of levels < l.
struct LexValue {
    std::vector<std::optional<Rat>> v;  // v[0] is the objective of the deepest enumerated level
    Vec z;                              // witness over all variables
};

SolveOutcome klevel_verify(const MlpInstance& inst, const KlevelOptions& opt = {});

// Optimistic evaluation of fixed values for levels 1..k-2: bottom bilevel
// solved exactly, then upper objectives minimized over its optimal set.
std::optional<LexValue> klevel_evaluate(const MlpInstance& inst, const Vec& upper_values, const KlevelOptions& opt = {});

// Bilevel view of levels k-1, k with levels 1..k-2 fixed at `upper_values`.
// Sunk variables join the leader block after the level k-1 variables.
Bilevel bottom_bilevel(const MlpInstance& inst, const Vec& upper_values, const std::vector<int>& sunk = {});

// Lexicographic recursion from `level` (1 <= level <= k-1) with the variables
// of levels < level taken from `upper`. Levels level..k-2 are enumerated over
// binary values. Result v[0] is the value of `level`, v.back() of level 1.
std::optional<LexValue> klevel_lex(const MlpInstance& inst, int level, Vec& upper, const KlevelOptions& opt = {});

// ---- sensitivity ----

struct DeltaResult {
    Rat delta;
    bool all_singular = false;
};

// Max |entry| over the inverses of all square nonsingular submatrices of A.
// Throws CapExceeded when there are more than cap_subsets square submatrices.
DeltaResult sensitivity_delta(const Mat& a, long cap_subsets = 200000);

struct SensitivityReport {
    Rat v1, v2;        // values at the two right-hand sides
    Rat lhs;           // |v1 - v2|
    Rat bound;         // ||c||_1 * max(M1, M2) * ||b1 - b2||_inf, M1 = n delta, M2 = n2 delta (1 + ||A21|| M1)
    Rat delta;
    bool finite = false;
    bool holds = false;
};

// Bilevel no-linking instance solved at follower right-hand sides b1 and b2.
SensitivityReport sensitivity_check(const MlpInstance& inst, const Vec& b1, const Vec& b2);

}  // namespace mlp
