#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlp/solver.hpp"

namespace mlp {

// Attainment analysis for k >= 3 instances with binary-certified upper levels
// and one continuous level-1 parameter in [0, 1].
struct CertOptions {
    int param = -1;             // global index of the level-1 parameter, -1 for none
    std::vector<int> sunk;      // level-1 variables optimized with the bottom levels
    int depth = 10;             // samples at 1 - 2^-j for j = 1..depth
    bool interpolation = true;  // k = 3 only: convexity cuts on the level-2 value
    int rounds = 4;             // pin-and-cut rounds per test
    KlevelOptions klevel;
};

struct CurvePoint {
    Rat x;
    std::optional<Rat> value;  // level-1 objective, nullopt when no feasible continuation
    Vec z;
};

struct AssignmentCurve {
    std::vector<int> bits;            // enumerated level-1 variables, in index order
    std::vector<CurvePoint> points;
    std::optional<Rat> limit;         // fitted value at 1 from below
};

struct CertReport {
    SolveOutcome outcome;
    std::vector<AssignmentCurve> curves;
    std::vector<int> enumerated;      // global indices behind AssignmentCurve::bits
    int tests = 0, passed = 0;        // "no feasible point with value <= V" tests
};

CertReport attainment_certificate(const MlpInstance& inst, const CertOptions& opt = {});

// True when no feasible point with level-1 objective <= v exists for the given
// values of the enumerated level-1 variables. Sound up to binary enumeration of
// levels 2..k-2 inside the value cuts.
bool no_point_at_most(const MlpInstance& inst, const Rat& v, const std::vector<std::pair<int, Rat>>& fixed,
                      const CertOptions& opt, std::string* why = nullptr);

// Fixes the level-1 variables; levels 2..k become 1..k-1. Level-1 rows must not
// involve lower variables. nullopt when a fixed level-1 row is violated.
struct Restricted {
    MlpInstance instance;
    std::vector<int> from;  // new global -> old global
};
std::optional<Restricted> restrict_top(const MlpInstance& inst, const Vec& level1, const Varmap* vm = nullptr,
                                       Varmap* vm_out = nullptr);

// Range of variable `var` over all optima of the bottom two levels with levels
// 1..k-2 fixed at `upper`. nullopt when the bottom bilevel is infeasible.
std::optional<std::pair<Rat, Rat>> range_on_bottom_optima(const MlpInstance& inst, const Vec& upper, int var);

}  // namespace mlp
