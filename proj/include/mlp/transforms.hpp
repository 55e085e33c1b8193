#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mlp/core.hpp"

namespace mlp {

// Polynomial size bounds psi2, psi3, phi_k. Default coef * n^2 * sigma with coef 4.
struct BoundFn {
    enum class Kind { psi2, psi3, phi_k };
    Kind kind = Kind::phi_k;
    long n = 1;      // total variable count of the instance it is bound to
    long coef = 4;

    static BoundFn for_instance(Kind kind, const MlpInstance& inst);
    long evaluate(long sigma) const;
    std::string name() const;
};

// Moves every non-linking row of levels 1..k-1 to the last level, in level order.
MlpInstance forward_constraints(const MlpInstance& inst);

// (A, lambda b, c). Requires lambda > 0 and C1.
MlpInstance scale_rhs(const MlpInstance& inst, const Rat& lambda);

// For each (g, e): a halving chain h_1..h_e owned by the last level with
// 2 h_1 = g, 2 h_{p+1} = h_p and unit boxes. The leader coefficient a of g
// moves to a * 2^e on h_e. The varmap, if given, is extended.
struct CompactResult {
    MlpInstance instance;
    Varmap varmap;
    std::vector<int> chain_ends;  // global index of h_e per weight
};
CompactResult compact_powers(const MlpInstance& inst, const std::vector<std::pair<int, int>>& weights,
                             const Varmap* vm = nullptr);

enum class Companion { T2, T3, T4 };

// Companion instance whose optimum exists iff the original is feasible.
// Levels 1 and 2 merge into one leader with level 2's objective; T2 and T3
// also box the original leader in [-2^psi(sigma), 2^psi(sigma)].
MlpInstance t_companion(const MlpInstance& inst, Companion which, const BoundFn& psi);
MlpInstance t_companion(const MlpInstance& inst, Companion which);

// Adds a last player with w_j <= y_j, w_j <= 1 - y_j, 0 <= w_j <= 1 and
// objective -sum w, plus the row sum w <= 0 in the old last level.
MlpInstance binarize_lift(const MlpInstance& inst, const std::vector<int>& binary_vars);

// True when the instance has the literal rows v >= 0 and -v >= -1 at some level.
bool has_unit_box(const MlpInstance& inst, int v);

}  // namespace mlp
