#pragma once

#include <functional>
#include <string>

#include "mlp/gadgets.hpp"
#include "mlp/solver.hpp"

namespace mlp {

// "Is V <= t?" plus status flags. Answers must be monotone in t.
struct DecisionOracle {
    std::function<bool(const Rat&)> le;
    std::function<bool()> infeasible;
    std::function<bool()> unbounded;
    std::string name;
};

struct InconsistentOracle : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BoundViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Simplest rational in [lo, hi] (smallest denominator, then smallest |numerator|).
Rat simplest_rational(const Rat& lo, const Rat& hi);

// The unique rational of encoding size <= phi in [lo, hi]; an endpoint of size
// <= phi is returned as is. Throws BoundViolated when there is none.
Rat reconstruct_rational(const Rat& lo, const Rat& hi, long phi);

struct ValueSearch {
    SolveOutcome outcome;  // value only; witness left empty
    long queries = 0;      // every oracle call, status flags included
};

// Exact value of size <= phi. Sign query V <= 0 first, then the binary exponent
// of |V|, then halving until the interval is narrower than the separation of
// size-phi rationals of that magnitude.
ValueSearch binary_search_value(const DecisionOracle& o, long phi);

// Default phi: BoundFn(phi_k) at the instance's encoding size.
long default_phi(const MlpInstance& inst);

// k = 2: the row "leader objective <= t" is added and bilevel feasibility is
// tested. k >= 3: klevel_verify value, computed once.
DecisionOracle oracle_from_solver(const MlpInstance& inst, const KlevelOptions& opt = {});

// Answers from the brute-force formula evaluators through the gadget's value
// lemma; never calls the LP solver.
DecisionOracle oracle_from_gadget(const GadgetInstance& g);

struct GadgetValue {
    Status status = Status::Infeasible;
    Rat value;
    bool attained = true;
};
// The value a gadget's contract predicts for its inputs.
GadgetValue predicted_value(const GadgetInstance& g);

}  // namespace mlp
