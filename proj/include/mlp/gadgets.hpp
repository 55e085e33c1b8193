#pragma once

#include <optional>
#include <string>

#include "mlp/core.hpp"
#include "mlp/formulas.hpp"

namespace mlp {

struct GadgetInstance {
    MlpInstance instance;
    Varmap varmap;
    std::string gadget;   // e.g. "sat2blp"
    std::string source;   // s-expression of the input formula or QBF

    // Inputs kept for the formula-backed value oracle. Formula gadgets store a
    // single existential block over all variables.
    Qbf qbf;
    Formula second;       // satunsat: the second formula
    bool signed_value = false;
    bool search = false;

    std::string varmap_json() const { return varmap.to_json(gadget, source); }
};

struct SatOptions {
    Rat c_pen = 3;
    // Leader objective -F + c_pen * sum v (value -1 if satisfiable, else 0)
    // instead of NF + c_pen * sum v (value 0 or 1).
    bool signed_value = false;
};

GadgetInstance sat_to_blp(const Formula& f, const SatOptions& opt = {});
GadgetInstance lexsat_to_blp(const Formula& f, bool compact);

struct QlpOptions {
    bool search = false;         // leader also subtracts sum s1_i / 2^i, compacted
    bool signed_value = false;   // leader objective -F + 2 q1 (value -1 if true, else 0)
    int level_penalty = 4;       // K in q_l <= K * sum_i w_li
};

// k = number of blocks + 1, k >= 3.
GadgetInstance qbf_to_klp(const Qbf& h, const QlpOptions& opt = {});

enum class Example { k3, k4 };
GadgetInstance example_nonattain(Example which);

GadgetInstance attain_gadget_k3(const Qbf& h);
GadgetInstance sat_unsat_attain(const Formula& f1, const Formula& f2);

// (k+1)-level scaling wrapper around the signed QLP gadget of h (k-1 blocks).
// Feasible iff h is false.
GadgetInstance pi_feasibility_gadget(const Qbf& h);

enum class Feas5Part { both, one, two };
// Five levels; feasible iff h (4 blocks) is true. `part` keeps only one of the
// two decoupled followers, for sub-solves.
GadgetInstance feas_gadget_k5(const Qbf& h, Feas5Part part = Feas5Part::both);

std::string qbf_sexpr(const Qbf& h);

}  // namespace mlp
