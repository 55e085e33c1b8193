#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mlp/certificates.hpp"
#include "mlp/gadgets.hpp"
#include "mlp/solver.hpp"
#include "mlp/sweeps.hpp"
#include "mlp/transforms.hpp"
#include "mlp/valuesearch.hpp"

using namespace mlp;
namespace fs = std::filesystem;

namespace {

// Input problems (bad files, bad flags) exit with 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename F>
auto parse_or_usage(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw UsageError(what + ": " + e.what());
    }
}

Formula read_cnf(const std::string& p) {
    return parse_or_usage(p, [&] { return parse_cnf(slurp(p)); });
}
Qbf read_qbf(const std::string& p) {
    return parse_or_usage(p, [&] { return parse_qdimacs(slurp(p)); });
}
MlpInstance read_mlp(const std::string& p) {
    return parse_or_usage(p, [&] { return parse_mlp1(slurp(p)); });
}
Rat read_rat(const std::string& s) {
    return parse_or_usage("rational '" + s + "'", [&] { return Rat::parse(s); });
}

std::string sidecar_path(const std::string& mlp_path) {
    return fs::path(mlp_path).replace_extension(".varmap.json").string();
}

// Variable given as a global index or as a name from the sidecar varmap.
int resolve_var(const std::string& ref, const std::string& mlp_path) {
    if (!ref.empty() && std::all_of(ref.begin(), ref.end(), ::isdigit)) return std::stoi(ref);
    std::string side = sidecar_path(mlp_path);
    if (!fs::exists(side)) throw UsageError("variable '" + ref + "' needs " + side);
    auto j = nlohmann::json::parse(slurp(side));
    for (const auto& v : j.at("vars"))
        if (v.at("name") == ref) return v.at("global").get<int>();
    throw UsageError("no variable named '" + ref + "' in " + side);
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

void emit_instance(const MlpInstance& inst, const std::string& out, const std::string* varmap_json) {
    write_out(out, format_mlp1(inst));
    if (!out.empty() && varmap_json) write_out(sidecar_path(out), *varmap_json);
    if (!out.empty())
        std::cout << "wrote " << out << (varmap_json ? " and " + sidecar_path(out) : "") << " (k=" << inst.k()
                  << ", n=" << inst.n_total() << ")\n";
}

const char* attainment_name(Attainment a) {
    return a == Attainment::Attained ? "attained" : a == Attainment::NotAttained ? "not-attained" : "unknown";
}

struct GadgetArgs {
    std::string name;
    std::vector<std::string> inputs;
    bool compact = false, search = false, signed_value = false;
    std::string part = "both";
};

GadgetInstance compile_gadget(const GadgetArgs& a) {
    auto need = [&](size_t n) {
        if (a.inputs.size() != n)
            throw UsageError(a.name + " takes " + std::to_string(n) + " input file" + (n == 1 ? "" : "s"));
    };
    const std::string& g = a.name;
    if (g == "sat2blp") {
        need(1);
        SatOptions o;
        o.signed_value = a.signed_value;
        return sat_to_blp(read_cnf(a.inputs[0]), o);
    }
    if (g == "lexsat2blp") {
        need(1);
        return lexsat_to_blp(read_cnf(a.inputs[0]), a.compact);
    }
    if (g == "qbf2klp") {
        need(1);
        QlpOptions o;
        o.search = a.search;
        o.signed_value = a.signed_value;
        return qbf_to_klp(read_qbf(a.inputs[0]), o);
    }
    if (g == "attain3") {
        need(1);
        return attain_gadget_k3(read_qbf(a.inputs[0]));
    }
    if (g == "satunsat") {
        need(2);
        return sat_unsat_attain(read_cnf(a.inputs[0]), read_cnf(a.inputs[1]));
    }
    if (g == "feas5") {
        need(1);
        Feas5Part p = a.part == "one" ? Feas5Part::one : a.part == "two" ? Feas5Part::two : Feas5Part::both;
        return feas_gadget_k5(read_qbf(a.inputs[0]), p);
    }
    if (g == "pifeas") {
        need(1);
        return pi_feasibility_gadget(read_qbf(a.inputs[0]));
    }
    if (g == "example-k3" || g == "example-k4") {
        need(0);
        return example_nonattain(g == "example-k3" ? Example::k3 : Example::k4);
    }
    throw UsageError("unknown gadget '" + g + "'");
}

const std::vector<std::string> kGadgets = {"sat2blp", "lexsat2blp", "qbf2klp",   "attain3",   "satunsat",
                                           "feas5",   "pifeas",     "example-k3", "example-k4"};

void add_gadget_flags(CLI::App* c, GadgetArgs& a) {
    c->add_flag("--compact", a.compact, "lexsat2blp: compact the power weights");
    c->add_flag("--search", a.search, "qbf2klp: search objective");
    c->add_flag("--signed", a.signed_value, "sat2blp, qbf2klp: values -1/0 instead of 0/1");
    c->add_option("--part", a.part, "feas5: both, one or two")->check(CLI::IsMember({"both", "one", "two"}));
}

SolveOutcome solve_auto(const MlpInstance& inst, const KlevelOptions& ko, int param, const std::vector<int>& sunk,
                        std::string& method) {
    if (inst.k() == 1) {
        method = "lp";
        LpProblem p(inst.n_total());
        for (int r = 0; r < inst.m(1); ++r) p.ge(sparse(inst.row(1, r)), inst.b(1)(r));
        Vec c = inst.objective(1);
        p.obj.assign(c.begin(), c.end());
        return to_outcome(lp_solve(p), &inst);
    }
    if (inst.k() == 2) {
        method = "bilevel";
        return bilevel_solve(inst, ko.bilevel);
    }
    if (param >= 0 || !sunk.empty()) {
        method = "certificate";
        CertOptions co;
        co.param = param;
        co.sunk = sunk;
        co.klevel = ko;
        return attainment_certificate(inst, co).outcome;
    }
    method = "klevel";
    return klevel_verify(inst, ko);
}

using SuiteFn = SweepResult (*)(const SweepOptions&);
const std::vector<std::pair<std::string, SuiteFn>> kSuites = {
    {"satblp", verify_satblp},       {"lexsat", verify_lexsat},
    {"compact", verify_compact},     {"qlp", verify_qlp},
    {"penalty", verify_penalty},     {"examples", verify_examples},
    {"attain", verify_attain},       {"satunsat", verify_satunsat},
    {"feas", verify_feas},           {"pifeas", verify_pifeas},
    {"transforms", verify_transforms}, {"sensitivity", verify_sensitivity},
    {"valuesearch", verify_valuesearch}, {"oracles", verify_oracles},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multilevel linear programs: gadgets, transforms, exact solving, value search"};
    app.require_subcommand(1);

    std::string out, format = "mlp1";
    uint64_t seed = 1;
    int cap_vars = 16, cap_rows = 16, trials = -1, nvars = -1;
    bool show_queries = false;
    auto common = [&](CLI::App* c) {
        c->add_option("-o,--output", out, "output path");
        c->add_option("--format", format, "instance format")->check(CLI::IsMember({"mlp1"}));
        c->add_option("--seed", seed, "random seed")->capture_default_str();
        c->add_option("--cap-vars", cap_vars, "max enumerated binary variables")->capture_default_str();
        c->add_option("--cap-rows", cap_rows, "max follower rows for full piece enumeration")->capture_default_str();
    };

    GadgetArgs ga;
    auto* compile = app.add_subcommand("compile", "compile a formula or QBF into a gadget instance");
    common(compile);
    compile->add_option("gadget", ga.name, "gadget")->required()->check(CLI::IsMember(kGadgets));
    compile->add_option("inputs", ga.inputs, "CNF or QDIMACS files");
    add_gadget_flags(compile, ga);

    std::string tkind, tin, lambda = "2", companion = "T2";
    std::vector<std::string> tvars, tweights;
    auto* transform = app.add_subcommand("transform", "apply an instance transformation");
    common(transform);
    transform->add_option("kind", tkind, "transformation")
        ->required()
        ->check(CLI::IsMember({"forward", "scale", "compact", "tcompanion", "binarize"}));
    transform->add_option("input", tin, "MLP1 file")->required();
    transform->add_option("--lambda", lambda, "scale: factor p/q")->capture_default_str();
    transform->add_option("--companion", companion, "tcompanion: T2, T3 or T4")
        ->check(CLI::IsMember({"T2", "T3", "T4"}))
        ->capture_default_str();
    transform->add_option("--vars", tvars, "binarize: variables (index or name)")->delimiter(',');
    transform->add_option("--weights", tweights, "compact: var:e pairs")->delimiter(',');

    std::string sin, param;
    std::vector<std::string> sunk;
    bool witness = false;
    auto* solve = app.add_subcommand("solve", "solve an instance exactly");
    common(solve);
    solve->add_option("input", sin, "MLP1 file")->required();
    solve->add_option("--param", param, "k >= 3: level-1 variable approached by the limit certificate");
    solve->add_option("--sunk", sunk, "k >= 3: level-1 variables optimized with the bottom levels")->delimiter(',');
    solve->add_flag("--witness", witness, "print the witness point");

    GadgetArgs va;
    std::string oracle = "solver", le;
    long phi = -1;
    auto* value = app.add_subcommand("value", "binary search for the exact value");
    common(value);
    value->add_option("inputs", va.inputs, "MLP1 file, or formula files with --gadget")->required();
    value->add_option("--gadget", va.name, "compile this gadget from the inputs first")->check(CLI::IsMember(kGadgets));
    add_gadget_flags(value, va);
    value->add_option("--oracle", oracle, "solver or gadget")->check(CLI::IsMember({"solver", "gadget"}))->capture_default_str();
    value->add_option("--phi", phi, "size bound of the value (default from the instance)");
    value->add_option("--le", le, "answer the single query V <= t instead");
    value->add_flag("--queries", show_queries, "print the number of oracle queries");

    std::string suite;
    auto* verify = app.add_subcommand("verify", "run a property sweep");
    common(verify);
    std::vector<std::string> suite_names{"all"};
    for (const auto& s : kSuites) suite_names.push_back(s.first);
    verify->add_option("suite", suite, "suite")->required()->check(CLI::IsMember(suite_names));
    verify->add_option("--trials", trials, "instances per family (suite default when omitted)");
    verify->add_option("--n", nvars, "variable cap of the random formulas");

    std::string iin;
    auto* inspect = app.add_subcommand("inspect", "conditions, size and dimensions");
    common(inspect);
    inspect->add_option("input", iin, "MLP1 file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    KlevelOptions ko;
    ko.binary_vars_cap = cap_vars;
    ko.seed = seed;

    try {
        if (*compile) {
            GadgetInstance g = compile_gadget(ga);
            std::string js = g.varmap_json();
            emit_instance(g.instance, out, &js);
        } else if (*transform) {
            MlpInstance inst = read_mlp(tin);
            auto vars = [&](const std::vector<std::string>& refs) {
                std::vector<int> v;
                for (const auto& s : refs) v.push_back(resolve_var(s, tin));
                return v;
            };
            if (tkind == "forward") {
                emit_instance(forward_constraints(inst), out, nullptr);
            } else if (tkind == "scale") {
                emit_instance(scale_rhs(inst, read_rat(lambda)), out, nullptr);
            } else if (tkind == "tcompanion") {
                Companion c = companion == "T2" ? Companion::T2 : companion == "T3" ? Companion::T3 : Companion::T4;
                emit_instance(t_companion(inst, c), out, nullptr);
            } else if (tkind == "binarize") {
                if (tvars.empty()) throw UsageError("binarize needs --vars");
                emit_instance(binarize_lift(inst, vars(tvars)), out, nullptr);
            } else {
                if (tweights.empty()) throw UsageError("compact needs --weights var:e,...");
                std::vector<std::pair<int, int>> w;
                for (const auto& s : tweights) {
                    auto colon = s.rfind(':');
                    if (colon == std::string::npos) throw UsageError("weight '" + s + "' is not var:e");
                    w.emplace_back(resolve_var(s.substr(0, colon), tin), std::stoi(s.substr(colon + 1)));
                }
                CompactResult r = compact_powers(inst, w);
                std::string js = r.varmap.to_json("compact", tin);
                emit_instance(r.instance, out, &js);
            }
        } else if (*solve) {
            MlpInstance inst = read_mlp(sin);
            int p = param.empty() ? -1 : resolve_var(param, sin);
            std::vector<int> sk;
            for (const auto& s : sunk) sk.push_back(resolve_var(s, sin));
            std::string method;
            SolveOutcome o = solve_auto(inst, ko, p, sk, method);
            std::cout << "# method=" << method << " cap-vars=" << cap_vars << "\n";
            if (method == "klevel") std::cout << "# levels 1..k-2 range over binary values; --param certifies a limit\n";
            if (!o.note.empty()) std::cout << "# " << o.note << "\n";
            std::cout << o.str() << "\n";
            if (o.finite()) std::cout << "ATTAINMENT " << attainment_name(o.attainment) << "\n";
            if (witness && o.status == Status::Attained) std::cout << format_point(o.witness);
        } else if (*value) {
            std::optional<GadgetInstance> g;
            MlpInstance inst;
            if (!va.name.empty()) {
                g = compile_gadget(va);
                inst = g->instance;
            } else {
                if (va.inputs.size() != 1) throw UsageError("value takes one MLP1 file without --gadget");
                inst = read_mlp(va.inputs[0]);
            }
            if (oracle == "gadget" && !g) throw UsageError("--oracle gadget needs --gadget");
            DecisionOracle o = oracle == "gadget" ? oracle_from_gadget(*g) : oracle_from_solver(inst, ko);
            if (!le.empty()) {
                std::cout << (o.le(read_rat(le)) ? "YES" : "NO") << "\n";
            } else {
                long f = phi > 0 ? phi : default_phi(inst);
                std::cout << "# oracle=" << o.name << " phi=" << f << (phi > 0 ? "" : " (default bound; --phi sets a tighter one)")
                          << "\n";
                ValueSearch vs = binary_search_value(o, f);
                std::cout << vs.outcome.str() << "\n";
                if (show_queries) std::cout << "QUERIES " << vs.queries << "\n";
            }
        } else if (*verify) {
            SweepOptions so;
            so.seed = seed;
            so.trials = trials;
            so.n = nvars;
            so.cap_vars = cap_vars;
            so.cap_rows = cap_rows;
            std::cout << "# seed=" << seed << " cap-vars=" << cap_vars << " cap-rows=" << cap_rows
                      << " trials=" << (trials < 0 ? std::string("default") : std::to_string(trials))
                      << " n=" << (nvars < 0 ? std::string("default") : std::to_string(nvars)) << "\n";
            bool all_ok = true;
            for (const auto& [name, fn] : kSuites) {
                if (suite != "all" && suite != name) continue;
                SweepResult r = fn(so);
                all_ok = all_ok && r.ok();
                std::cout << name << " " << r.summary() << "\n";
                for (const auto& n : r.notes) std::cout << "  note: " << n << "\n";
                for (const auto& f : r.failures) std::cout << "  failed: " << f << "\n";
            }
            if (suite == "all") std::cout << (all_ok ? "PASS all" : "FAIL some") << "\n";
        } else if (*inspect) {
            MlpInstance inst = read_mlp(iin);
            std::cout << "k=" << inst.k() << " n=[";
            for (int l = 1; l <= inst.k(); ++l) std::cout << (l > 1 ? "," : "") << inst.n(l);
            std::cout << "] m=[";
            for (int l = 1; l <= inst.k(); ++l) std::cout << (l > 1 ? "," : "") << inst.m(l);
            std::cout << "] sigma=" << encoding_size(inst) << "\n";
            ConditionReport cr = check_conditions(inst);
            std::cout << cr.summary() << "\n";
            for (const auto& v : cr.violations) std::cout << "  " << v << "\n";
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CapExceeded& e) {
        std::cerr << "cap: " << e.what() << "\n";
        return 3;
    } catch (const std::length_error& e) {
        std::cerr << "cap: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
