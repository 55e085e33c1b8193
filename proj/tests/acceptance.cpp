// One line per acceptance criterion; exit status 1 if any fails.
#include <cstdio>
#include <string>
#include <vector>

#include "mlp/sweeps.hpp"

using namespace mlp;

namespace {

struct Criterion {
    int id;
    const char* what;
    std::vector<SweepResult (*)(const SweepOptions&)> suites;
    double limit_s;  // 0 for none
};

}  // namespace

int main() {
    const std::vector<Criterion> crits = {
        {1, "SAT gadget value 0 iff satisfiable, else 1", {verify_satblp}, 600},
        {2, "LEXSAT gadget recovers the lexmax assignment", {verify_lexsat}, 0},
        {3, "compact LEXSAT gadgets: C1-C3 and equal values", {verify_compact}, 0},
        {4, "QBF k=3 gadget values, plain and search", {verify_qlp}, 0},
        {5, "penalty: q1 = 1 on every bottom optimum at fractional s1", {verify_penalty}, 0},
        {6, "non-attainment examples", {verify_examples}, 0},
        {7, "attainability gadget", {verify_attain}, 0},
        {8, "SAT-UNSAT gadget", {verify_satunsat}, 0},
        {9, "k=5 feasibility gadget and scaling variant", {verify_feas, verify_pifeas}, 0},
        {10, "transform invariants", {verify_transforms}, 0},
        {11, "sensitivity bound", {verify_sensitivity}, 0},
        {12, "value search round trip and oracle agreement", {verify_valuesearch, verify_oracles}, 300},
    };
    SweepOptions o;
    int failed = 0;
    std::printf("# seed=%llu cap-vars=%d cap-rows=%d\n", static_cast<unsigned long long>(o.seed), o.cap_vars, o.cap_rows);
    for (const auto& c : crits) {
        long passed = 0, total = 0;
        double secs = 0;
        bool ok = true;
        std::vector<std::string> detail;
        for (auto fn : c.suites) {
            SweepResult r;
            try {
                r = fn(o);
            } catch (const std::exception& e) {
                r.failures.push_back(std::string("exception: ") + e.what());
                r.total += 1;
            }
            passed += r.passed;
            total += r.total;
            secs += r.seconds;
            ok = ok && r.ok();
            detail.push_back(r.name + " " + std::to_string(r.passed) + "/" + std::to_string(r.total));
            for (const auto& n : r.notes) detail.push_back("  note: " + n);
            for (const auto& f : r.failures) detail.push_back("  failed: " + f);
        }
        bool in_time = c.limit_s <= 0 || secs <= c.limit_s;
        ok = ok && in_time;
        failed += !ok;
        std::printf("criterion %2d: %s %ld/%ld %.1fs%s  %s\n", c.id, ok ? "PASS" : "FAIL", passed, total, secs,
                    c.limit_s > 0 ? (" (limit " + std::to_string(static_cast<int>(c.limit_s)) + "s)").c_str() : "",
                    c.what);
        for (const auto& d : detail) std::printf("    %s\n", d.c_str());
        std::fflush(stdout);
    }
    std::printf("%s: %d of %zu criteria failed\n", failed ? "FAIL" : "PASS", failed, crits.size());
    return failed ? 1 : 0;
}
