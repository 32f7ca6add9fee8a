// Runs the fifteen acceptance criteria with their default parameter sets and
// prints one PASS/FAIL line each. Exit status 1 if any fails.

#include <cstdio>
#include <string>

#include "besselsg/experiments.hpp"

int main(int argc, char** argv) {
    using namespace besselsg;
    RunConfig cfg;
    cfg.output_dir = argc > 1 ? std::filesystem::path(argv[1]) : default_output_dir() / "acceptance";
    int failed = 0;
    run_suite(cfg, [&](const ExperimentReport& r) {
        if (!r.passed) ++failed;
        std::printf("criterion %2d %-20s %s  (%.1fs of %.0fs)", r.criterion, r.name.c_str(), r.passed ? "PASS" : "FAIL",
                    r.runtime_s, r.budget_s);
        if (!r.error.empty()) {
            std::printf("  error: %s", r.error.c_str());
        } else if (const Check* c = r.first_failure()) {
            std::printf("  %s: %.6g %s %.6g", c->what.c_str(), c->lhs, c->op.c_str(), c->rhs);
        } else if (!r.checks.empty()) {
            // the tightest check: largest lhs/rhs among ordered comparisons
            const Check* tight = nullptr;
            double best = -1.0;
            for (const auto& k : r.checks)
                if ((k.op == "<" || k.op == "<=") && k.rhs > 0.0 && std::isfinite(k.rhs) && k.what != "runtime seconds" &&
                    k.lhs / k.rhs > best) {
                    best = k.lhs / k.rhs;
                    tight = &k;
                }
            if (tight) std::printf("  tightest: %s %.3g %s %.3g", tight->what.c_str(), tight->lhs, tight->op.c_str(), tight->rhs);
        }
        std::printf("\n");
        std::fflush(stdout);
    });
    std::printf("%d of 15 criteria failed; details in %s\n", failed, (cfg.output_dir / "summary.json").string().c_str());
    return failed == 0 ? 0 : 1;
}
