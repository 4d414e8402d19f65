// Acceptance gate: every release-blocking check, one verdict line each.
// Exit code 0 only when all criteria pass at their pinned tolerances.

#include <cstdio>

#include "bounce/validation.hpp"

int main() {
    const auto results = bounce::run_acceptance_suite();
    for (const auto& r : results) {
        std::printf("%s\n", bounce::format_criterion_line(r).c_str());
        if (!r.detail.empty()) std::printf("    detail: %s\n", r.detail.c_str());
    }
    const bool ok = bounce::all_pass(results);
    std::printf("%s\n", ok ? "ACCEPTANCE: all criteria pass"
                           : "ACCEPTANCE: FAILURES present");
    return ok ? 0 : 1;
}
