#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bounce {

/**
 * One end-to-end check of the library. `measured` is the worst observed
 * value normalized by its pinned tolerance, so pass means measured <=
 * threshold where threshold = 1/tighten (1.0 for the standard run).
 * `detail` carries the raw sub-check values with their raw tolerances.
 */
struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 1.0;
    std::string detail;
};

/**
 * Run the full acceptance suite. tighten > 1 divides every numeric tolerance
 * (margin study); boolean certificates are unaffected. Exceptions inside a
 * criterion are caught and reported as failures, never propagated.
 */
std::vector<CriterionResult> run_acceptance_suite(double tighten = 1.0);

bool all_pass(const std::vector<CriterionResult>& results);

/// One formatted report line per criterion: "[PASS] 3 symplecticity ...".
std::string format_criterion_line(const CriterionResult& r);

/// Max over `samples` points of |fun(t+1) - fun(t)|; audits claimed periodicity.
double periodicity_defect(const std::function<double(double)>& fun, int samples);

} // namespace bounce
