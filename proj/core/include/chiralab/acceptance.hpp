#pragma once

#include <iosfwd>
#include <string>

namespace chiralab {

struct AcceptanceOptions {
    std::string only;        // empty = run everything; else a criterion id "1".."9"
    double tol_scale = 1.0;  // CHIRALAB_TOL_OVERRIDE, for CI triage only
    int threads = 1;
};

/// Runs the acceptance criteria, printing one pass/fail line per criterion
/// with the measured values. Returns the number of failed criteria.
int run_acceptance(std::ostream& os, const AcceptanceOptions& options);

}  // namespace chiralab
