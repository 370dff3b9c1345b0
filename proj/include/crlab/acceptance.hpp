#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace crlab {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    int workers = 1;
    // Directory for the determinism criterion's scratch files.
    std::string scratch_dir = "/tmp";
    // Criteria to run (1-based); empty means all.
    std::vector<int> only;
};

// Runs the acceptance criteria, printing one [PASS]/[FAIL] line per
// criterion to `log` as each finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            std::ostream& log);

}  // namespace crlab
