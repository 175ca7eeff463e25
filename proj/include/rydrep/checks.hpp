#pragma once

#include <string>
#include <vector>

namespace rydrep {

/// One verifiable claim about the model's outputs, with the values that were
/// compared. Hard criteria gate the exit status; the multi-node item is a
/// documented-discrepancy report and only its qualitative orderings are
/// asserted.
struct CheckResult {
    int id = 0;
    std::string name;
    bool hard = true;
    bool pass = false;
    std::vector<std::string> details;
};

std::vector<CheckResult> run_paper_checks();

/// Formats one pass/fail line per criterion plus indented detail lines.
std::string format_check_report(const std::vector<CheckResult>& results);

bool all_hard_criteria_pass(const std::vector<CheckResult>& results);

}  // namespace rydrep
