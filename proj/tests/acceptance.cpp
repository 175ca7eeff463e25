// Acceptance suite: runs every quantitative claim the toolkit is expected to
// reproduce and prints one pass/fail line per criterion.

#include <cstdio>
#include <iostream>

#include "rydrep/checks.hpp"

int main() {
    auto results = rydrep::run_paper_checks();
    std::cout << rydrep::format_check_report(results);

    int hard_failures = 0;
    for (const auto& result : results) {
        if (result.hard && !result.pass) ++hard_failures;
    }
    if (hard_failures > 0) {
        std::cout << hard_failures << " hard criteria failed\n";
        return 1;
    }
    std::cout << "all hard criteria passed\n";
    return 0;
}
