// Runs the numbered acceptance checks and prints one PASS/FAIL line each.
// Exit status is the number of failed checks.

#include <iostream>
#include <string>

#include "tubelab/suites.hpp"

int main(int argc, char** argv) {
    tubelab::SuiteOptions options;
    options.progress = &std::cout;
    const std::string suite = argc > 1 ? argv[1] : "paper-checks";
    int failed = 0;
    for (const auto& r : tubelab::run_suite(suite, options)) failed += !r.pass;
    std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << '\n';
    return failed;
}
