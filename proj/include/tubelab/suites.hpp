#pragma once
// Verification suites: brute-force oracle agreement, invariants, and the
// numbered acceptance checks. Each check yields one PASS/FAIL record.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tubelab {

struct CheckResult {
    std::string id;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct SuiteOptions {
    int threads = 1;
    std::uint64_t seed = 1;
    std::ostream* progress = nullptr;  // receives each line as soon as its check ends
};

// "oracles", "invariants", "paper-checks"
const std::vector<std::string>& suite_names();
// Throws std::invalid_argument for an unknown suite.
std::vector<CheckResult> run_suite(const std::string& name, const SuiteOptions& options = {});

std::string format_result(const CheckResult& result);

}  // namespace tubelab
