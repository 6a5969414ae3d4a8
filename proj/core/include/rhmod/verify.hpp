#pragma once

#include "rhmod/config.hpp"

namespace rhmod {

struct CheckResult {
    std::string name;
    bool passed = false;
    bool skipped = false;
    std::string detail;
    double value = 0;       // measured quantity (violation, deviation, ...)
    double threshold = 0;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_passed = false;
    NewtonReport newton;
};

// The full self-consistency battery on one configuration: modulation solve,
// jump conditions, the determinant-vs-2g-f identity, the branchpoint
// derivative lemma and theorem, the local exponent, the c_j cross-formula,
// the segment reductions, the constants Wronskian and the velocity
// identities. Degenerate configurations (f with vanishing c_j) skip the
// checks that require a nondegenerate Jacobian, with the reason recorded.
VerifyReport run_verification(const RunConfig& cfg, int jobs = 1);

nlohmann::json verify_report_json(const VerifyReport& rep, const RunConfig& cfg);

} // namespace rhmod
