#pragma once

// Invariant suite over one profile: algebraic identities of the geometry,
// closure and symmetry of the flight, Abel identity of the Floquet flights,
// and residuals of eigenfunctions known in closed form.

#include <cstdint>
#include <string>
#include <vector>

#include "rotmin/profile.hpp"

namespace rotmin {

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    bool passed = false;
};

struct CheckOptions {
    std::uint64_t seed = 20240531;
    int random_states = 1000;
    int abel_samples = 5;  ///< per operator
    int jobs = 1;
};

std::vector<CheckResult> run_checks(const PeriodicProfile& profile, const CheckOptions& options = {});

bool all_passed(const std::vector<CheckResult>& results);

/// "name  measured <= threshold  PASS|FAIL" per line.
std::string format_checks(const std::vector<CheckResult>& results);

}  // namespace rotmin
