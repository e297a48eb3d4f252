#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flsim::oracles {

struct OracleCheck {
    std::string name;
    bool pass = false;
    double worst = 0.0;      // largest observed deviation
    double tolerance = 0.0;  // allowed deviation
    std::string detail;
};

// Independent re-derivations of the numerically derived quantities, checked
// against the shipped implementations:
//   - translation-kernel overlap weights vs rejection sampling (100 cases)
//   - threshold rule vs two-action risk argmin (1e4 cases)
//   - Clopper-Pearson bounds vs binomial-tail bisection (1e3 cases, k=0/k=n)
//   - propagation with zero displacement and zero rotation is bit-exact
//   - per-target kernel coverage never exceeds 1 (within 1e-6)
std::vector<OracleCheck> run_derived_value_oracles(std::uint64_t seed);

std::string format_report(const std::vector<OracleCheck>& checks);
bool all_pass(const std::vector<OracleCheck>& checks);

}  // namespace flsim::oracles
