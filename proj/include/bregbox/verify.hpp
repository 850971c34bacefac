#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bregbox {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// The numbered acceptance experiments, in order. Deterministic given seed.
std::vector<CheckResult> acceptance_criteria(std::uint64_t seed);

/// Named subset used by the verify subcommand: adjoint (operator adjoint
/// identities), oracle (solver vs brute force), rates (slope experiments),
/// invariants (the remaining acceptance properties), all.
std::vector<CheckResult> verify_suite(const std::string& suite, std::uint64_t seed);

}  // namespace bregbox
