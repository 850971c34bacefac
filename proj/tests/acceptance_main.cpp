// Acceptance harness: runs every acceptance experiment at its pinned
// tolerance and prints one pass/fail line per criterion.

#include "bregbox/verify.hpp"

#include <cstdint>
#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20240613ull;
    const auto results = bregbox::acceptance_criteria(seed);
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
        if (!r.detail.empty()) std::cout << " -- " << r.detail;
        std::cout << "\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "ACCEPTANCE: all criteria passed" : "ACCEPTANCE: FAILURES present")
              << "\n";
    return all_pass ? 0 : 1;
}
