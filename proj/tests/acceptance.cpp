// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cstdio>

#include "photocell/acceptance.hpp"

int main() {
    const auto results = photocell::run_acceptance();
    int failed = 0;
    for (const auto& r : results) {
        std::printf("%s %-5s %s -- %s [%.3f s]\n", r.passed ? "PASS" : "FAIL", r.id.c_str(), r.title.c_str(),
                    r.detail.c_str(), r.seconds);
        failed += r.passed ? 0 : 1;
    }
    std::printf("%zu/%zu acceptance criteria passed\n", results.size() - static_cast<std::size_t>(failed),
                results.size());
    return failed == 0 ? 0 : 1;
}
