#include <cstdio>

#include "sfl/cli.hpp"

// One line per acceptance criterion; exits nonzero when any fails.
int main() {
    const auto results = sfl::cli::run_criteria({}, 7);
    int failed = 0;
    for (const auto& c : results) {
        std::printf("criterion %2d %s  %s: %s [%.1f s]\n", c.id, c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.detail.c_str(), c.seconds);
        failed += c.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
    return failed == 0 ? 0 : 1;
}
