#include <chrono>
#include <cstdio>
#include <exception>

#include "symflow/pipeline.hpp"

using namespace symflow;

int main() {
    PipelineOptions opts;
    int failed = 0;
    for (const auto& c : acceptance_criteria()) {
        auto start = std::chrono::steady_clock::now();
        std::vector<CheckResult> checks;
        std::string error;
        try {
            checks = c.run(opts);
        } catch (const std::exception& e) {
            error = e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool ok = error.empty() && all_passed(checks);
        failed += ok ? 0 : 1;
        std::printf("criterion %d %-34s %s (%zu checks, %.2f s)\n", c.number, c.title.c_str(), ok ? "PASS" : "FAIL",
                    checks.size(), secs);
        if (!error.empty()) std::printf("    error: %s\n", error.c_str());
        for (const auto& r : checks)
            if (r.status == Status::fail) std::printf("    failed: %s: %s\n", r.name.c_str(), r.detail.c_str());
    }
    std::printf("%d of %zu criteria failed\n", failed, acceptance_criteria().size());
    return failed == 0 ? 0 : 1;
}
