#include "symflow/report.hpp"

#include <cstdio>

namespace symflow {

const char* status_name(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::info: return "info";
    }
    return "info";
}

CheckResult timed(const std::function<CheckResult()>& fn) {
    auto start = std::chrono::steady_clock::now();
    CheckResult r = fn();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

bool all_passed(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (c.status == Status::fail) return false;
    return true;
}

std::string digest(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json to_json(const Report& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"status", status_name(c.status)},
                          {"residual", c.residual},
                          {"detail", c.detail},
                          {"seconds", c.seconds}});
    nlohmann::json j = {{"schema", 1},
                        {"command", r.command},
                        {"inputs_digest", digest(r.inputs)},
                        {"checks", checks},
                        {"passed", all_passed(r.checks)}};
    if (!r.data.empty()) j["data"] = r.data;
    return j;
}

int exit_code(const Report& r) { return all_passed(r.checks) ? 0 : 1; }

}  // namespace symflow
