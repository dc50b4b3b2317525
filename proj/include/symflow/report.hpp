#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace symflow {

enum class Status { pass, fail, info };

const char* status_name(Status s);

struct CheckResult {
    std::string name;
    Status status = Status::info;
    double residual = 0.0;  // max abs numeric residual, or 0 for exact checks
    std::string detail;
    double seconds = 0.0;
};

inline CheckResult make_check(std::string name, bool ok, std::string detail = {}, double residual = 0.0) {
    return {std::move(name), ok ? Status::pass : Status::fail, residual, std::move(detail), 0.0};
}

// Runs fn and records its wall time in the returned check.
CheckResult timed(const std::function<CheckResult()>& fn);

bool all_passed(const std::vector<CheckResult>& checks);

struct Report {
    std::string command;
    std::string inputs;  // canonical description of the invocation
    std::vector<CheckResult> checks;
    nlohmann::json data = nlohmann::json::object();
};

// 64-bit FNV-1a, as 16 hex digits.
std::string digest(const std::string& text);

nlohmann::json to_json(const Report& r);
int exit_code(const Report& r);

}  // namespace symflow
