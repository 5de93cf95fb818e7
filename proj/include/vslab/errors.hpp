#pragma once

#include <stdexcept>
#include <string>

namespace vslab {

// Exit-code taxonomy (see README): 2 = parameter/domain/capacity/parse error,
// 3 = work-budget exceeded, 4 = validation verdict FAIL (not an exception).

// Bad argument values, domain violations, malformed files, exceeded size caps.
class ParameterError : public std::runtime_error {
public:
    explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

// An exact search or branch-and-bound exceeded its configured work budget.
// Never a silent fallback; callers may retry with a greedy mode.
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

} // namespace vslab
