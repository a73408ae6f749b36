#pragma once

#include <stdexcept>
#include <string>

namespace nptruth {

// Bad argument or bad scenario: the caller asked for something outside the
// mathematical domain of an operation. Maps to process exit code 2.
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical routine failed to converge or lost its bracket. Maps to
// process exit code 3.
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

inline void require_domain(bool cond, const std::string& what) {
    if (!cond) throw domain_error(what);
}

} // namespace nptruth
