#pragma once

#include <stdexcept>
#include <string>

namespace rpe {

// Exit-code mapping used by the CLI: validation -> 2, numeric -> 3, size guard -> 4.
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct size_guard_error : std::runtime_error {
    explicit size_guard_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace rpe
