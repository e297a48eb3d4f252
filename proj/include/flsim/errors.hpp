#pragma once

#include <stdexcept>
#include <string>

namespace flsim {

// Bad parameter in a config file or a constructed parameter block.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Input outside an operation's documented domain.
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Mismatched grid/trace geometry between two arguments.
struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace flsim
