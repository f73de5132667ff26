#pragma once
#include <stdexcept>
#include <string>

namespace ensopt {

// Exit-code contract: config errors -> 1, numerical failures -> 2,
// invariant violations (e.g. convergence-bound overflow) -> 3.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

struct InvariantError : std::runtime_error {
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 1;
    if (dynamic_cast<const NumericError*>(&e)) return 2;
    if (dynamic_cast<const InvariantError*>(&e)) return 3;
    return 2;
}

}  // namespace ensopt
