#pragma once

#include <stdexcept>
#include <string>

namespace bco {

// Bad wiring: mismatched dimensions, unknown environment names, invalid
// configuration values.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Bad data handed to an operation (empty buffers, out-of-range actions).
struct InputError : std::invalid_argument {
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Operation called in the wrong order (e.g. inference before training).
struct StateError : std::logic_error {
  explicit StateError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace bco
