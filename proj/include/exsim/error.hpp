// SPDX-License-Identifier: Apache-2.0
// Error types shared across the exsim library.

#pragma once

#include <stdexcept>
#include <string>

namespace exsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Aignet construction contract violations (duplicate names, unset next-state, ...).
struct BuildError : Error {
    using Error::Error;
};

// Source-level syntax or unsupported-construct errors; carries a position.
struct ParseError : Error {
    int line = 0;
    int col = 0;
    ParseError(const std::string& msg, int line_, int col_)
        : Error(msg + " at line " + std::to_string(line_) + ", column " + std::to_string(col_)),
          line(line_), col(col_) {}
};

struct ElabError : Error {
    using Error::Error;
};

struct VcdError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct EngineError : Error {
    using Error::Error;
};

// Replay validation failed: a SAT answer did not reproduce under concrete
// simulation. Always a bug in the checker itself, never a user error.
struct SoundnessError : Error {
    using Error::Error;
};

} // namespace exsim
