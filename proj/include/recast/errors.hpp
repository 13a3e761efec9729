#pragma once

#include <stdexcept>
#include <string>

namespace recast {

// Inputs on disk are missing or unreadable.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A file exists but a row cannot be interpreted; message names file and line.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid data that violates a domain invariant.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace recast
