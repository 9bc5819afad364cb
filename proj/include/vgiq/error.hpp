#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vgiq {

// Argument and domain violations use std::invalid_argument and
// std::domain_error directly. The types below carry extra context.

/// Malformed input document. `location` is a byte offset for JSON input
/// and a 1-based line number for line-oriented formats.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t location)
        : std::runtime_error(what), location_(location) {}

    std::size_t location() const noexcept { return location_; }

private:
    std::size_t location_;
};

/// Network failure (connection refused, timeout) after all retries.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unexpected HTTP status from a remote service.
class ProtocolError : public std::runtime_error {
public:
    ProtocolError(const std::string& what, int status)
        : std::runtime_error(what), status_(status) {}

    int status() const noexcept { return status_; }

private:
    int status_;
};

/// Invalid or incomplete run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input file missing or unreadable.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-item failure collected while parsing continues.
struct Reject {
    std::size_t index = 0;  // position of the item in its input
    std::string reason;
};

} // namespace vgiq
