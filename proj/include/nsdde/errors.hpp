#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nsdde {

// Bad input text: malformed expression, unknown name, bad arity.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what + " (at byte " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Math/domain failures: ln of a nonpositive value, division by zero,
// non-finite intermediate, root bracket failure, no admissible step size.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad configuration: inconsistent dimensions, invalid generator, missing keys.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown by the EM engine when a trajectory leaves the representable range.
class PathExplosion : public std::runtime_error {
public:
    PathExplosion(long step, const std::string& what)
        : std::runtime_error(what), step_(step) {}

    long step() const noexcept { return step_; }

private:
    long step_;
};

} // namespace nsdde
