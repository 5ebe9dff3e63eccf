#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lpow {

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An argument lies outside the domain where the quantity is defined
/// (t beyond the radius, a mean beyond M_f, ...).
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Malformed textual input. `position` is the 0-based offset of the
/// offending character in the parsed text.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          message_(what),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }
    const std::string& message() const noexcept { return message_; }

    /// The same error relocated into an enclosing text starting at `offset`.
    ParseError shifted(std::size_t offset) const { return ParseError(message_, position_ + offset); }

private:
    std::string message_;
    std::size_t position_;
};

}  // namespace lpow
