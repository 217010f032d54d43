#pragma once

#include <stdexcept>
#include <string>

namespace dihedral {

// Malformed arguments: bad discriminant, even p, non-positive conductor.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Well-formed request outside the supported field types or search caps.
class Unsupported : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A search ran past its configured bound without finding an answer.
class SearchExhausted : public Unsupported {
public:
    using Unsupported::Unsupported;
};

// An internal consistency check failed; always a bug.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw InvariantViolation(what);
}

} // namespace dihedral
