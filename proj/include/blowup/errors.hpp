#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

// Bad input: violated precondition, regime mismatch, malformed data.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation ran but could not deliver its postcondition.
class ComputeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

}  // namespace blowup
