#pragma once

#include <stdexcept>
#include <string>

namespace replica {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// No replica count up to the allowed maximum reaches the availability target.
class UnreachableTarget : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientNodes : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BlockTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed config, scenario or state file. The message names the offending key.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace replica
