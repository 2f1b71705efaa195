#pragma once

#include <stdexcept>
#include <string>

namespace tracesim {

/// Raised when a rate, probability or count is outside its domain.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed network, config or trajectory file content.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tracesim
