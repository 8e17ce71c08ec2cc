#pragma once

#include <stdexcept>
#include <string>

namespace hdpa {

// Bad caller-supplied values: zero scalar, off-curve point, bad plan selector.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Mismatched operand widths or lengths.
class ArgumentError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// A multiplier plan that is malformed or does not fit the operand width.
class PlanError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Mathematically undefined request, e.g. inverse of zero.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Unparseable text input (hex, CSV, plan text, config).
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace hdpa
