#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace brw {

/// Raised when a model is malformed or violates a standing assumption.
/// `letters` carries the failing assumption letters; empty for syntactic faults.
class validation_error : public std::runtime_error {
public:
    validation_error(std::string letters, const std::string& what)
        : std::runtime_error(what), letters_(std::move(letters)) {}
    const std::string& letters() const noexcept { return letters_; }

private:
    std::string letters_;
};

/// Raised when a numeric argument leaves its admissible range
/// (tilt target outside the support interval, beta outside (beta-, beta+), ...).
class range_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when the arithmetic type of the drift cannot be decided exactly.
class rationality_undetermined : public range_error {
public:
    using range_error::range_error;
};

/// Raised by profile consumers that need at least one particle.
class empty_profile_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when exact enumeration would exceed its state budget.
class explosion_guard_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when two inputs that must agree (orders, tilts, time indices,
/// model hashes) do not.
class mismatch_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a martingale value that must be positive is not.
class non_positive_w_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace brw
