#pragma once

#include <stdexcept>
#include <string>

namespace freshness {

// Base of every error the library raises. Callers that only care about
// "something went wrong at runtime" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid model parameters, distributions, or configuration values.
class ValidationError : public Error {
public:
    using Error::Error;
};

// The waiting-time scan hit z_max before the expected penalty reached beta.
class ThresholdUnreachable : public Error {
public:
    using Error::Error;
};

// h(c) has the wrong sign at a bracket endpoint.
class BracketInvalid : public Error {
public:
    using Error::Error;
};

// Exhaustive enumeration would exceed its candidate budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

// A replay asked for more service times than were supplied.
class SequenceExhausted : public Error {
public:
    using Error::Error;
};

} // namespace freshness
