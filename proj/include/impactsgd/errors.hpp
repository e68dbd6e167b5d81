#pragma once

#include <stdexcept>
#include <string>

namespace impactsgd {

/// A model or optimizer parameter lies outside its admissible domain.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Sequence lengths disagree (schedule vs horizon, noise vs horizon, ...).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or invalid experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace impactsgd
