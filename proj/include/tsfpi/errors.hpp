// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace tsfpi {

// A caller broke an operation's precondition (mismatched formats, bad
// parameter ranges). Maps to TSFPI_ERR_INVALID_ARGUMENT at the C boundary.
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

// NaN inputs or a diverging simulation.
class NumericError : public std::domain_error {
 public:
  explicit NumericError(const std::string& what) : std::domain_error(what) {}
};

// Unreadable or malformed configuration file.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Output files could not be written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tsfpi
