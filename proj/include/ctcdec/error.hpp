// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ctcdec {

/// Base class of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a domain precondition (invalid token id, bad parameter, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable file.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctcdec
