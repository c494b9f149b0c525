// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_ERRORS_HPP_
#define CELLPILOT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace cellpilot {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; the message carries file/line/field context.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input violating a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

class CorruptFileError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cellpilot

#endif  // CELLPILOT_ERRORS_HPP_
