// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace llrecall {

// Root of all library errors. Anything that is not an IoError is a domain
// error (bad data, bad configuration, broken contract).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Missing files, unreadable or unwritable paths.
class IoError : public Error {
public:
    using Error::Error;
};

// Input data violates a record, gold-set, or stoplist invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Invalid model or grid configuration, or a violated function precondition.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Persisted file has the wrong version, is truncated, or fails its checksum.
class FormatError : public Error {
public:
    using Error::Error;
};

// A model cannot be built from the given data (empty corpus, all-zero matrix).
class DegenerateError : public Error {
public:
    using Error::Error;
};

}  // namespace llrecall
