// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace rankfair {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a documented format or invariant (bad test-set file,
/// dangling judgment, inconsistent neutral flag).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A function was called outside its documented domain (length mismatch,
/// depth out of range, p outside (0,1), empty input where one is required).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An embedding provider could not produce vectors.
class ProviderError : public Error {
public:
    using Error::Error;
};

/// A translation backend failed after exhausting its retries.
class BackendError : public Error {
public:
    using Error::Error;
};

}  // namespace rankfair
