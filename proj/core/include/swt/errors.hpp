// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace swt {

/// Base class of every recoverable error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rank > 4, zero extents, or incompatible operand shapes.
class InvalidShapeError : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid inputs (empty lattice, label out of vocabulary, ...).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value surfaced where only finite values are legal.
class NumericalDegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Raised when an allocation would push the tracker past its ceiling.
/// Carries the name of the offending tensor and its requested size.
class OutOfMemoryError : public Error {
 public:
  OutOfMemoryError(std::string tensor, std::int64_t request_bytes,
                   std::int64_t live_bytes, std::int64_t ceiling_bytes)
      : Error("allocation of tensor '" + tensor + "' (" +
              std::to_string(request_bytes) + " bytes) exceeds ceiling " +
              std::to_string(ceiling_bytes) + " with " +
              std::to_string(live_bytes) + " bytes live"),
        tensor_(std::move(tensor)),
        request_bytes_(request_bytes) {}

  const std::string& tensor() const noexcept { return tensor_; }
  std::int64_t request_bytes() const noexcept { return request_bytes_; }

 private:
  std::string tensor_;
  std::int64_t request_bytes_;
};

/// Brute-force oracle asked to enumerate an instance past its guard.
class InstanceTooLargeError : public Error {
 public:
  using Error::Error;
};

/// Unwritable report destination and friends.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace swt
