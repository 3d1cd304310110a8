#pragma once

#include <stdexcept>
#include <string>

namespace multirank {

// Error categories map straight onto CLI exit codes:
// usage = 1, data = 2, internal invariant = 3.

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Model file written by a newer format than this build understands.
class VersionError : public DataError {
 public:
  explicit VersionError(const std::string& what) : DataError(what) {}
};

class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace multirank
