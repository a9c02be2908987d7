#pragma once

#include <stdexcept>
#include <string>

namespace pagraph {

// Parameter outside the admissible model domain (C < 1, delta <= -C, bad node
// ids, pole arguments to the gamma helpers, ...).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Corrupted, truncated or version-mismatched snapshot.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Memory or size limits hit during a Monte Carlo run.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pagraph
