#pragma once

#include <stdexcept>
#include <string>

namespace pacs {

/// Raised for infeasible or out-of-domain requests (bad dimensions, violated
/// hypotheses, non-isometric profiles). The CLI maps these to exit code 1.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for malformed files, unknown config keys and I/O failures
/// (CLI exit code 2).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Coherence of an ensemble with unbounded atoms (e.g. Gaussian rows).
class CoherenceUndefined : public DomainError {
 public:
  explicit CoherenceUndefined(const std::string& what) : DomainError(what) {}
};

}  // namespace pacs
