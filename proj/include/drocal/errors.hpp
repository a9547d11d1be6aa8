#pragma once

#include <stdexcept>
#include <string>

namespace drocal {

// Error taxonomy mirrors the CLI exit codes:
//   DomainError   -> 1 (bad inputs, bad config, violated preconditions)
//   SolverError   -> 2 (numerical failure in an optimization routine)
//   ProtocolError -> 3 (external simulator spoke garbage)
//   TransportError-> 3 (external simulator died / timed out)

class DomainError : public std::runtime_error {
  public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

class SolverError : public std::runtime_error {
  public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

class ProtocolError : public std::runtime_error {
  public:
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

class TransportError : public std::runtime_error {
  public:
    explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

// Non-fatal diagnostics (e.g. k too small relative to n1). Tests may silence.
void warn(const std::string& message);
void set_warnings_enabled(bool enabled);

} // namespace drocal
