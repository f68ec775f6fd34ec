#ifndef ITTS_ERRORS_HPP
#define ITTS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace itts {

// Error hierarchy used across the engine. All errors are recoverable at the
// session level; none leave shared state behind.

struct EmptyInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownSymbol : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SessionClosed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoiseExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AlignmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PolicyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScheduleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AlignmentMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyComparison : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace itts

#endif  // ITTS_ERRORS_HPP
