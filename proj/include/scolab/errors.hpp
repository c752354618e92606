#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace scolab {

/// Base class for every error raised by the library.
class LabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vector whose length does not match the instance dimension.
class DimensionError : public LabError {
 public:
  DimensionError(std::size_t expected, std::size_t actual);
  std::size_t expected() const { return expected_; }
  std::size_t actual() const { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

/// A parameter or sample outside its admissible domain.
class DomainError : public LabError {
 public:
  using LabError::LabError;
};

/// An iterate became non-finite. `step()` is the index t of the first bad w_t.
class DivergenceError : public LabError {
 public:
  explicit DivergenceError(std::int64_t step);
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

/// Rejection sampling ran out of attempts before the event held.
class ConditioningError : public LabError {
 public:
  ConditioningError(std::uint64_t attempts, double hit_rate);
  std::uint64_t attempts() const { return attempts_; }
  double hit_rate() const { return hit_rate_; }

 private:
  std::uint64_t attempts_;
  double hit_rate_;
};

/// Bad command-line or configuration input.
class UsageError : public LabError {
 public:
  using LabError::LabError;
};

class IoError : public LabError {
 public:
  using LabError::LabError;
};

}  // namespace scolab
