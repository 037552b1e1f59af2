#pragma once

#include <stdexcept>
#include <string>

namespace flowdecomp {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The state or Jacobian left the finite range (or crossed the explosion
/// threshold). `last_finite_time()` is the last time at which both were finite.
class ExplosionError : public std::runtime_error {
 public:
  ExplosionError(const std::string& what, double last_finite_time)
      : std::runtime_error(what), last_finite_time_(last_finite_time) {}
  double last_finite_time() const noexcept { return last_finite_time_; }

 private:
  double last_finite_time_;
};

class NotDecomposableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::string path)
      : std::runtime_error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace flowdecomp
