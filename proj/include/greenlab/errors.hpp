#pragma once

#include <stdexcept>
#include <string>

namespace greenlab {

enum class ErrorKind {
  Parameter,
  Domain,
  Singularity,
  Accuracy,
  Divergence,
  Precondition,
  InsufficientData,
  Spec,
  Data,
  Extraction,
  DegenerateSource,
  Contraction,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when refinement cannot reach the requested tolerance; carries the
// best error estimate that was achieved.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : Error(ErrorKind::Accuracy, what + " (achieved " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what) : Error(ErrorKind::Divergence, what) {}
};

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

}  // namespace greenlab
