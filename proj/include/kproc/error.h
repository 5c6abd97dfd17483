#ifndef KPROC_ERROR_H_
#define KPROC_ERROR_H_

#include <stdexcept>
#include <string>

namespace kproc {

// Root of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// An argument lies outside the domain where the quantity is finite or
// defined (e.g. a time outside the simulated horizon).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The time attributed to truncated deep states exceeded the caller's budget.
class BudgetError : public Error {
 public:
  BudgetError(double realized_tail_time, double budget);

  double realized_tail_time() const { return realized_tail_time_; }
  double budget() const { return budget_; }

 private:
  double realized_tail_time_;
  double budget_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace kproc

#endif  // KPROC_ERROR_H_
