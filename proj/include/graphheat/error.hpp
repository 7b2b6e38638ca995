#ifndef GRAPHHEAT_ERROR_HPP
#define GRAPHHEAT_ERROR_HPP

#include <cstdio>
#include <stdexcept>
#include <string>

namespace graphheat {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (bad radius, non-root junction, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A request reached past the declared generation horizon of a graph.
/// The caller has to raise the horizon; results are never silently truncated.
class HorizonError : public Error {
 public:
  HorizonError(int requested, int horizon)
      : Error("radius " + std::to_string(requested) +
              " exceeds generation horizon " + std::to_string(horizon)),
        requested_(requested),
        horizon_(horizon) {}

  int requested() const noexcept { return requested_; }
  int horizon() const noexcept { return horizon_; }

 private:
  int requested_;
  int horizon_;
};

/// A materialization would exceed the configured vertex cap.
class CapError : public Error {
 public:
  CapError(double needed, double cap)
      : Error("vertex count " + format(needed) + " exceeds memory cap " +
              format(cap)),
        needed_(needed),
        cap_(cap) {}

  double needed() const noexcept { return needed_; }
  double cap() const noexcept { return cap_; }

 private:
  static std::string format(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  double needed_;
  double cap_;
};

/// An enumeration would visit more sets than its budget allows.
class BudgetError : public Error {
 public:
  explicit BudgetError(unsigned long long budget)
      : Error("enumeration budget of " + std::to_string(budget) +
              " sets exceeded; use the curvature bound or a smaller set size"),
        budget_(budget) {}

  unsigned long long budget() const noexcept { return budget_; }

 private:
  unsigned long long budget_;
};

/// A numerical invariant that cannot fail on a correct assembly did fail
/// (singular lambda-system, non-monotone exhaustion, eigensolver breakdown).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphheat

#endif  // GRAPHHEAT_ERROR_HPP
