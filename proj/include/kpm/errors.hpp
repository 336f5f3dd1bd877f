#pragma once

#include <stdexcept>
#include <string>

namespace kpm {

// Typed errors for input and model violations. Numerical uncertainty is
// never an exception: filtration scans return three-valued verdicts instead.

struct DuplicatePoint : std::runtime_error {
  explicit DuplicatePoint(const std::string& what) : std::runtime_error(what) {}
};

struct NotIncreasing : std::runtime_error {
  explicit NotIncreasing(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a factorization pivot falls at or below the relative floor
// eps_pd * (max Gram diagonal). pivot_index is 1-based along the filtration.
struct NotPositiveDefinite : std::runtime_error {
  NotPositiveDefinite(const std::string& what, int index)
      : std::runtime_error(what), pivot_index(index) {}
  int pivot_index;
};

struct DomainViolation : std::runtime_error {
  explicit DomainViolation(const std::string& what) : std::runtime_error(what) {}
};

struct IntegerOverflow : std::overflow_error {
  explicit IntegerOverflow(const std::string& what) : std::overflow_error(what) {}
};

struct SelfLoop : std::runtime_error {
  explicit SelfLoop(const std::string& what) : std::runtime_error(what) {}
};

struct NonpositiveConductance : std::runtime_error {
  explicit NonpositiveConductance(const std::string& what) : std::runtime_error(what) {}
};

struct Disconnected : std::runtime_error {
  explicit Disconnected(const std::string& what) : std::runtime_error(what) {}
};

struct SubsetMembershipUnverified : std::runtime_error {
  explicit SubsetMembershipUnverified(const std::string& what) : std::runtime_error(what) {}
};

struct NormDivergent : std::runtime_error {
  explicit NormDivergent(const std::string& what) : std::runtime_error(what) {}
};

struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kpm
