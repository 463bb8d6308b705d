#pragma once

#include <stdexcept>
#include <string>

namespace polyshoot {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define POLYSHOOT_ERROR(Name)          \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

POLYSHOOT_ERROR(ValidationError);
POLYSHOOT_ERROR(UnknownCatalogName);
POLYSHOOT_ERROR(DimensionTooSmall);
POLYSHOOT_ERROR(DegenerateScaling);
POLYSHOOT_ERROR(DomainError);
POLYSHOOT_ERROR(NeedsRHS);
POLYSHOOT_ERROR(ResolutionError);
POLYSHOOT_ERROR(StepLimitExceeded);
POLYSHOOT_ERROR(SeriesRadiusTooLarge);
POLYSHOOT_ERROR(NoContraction);
POLYSHOOT_ERROR(BlowUpDominates);
POLYSHOOT_ERROR(ConvergedToTrivial);
POLYSHOOT_ERROR(UnsupportedBoundaryKind);

#undef POLYSHOOT_ERROR

/// The solution left every finite bound before the requested radius.
class Overflow : public Error {
 public:
  Overflow(double radius, const std::string& what) : Error(what), radius_(radius) {}
  double radius() const noexcept { return radius_; }

 private:
  double radius_;
};

/// Raised by boundary residuals when the trial profile blows up before R.
class BlowUpBeforeRadius : public Overflow {
 public:
  using Overflow::Overflow;
};

class NewtonStalled : public Error {
 public:
  NewtonStalled(double best_residual, const std::string& what)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace polyshoot
