#pragma once

#include <stdexcept>
#include <string>

namespace memnet {

/// Root of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, inconsistent dimensions, invalid settings.
/// The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The numerics could not produce a trustworthy answer for valid input.
/// The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

#define MEMNET_DEFINE_ERROR(Name, Base)  \
  class Name : public Base {             \
   public:                               \
    using Base::Base;                    \
  };

MEMNET_DEFINE_ERROR(DimensionMismatch, ValidationError)
MEMNET_DEFINE_ERROR(MissingDistances, ValidationError)
MEMNET_DEFINE_ERROR(MissingCoordinates, ValidationError)
MEMNET_DEFINE_ERROR(DuplicateCoordinates, ValidationError)
MEMNET_DEFINE_ERROR(NonPositiveVariance, ValidationError)
MEMNET_DEFINE_ERROR(UnknownPreset, ValidationError)
MEMNET_DEFINE_ERROR(UnknownTable, ValidationError)
MEMNET_DEFINE_ERROR(MalformedCsv, ValidationError)
MEMNET_DEFINE_ERROR(LeadingGap, ValidationError)
MEMNET_DEFINE_ERROR(TrailingGap, ValidationError)
MEMNET_DEFINE_ERROR(InsufficientData, ValidationError)
MEMNET_DEFINE_ERROR(InfeasibleInit, ValidationError)

MEMNET_DEFINE_ERROR(NotStationary, NumericalError)
MEMNET_DEFINE_ERROR(NearDefective, NumericalError)
MEMNET_DEFINE_ERROR(SingularDesign, NumericalError)
MEMNET_DEFINE_ERROR(AllCandidatesFailed, NumericalError)

#undef MEMNET_DEFINE_ERROR

/// Iterative solver hit its iteration cap.
class NoConvergence : public NumericalError {
 public:
  NoConvergence(const std::string& what, int iterations)
      : NumericalError(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

/// A prediction-error covariance lost positive definiteness during the
/// Durbin-Levinson recursion.
class NotPositiveDefinite : public NumericalError {
 public:
  NotPositiveDefinite(const std::string& what, int step)
      : NumericalError(what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace memnet
