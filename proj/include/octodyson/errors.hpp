#pragma once

#include <stdexcept>
#include <string>

namespace octodyson {

/// Base for every recoverable failure raised by the library. Contract
/// violations (bad dimensions, bad config) use std::invalid_argument.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SingularBase : public Error {
  public:
    SingularBase() : Error("M^0 is singular") {}
};

class NotSymmCompatible : public Error {
  public:
    explicit NotSymmCompatible(double residual)
        : Error("commutation condition M^A (M^0)^-1 M^B = M^B (M^0)^-1 M^A violated, residual " +
                std::to_string(residual)),
          residual_(residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

class SingularCore : public Error {
  public:
    SingularCore() : Error("sum_C M^C (M^0)^-1 M^C is singular") {}
};

class NearSingularShift : public Error {
  public:
    NearSingularShift(double shift, double distance)
        : Error("shift " + std::to_string(shift) + " lies within " + std::to_string(distance) +
                " of the spectrum") {}
};

class NoAdmissibleRoot : public Error {
  public:
    NoAdmissibleRoot() : Error("multiplicity quadratic has no positive real root") {}
};

class InsufficientData : public Error {
  public:
    InsufficientData(std::size_t have, std::size_t need)
        : Error("gap statistics need at least " + std::to_string(need) + " samples, got " +
                std::to_string(have)) {}
};

}  // namespace octodyson
