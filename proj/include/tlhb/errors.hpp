#pragma once

#include <stdexcept>
#include <string>

namespace tlhb {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonSymmetric : Error {
  using Error::Error;
};

struct NotSpd : Error {
  using Error::Error;
};

/// The structural zero count disagrees with the computed spectrum.
struct DegenerateSpectrum : Error {
  using Error::Error;
};

struct InvalidSize : Error {
  using Error::Error;
};

struct RankConditionUnreachable : Error {
  using Error::Error;
};

/// M_s + M_s^T - A_s failed the SPD certificate.
struct NotConvergent : Error {
  using Error::Error;
};

struct NotSquareCase : Error {
  using Error::Error;
};

struct InvalidCoarseSize : Error {
  using Error::Error;
};

/// Range(P) is not contained in Range(P_hat).
struct NotNested : Error {
  using Error::Error;
};

/// A^{-1} - S Mt^{-1} S^T is numerically indefinite.
struct SingularComplement : Error {
  using Error::Error;
};

/// A proved two-sided bound failed numerically (implementation bug).
struct BoundViolation : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace tlhb
