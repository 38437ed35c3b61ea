#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypharm {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument too close to a pole of a meromorphic function.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Grid too coarse or inconsistent for the requested operation.
class GridError : public Error {
 public:
  using Error::Error;
};

/// Non-fatal diagnostics collected by numerical operations (truncation,
/// aliasing, support leakage, ...). Operations append; callers decide.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) {
    sink->push_back(std::move(message));
  }
}

/// Measure normalizations on H^2 (curvature -1, dx = Riemannian area, db of
/// total mass one). With c(-i rho) = 1 the Plancherel formula
///   ||u||^2 = int_0^inf int_B |Fu|^2 |c|^{-2} dlambda db
/// holds for dlambda = kSpectralMeasure * dlambda_Lebesgue. The horocycle
/// variable carries the dual measure dH = kHMeasure * dH_Lebesgue (so 1D
/// Fourier multipliers are unitary) and dn = kNMeasure * ds, which keeps
/// dx = dn dH in horocyclic coordinates x = k exp(H) n . o.
namespace measure {
inline constexpr double kSpectralMeasure = 1.0 / (2.0 * kPi * kPi);
inline constexpr double kHMeasure = kPi;
inline constexpr double kNMeasure = 1.0 / kPi;
/// Order of the Weyl group in rank one.
inline constexpr double kWeylOrder = 2.0;
}  // namespace measure

/// Japanese bracket <x> = (1 + x^2)^{1/2}.
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

}  // namespace hypharm
