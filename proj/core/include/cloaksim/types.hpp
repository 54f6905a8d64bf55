#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cloaksim {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Error hierarchy. Everything thrown by the library derives from Error so
// callers (the CLI in particular) can separate library failures from bugs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point outside the domain of a map or material evaluation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Grid/geometry inconsistencies: cloak overlapping the PML, lattice not
// tiling the frame, regions intersecting the cloak, etc.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Grid too coarse for the requested frequency.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cloaksim
