#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace eitshape {

// Error taxonomy shared by all modules.  Everything derives from Error so
// callers can catch broadly; the CLI maps the concrete types to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

class InvalidCoefficientError : public Error {
 public:
  using Error::Error;
};

class InvalidShapeError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

// Thrown when the very first cost evaluation finds a flux term that is
// already (numerically) zero, i.e. the initial guess matches the data.
class DegenerateInitializationError : public DegenerateDataError {
 public:
  using DegenerateDataError::DegenerateDataError;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, long iterations)
      : Error(what), residual(residual), iterations(iterations) {}
  double residual;
  long iterations;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Side : int { left = 0, right = 1, top = 2, bottom = 3 };

inline const char* side_name(Side s) {
  switch (s) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::top: return "top";
    case Side::bottom: return "bottom";
  }
  return "?";
}

struct SideSet {
  unsigned mask = 0;
  constexpr SideSet() = default;
  constexpr SideSet(std::initializer_list<Side> sides) {
    for (Side s : sides) mask |= 1u << static_cast<int>(s);
  }
  constexpr bool contains(Side s) const { return mask & (1u << static_cast<int>(s)); }
  constexpr bool empty() const { return mask == 0; }
};

inline constexpr SideSet kAllSides{Side::left, Side::right, Side::top, Side::bottom};
inline constexpr SideSet kLeftRight{Side::left, Side::right};
inline constexpr SideSet kTopBottom{Side::top, Side::bottom};

// One value per side; used for piecewise-constant boundary fluxes.
struct SideValues {
  double left = 0, right = 0, top = 0, bottom = 0;
  double operator[](Side s) const {
    switch (s) {
      case Side::left: return left;
      case Side::right: return right;
      case Side::top: return top;
      case Side::bottom: return bottom;
    }
    return 0;
  }
};

// Nodal scalar field; values indexed like mesh nodes.
struct ScalarField {
  std::vector<double> v;
  ScalarField() = default;
  explicit ScalarField(std::size_t n, double fill = 0.0) : v(n, fill) {}
  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
};

// One strictly positive value per triangle (piecewise-constant conductivity).
struct ElementCoefficient {
  std::vector<double> v;
  ElementCoefficient() = default;
  explicit ElementCoefficient(std::size_t n, double fill = 1.0) : v(n, fill) {}
  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
};

// Nodal 2-vector field (perturbation / descent directions).  Admissible
// perturbations vanish on the boundary of the hold-all domain; the flag
// records that the producer enforced it.
struct VectorField2 {
  std::vector<double> x, y;
  bool boundary_zero = false;
  VectorField2() = default;
  explicit VectorField2(std::size_t n) : x(n, 0.0), y(n, 0.0) {}
  std::size_t size() const { return x.size(); }
};

// Level-set representation of the inclusion: inside = {phi < 0}.
struct LevelSet {
  ScalarField phi;
  LevelSet() = default;
  explicit LevelSet(std::size_t n, double fill = 0.0) : phi(n, fill) {}
};

// Deterministic standard-normal sampler (Box-Muller on a splitmix64 stream);
// avoids std::normal_distribution, whose output is implementation-defined.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  double next();

 private:
  double uniform01();
  std::uint64_t next_bits();
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace eitshape
