#pragma once

#include <stdexcept>
#include <string>

namespace everest {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A decoded state has rho <= 0 or p <= 0 (solver blow-up or bad input).
struct NonPhysicalState : Error {
  explicit NonPhysicalState(const std::string& what, long node = -1)
      : Error(what), node_index(node) {}
  long node_index;
};

/// No attached oblique shock exists for the requested deflection.
struct DetachedShock : Error {
  using Error::Error;
};

/// Upstream normal Mach number is not supersonic.
struct SubsonicNormalMach : Error {
  using Error::Error;
};

/// Prandtl-Meyer function called with M < 1.
struct SubsonicInput : Error {
  using Error::Error;
};

/// The slip-line matching problem has no root (Mach-reflection regime).
struct NoRegularSolution : Error {
  using Error::Error;
};

struct StencilOutOfRange : Error {
  using Error::Error;
};

struct GridMismatch : Error {
  using Error::Error;
};

struct MetadataMismatch : Error {
  using Error::Error;
};

struct ZeroVector : Error {
  using Error::Error;
};

struct DegenerateAngle : Error {
  using Error::Error;
};

struct ZeroTrueError : Error {
  using Error::Error;
};

struct InvalidParams : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace everest
