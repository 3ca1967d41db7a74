#pragma once

#include <stdexcept>
#include <string>

namespace mvem {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

/// Centroid fan produced a non-positive triangle and the fallback star-point
/// search failed. The polygon is not star-shaped w.r.t. any candidate point.
struct StarPointNotInterior : Error {
  using Error::Error;
};

/// Mesh file could not be parsed or violates the format contract.
struct ParseError : Error {
  using Error::Error;
};

/// A local matrix is degenerate beyond what equilibration and spectral
/// truncation absorb: nonpositive diagonal or numerically zero.
struct IllConditioned : Error {
  using Error::Error;
};

/// Mesh or boundary data unusable for global assembly.
struct AssemblyError : Error {
  using Error::Error;
};

/// Direct solve failed or the residual check did not meet tolerance.
/// Usually signals a missing Dirichlet boundary or a broken mesh.
struct SingularSystem : Error {
  using Error::Error;
};

/// Refinement produced a non-simple or non-positive child polygon.
struct RefinementGeometryError : Error {
  using Error::Error;
};

/// Dirichlet tangential data was required but not derivable.
struct MissingTangentialData : Error {
  using Error::Error;
};

/// Manufactured-solution self-check failed (data inconsistent with solution).
struct ManufacturedMismatch : Error {
  using Error::Error;
};

/// Rate computation with an error below 1e-14 (exact to roundoff).
struct DegenerateRate : Error {
  using Error::Error;
};

} // namespace mvem
