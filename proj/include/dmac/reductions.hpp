#pragma once

/// @file reductions.hpp
/// Oracle transformers. Each reduction wraps an input oracle lazily and
/// returns the new oracle together with a function that maps solutions of the
/// new instance back to solutions of the input.

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <vector>

#include "dmac/core.hpp"

namespace dmac {

/// Exact rational number.
using Rational = boost::multiprecision::cpp_rational;
using RVec = std::vector<Rational>;

/// Parse "p/q", "p" or a finite decimal such as "0.125" into a Rational.
Rational parseRational(const std::string& text);
std::string rationalToString(const Rational& r);
double toDouble(const Rational& r);
/// max_i |a_i - b_i|.
Rational infNorm(const RVec& a, const RVec& b);

/// A purported monotone λ-contraction g: [0,1]^d -> [0,1]^d with target
/// precision ε.
struct ContinuousOracle {
  std::function<RVec(const RVec&)> eval;
  std::size_t d = 0;
  Rational lambda;
  Rational eps;
};

/// A solution of the continuous problem.
struct ContinuousSolution {
  enum class Kind { ApproxFixedPoint, MonoViolation, ContractionViolation };
  Kind kind = Kind::ApproxFixedPoint;
  RVec x;
  RVec y;
};

/// Check a continuous solution against g with exact arithmetic.
bool isValidContinuousSolution(const ContinuousOracle& g, const ContinuousSolution& s);

/// An oracle together with a back-mapper to solutions of the input instance.
struct ReductionResult {
  OraclePtr oracle;
  std::function<Solution(const Solution&)> mapBack;
};

/// Result of discretizing a continuous instance.
struct McReduction {
  OraclePtr oracle;
  /// ε̂ = 1 / ceil(1/ε).
  Rational epsHat;
  /// Grid is {0..n}^d with n = 1/ε̂.
  Coord n = 0;
  std::function<ContinuousSolution(const Solution&)> mapBack;
};

/// Discretize g onto {0..n}^d. Each point moves one step in each dimension
/// according to the sign of g's displacement, rounded to zero when smaller
/// than ε̂ in magnitude. Raises OracleError if g leaves [0,1]^d.
McReduction mcToDmac(const ContinuousOracle& g);

/// The point ε̂·y of [0,1]^d.
RVec scaleToUnit(const Point& y, const Rational& epsHat);

/// f'_i(x) = x_i + sign(f_i(x) - x_i). Fixed points and violation witnesses
/// carry over unchanged.
ReductionResult clampUnitDisplacement(const OraclePtr& f);

/// Remove stacked one-dimensional fixed points: f'_i(x) = x_i - 1 whenever
/// f_i(x) = x_i and f_i(x - e_i) = x_i - 1, for every dimension at once.
/// Requires unit displacements. Preserves the least fixed point.
ReductionResult make1DUnique(const OraclePtr& f);

/// Surround the grid with one extra layer on each side of every dimension.
/// New boundary points move one step back into the original grid in their
/// outside dimensions and copy f at the nearest original point in the
/// others. Coordinates of the original grid are kept, so the fixed points
/// are literally the same points.
ReductionResult forceBoundaryInward(const OraclePtr& f);

/// Extend dimension 3 (index 2) below and above so that, on the new bottom
/// layer, every point other than the corner with lowest coordinates leaves
/// the up set, and symmetrically on the new top layer for the down set.
/// Original coordinates are kept and fixed points are unchanged.
ReductionResult upDownBoundaryPreprocess3d(const OraclePtr& f);

/// One extension pass: add layers below dimension 2 (index) projecting
/// dimension projDim along the diagonal. Exposed for testing.
ReductionResult extendBelow3d(const OraclePtr& f, std::size_t projDim);
/// The mirror image of extendBelow3d on the upper side.
ReductionResult extendAbove3d(const OraclePtr& f, std::size_t projDim);

/// Reflect an oracle through the point center/2: x -> center - x. The new
/// grid is the reflected grid.
OraclePtr reflectOracle(const OraclePtr& f, const Point& center);

/// Build a 3D instance on the quarter grid (scale 4) with exactly one fixed
/// point, whose back-mapping is the least fixed point of f. f must be a
/// violation-free, 1DUnique and boundary-inward 3D instance.
ReductionResult enforceUniqueFixedPoint3d(const OraclePtr& f);

/// The interpolated displacement sign of dimension i at quarter-grid point z
/// (scale 4), before any shift. Exposed for testing. Uses at most eight
/// queries to f.
int interpolatedDirection(DmacOracle& f, const Point& z, std::size_t i);

/// The two-dimensional analogue on the half grid (scale 2), with dimension 2
/// (index 1) shifted down by one half. Exposed for the decomposition solver.
ReductionResult enforceUniqueFixedPoint2d(const OraclePtr& f);

/// The composed preprocessing for the 3D solver. With lfpMode the result has
/// a unique fixed point mapping back to the least fixed point of f.
ReductionResult preprocess3d(const OraclePtr& f, bool lfpMode);

/// Compose two reductions: first r1 on the input, then r2 on r1's oracle.
ReductionResult compose(const ReductionResult& r1,
                        const std::function<ReductionResult(const OraclePtr&)>& r2);

}  // namespace dmac
