#pragma once

/// @file reference_oracle.hpp
/// Brute-force ground truth. Every routine here scans the grid directly and
/// is deliberately naive. Tests and acceptance checks compare the fast
/// solvers against these results.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "dmac/core.hpp"

namespace dmac {

/// Default cap on the number of grid points a brute-force scan may visit.
/// Reads the DMAC_BUDGET environment variable when set, else 50,000.
Coord defaultBruteForceBudget();

struct BruteForceOptions {
  /// Maximum number of grid points; BudgetExceeded is raised above it.
  Coord budget = defaultBruteForceBudget();
  /// Pairs at ℓ∞ distance at most this value are checked for violations.
  /// Distance one already suffices for completeness, because monotonicity
  /// follows from unit steps and non-expansion follows along king-move paths.
  Coord nearDistance = 1;
  /// All comparable pairs are additionally scanned when the grid has at most
  /// this many points.
  Coord comparableScanLimit = 1000;
};

struct BruteForceResult {
  /// All fixed points in lexicographic order.
  std::vector<Point> fixedPoints;
  /// The first violation found in the deterministic scan order, if any.
  std::optional<Solution> violation;
};

/// Exhaustively list fixed points and search for a violation.
BruteForceResult bruteForceSolve(const DmacOracle& f, const BruteForceOptions& opts = {});

/// All fixed points in lexicographic order, without the violation scan.
std::vector<Point> allFixedPoints(const DmacOracle& f, Coord budget = defaultBruteForceBudget());

/// The componentwise least fixed point. If the fixed points have no least
/// element (only possible for instances with violations) the
/// lexicographically first minimal fixed point is returned.
std::optional<Point> leastFixedPoint(const DmacOracle& f, Coord budget = defaultBruteForceBudget());

/// The least fixed point of f restricted to a slice: the least point p of the
/// slice with f_k(p) = p_k for every free dimension k.
std::optional<Point> sliceLeastFixedPoint(const DmacOracle& f, const Slice& slice,
                                          Coord budget = defaultBruteForceBudget());

/// Remove coordinate i from p.
Point dropDim(const Point& p, std::size_t i);
/// Insert value v as coordinate i of p.
Point insertDim(const Point& p, std::size_t i, Coord v);

/// The surface of dimension i: for each point of G_{-i}, the unique height a
/// with f_i(x ∘_i a) = a, or nothing if the 1D slice has zero or several such
/// heights.
struct SurfaceTable {
  std::size_t dim = 0;
  std::map<Point, std::optional<Coord>> values;
  /// Number of 1D slices without a unique fixed height.
  std::size_t nonUnique = 0;

  std::optional<Coord> at(const Point& rest) const;
};

SurfaceTable surface(const DmacOracle& f, std::size_t i);

struct SurfaceReport {
  bool oneDRational = false;
  bool monotone = false;
  bool gradientOne = false;
  bool violationFree = false;
  /// violationFree == (oneDRational && monotone && gradientOne).
  bool biconditionalHolds = false;
};

/// Evaluate the four predicates exhaustively. Surface monotonicity and
/// gradient are judged only on pairs where both surface values exist; a
/// missing surface makes the instance fail oneDRational.
SurfaceReport checkSurfaceTheorem(const DmacOracle& f, Coord budget = defaultBruteForceBudget());

/// hei_i(x) = min{k >= 0 : f_i(x + k e_i) < x_i + k}, for i in {a, b} the two
/// free dimensions of the slice in increasing order. A component is empty
/// when no such k exists inside the grid.
std::pair<std::optional<Coord>, std::optional<Coord>> heights(const DmacOracle& f,
                                                              const Slice& slice,
                                                              const Point& x);

/// A critical box (x, h, w): with a, b the free dimensions of the slice, it
/// covers x_a..x_a+w by x_b..x_b+h. For the down-set variant the box covers
/// x_a-w..x_a by x_b-h..x_b instead.
struct CriticalBox {
  Point x;
  Coord h = 0;
  Coord w = 0;
  /// Whether every point of the box lies in the up set (down set for the
  /// down-set variant).
  bool containedInSet = false;
};

/// Enumerate every critical box of a two-dimensional slice of a 3D instance.
/// A step past the grid boundary counts as a strict move back into the grid.
std::vector<CriticalBox> enumerateCriticalBoxes(const DmacOracle& f, const Slice& slice,
                                                bool upset = true);

/// f(x) >= x componentwise.
bool inUpSet(DmacOracle& f, const Point& x);
/// f(x) <= x componentwise.
bool inDownSet(DmacOracle& f, const Point& x);

/// The least fixed point obtained by Kleene iteration from the bottom of the
/// grid. Correct for monotone f; raises PromiseViolation if the iteration
/// fails to ascend.
Point kleeneLeastFixedPoint(DmacOracle& f);

}  // namespace dmac
