#pragma once

/// @file solvers.hpp
/// Query-efficient solvers for two- and three-dimensional promise instances.
///
/// Both solvers run an outer binary search over the last dimension. For each
/// visited slice two inner searches run in lockstep: one looks for a point of
/// Up(f) = {x : x <= f(x)} and the other for a point of Down(f) on the
/// flipped instance. Each inner search keeps a region known to contain the
/// up set of its slice. The region is the slice minus a list of cuts, one per
/// strictly downward coordinate observed at a queried point. Cuts stay valid
/// when translated diagonally to a later slice, so a search carries its
/// progress across slices. Progress is measured by a weighted area in which
/// points on the lower faces of the slice count N times and the lower corner
/// N^2 times, with N the number of slices; this bounds the growth caused by
/// translating a region towards the faces.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dmac/core.hpp"
#include "dmac/reductions.hpp"

namespace dmac {

using Wide = __int128;

/// A cut of a two-dimensional slice with free coordinates (p0, p1), anchored
/// at (a, b). Each kind removes points that cannot be in the up set once
/// the named coordinate was observed to move strictly down at the anchor.
struct Cut {
  enum class Kind {
    Dim0,  ///< {p0 >= a, p0 - p1 >= a - b}
    Dim1,  ///< {p1 >= b, p1 - p0 >= b - a}
    Dim2,  ///< {p0 <= a, p1 <= b}
  };
  Kind kind = Kind::Dim2;
  Coord a = 0;
  Coord b = 0;

  bool contains(Coord p0, Coord p1) const;
};

/// The up-set bound of one two-dimensional slice.
class SliceRegion {
 public:
  SliceRegion() = default;
  SliceRegion(Coord lo0, Coord hi0, Coord lo1, Coord hi1, Coord faceWeight);

  bool contains(Coord p0, Coord p1) const;
  /// Weighted number of points.
  Wide measure() const;
  /// Weighted number of points after adding a cut.
  Wide measureWith(const Cut& c) const;
  void addCut(const Cut& c) { cuts_.push_back(c); }
  /// Move every cut by (delta, delta).
  void translate(Coord delta);
  /// A query point splitting the weighted area so that each of the three
  /// possible cuts at it removes a large share. Requires a non-empty region.
  std::pair<Coord, Coord> choose() const;
  /// min over the three cut kinds of the weighted area each removes.
  Wide guaranteedRemoval(Coord q0, Coord q1) const;

  const std::vector<Cut>& cuts() const { return cuts_; }
  Coord lo0() const { return lo0_; }
  Coord hi0() const { return hi0_; }
  Coord lo1() const { return lo1_; }
  Coord hi1() const { return hi1_; }

 private:
  Wide measureCuts(const std::vector<Cut>& cuts, const Cut* extra) const;
  Coord lo0_ = 0, hi0_ = -1, lo1_ = 0, hi1_ = -1;
  Coord weight_ = 1;
  std::vector<Cut> cuts_;
};

/// The up-set bound of a one-dimensional slice: an interval with the lower
/// end point weighted N.
class LineRegion {
 public:
  LineRegion() = default;
  LineRegion(Coord lo, Coord hi, Coord faceWeight);

  bool contains(Coord y) const { return y > below_ && y < above_ && y >= lo_ && y <= hi_; }
  Wide measure() const;
  /// Remove all points <= y.
  void cutBelow(Coord y) { below_ = std::max(below_, y); }
  /// Remove all points >= y.
  void cutAbove(Coord y) { above_ = std::min(above_, y); }
  void translate(Coord delta);
  /// The weighted median.
  Coord choose() const;

 private:
  Coord lo_ = 0, hi_ = -1, weight_ = 1;
  Coord below_ = 0, above_ = 0;
};

/// Counters for one solve. The area ledger records the largest observed
/// multiplier of the weighted area for a refinement step and for a slice
/// jump, and counts steps whose multiplier exceeded the allowed bound.
struct SolveStats {
  std::int64_t solverQueries = 0;
  std::int64_t outerIterations = 0;
  std::int64_t innerSteps = 0;
  std::int64_t jumps = 0;
  double worstStepRatio = 0.0;
  double worstJumpRatio = 0.0;
  std::int64_t ledgerViolations = 0;
  std::vector<std::string> ledgerMessages;

  void merge(const SolveStats& o);
};

/// Allowed multipliers of the weighted area.
struct LedgerBounds {
  double step = 15.0 / 16.0;
  double jump = 36.0;
};

/// Bracket found by the outer binary search: Up(f) meets slice l and
/// Down(f) meets slice u, with u - l <= 1.
struct SliceBracket {
  Coord l = 0;
  Coord u = 0;
};

struct SolveOptions {
  /// Run the reduction pipeline before solving and map the answer back.
  bool preprocess = true;
  /// Return the least fixed point (implies the uniqueness reduction).
  bool lfpMode = false;
  LedgerBounds ledger;
};

struct SolveResult {
  Solution solution;
  SolveStats stats;
};

/// Fixed point of a 2D violation-free 1DUnique instance. Raises
/// PromiseViolation when the responses are inconsistent with the promise.
Point solve2d(DmacOracle& f, SolveStats* stats = nullptr, const LedgerBounds& ledger = {});

/// The outer loop of the 3D solver on a violation-free 1DUnique instance.
SliceBracket mainLoop3d(DmacOracle& f, SolveStats* stats = nullptr,
                        const LedgerBounds& ledger = {});

/// Given a bracket with u = l + 1, return a slice of the two that meets both
/// Up(f) and Down(f) and hence contains a fixed point.
Coord twoSliceSubAlgorithm(DmacOracle& f, Coord l, Coord u, SolveStats* stats = nullptr,
                           const LedgerBounds& ledger = {});

/// A fixed point in the given dimension-3 slice, which must contain one.
Point terminalPhase(DmacOracle& f, Coord slice, SolveStats* stats = nullptr,
                    const LedgerBounds& ledger = {});

/// Fixed point of a 3D violation-free 1DUnique instance (no preprocessing).
Point solve3dCore(DmacOracle& f, SolveStats* stats = nullptr, const LedgerBounds& ledger = {});

/// Solve a 3D instance, optionally through the reduction pipeline and in
/// least-fixed-point mode.
SolveResult solve3d(const OraclePtr& f, const SolveOptions& opts = {});

/// The 2D oracle obtained by fixing dimension 3 of a 3D oracle.
OraclePtr sliceOracle3d(DmacOracle& f, Coord slice);

}  // namespace dmac
