#pragma once

/// @file states.hpp
/// Geometric vocabulary for bounding the up set of a two-dimensional slice
/// of a three-dimensional instance: boxes, diagonal boxes, lobe states,
/// CB-configurations, and the half-space rule with valid regions used when
/// searching a slice that contains a global fixed point.
///
/// Slice points are two-dimensional Points (p0, p1); the slice is given by
/// its coordinate in dimension index 2.

#include <optional>
#include <variant>
#include <vector>

#include "dmac/core.hpp"

namespace dmac {

enum class Polarity { Up, Down };

/// Lattice points y with x0 <= y0 <= x0 + w and x1 <= y1 <= x1 + h.
struct CBox {
  Point x;
  Coord h = 0;
  Coord w = 0;

  bool contains(const Point& p) const;
  Coord area() const { return h * w; }
};

/// The diagonal box with upper-left corner x and lower-right corner y
/// (x0 <= y0, y1 <= x1), extended by l along the diagonal: all z with
///   y1 + (z0 - y0) <= z1 <= x1 + (z0 - x0),
///   x0 <= z0 <= y0 + l,
///   y1 <= z1 <= x1 + l.
struct DBox {
  Point x;
  Point y;
  Coord l = 0;

  bool contains(const Point& p) const;
  /// (x1 - y1 + l)(y0 - x0 + l) - l^2.
  Coord area() const;
};

struct LeftLobe {
  CBox main;
  CBox sub;
};

struct BottomLobe {
  CBox main;
  CBox sub;
};

struct DiagLobe {
  DBox main;
  DBox sub;
};

struct FullState {
  CBox center;
  LeftLobe left;
  BottomLobe bottom;
  DiagLobe diag;
};

/// One of the four state shapes together with the set it bounds.
struct SolverState {
  std::variant<LeftLobe, BottomLobe, DiagLobe, FullState> shape;
  Polarity polarity = Polarity::Up;

  /// Sum of the areas of the boxes making up the state.
  Coord area() const;
  /// Membership in the union of the boxes making up the state.
  bool contains(const Point& p) const;
  /// The side-ratio and attachment constraints of the shape.
  bool wellFormed() const;
};

/// The square (x, 2k, 2k) of the slice at coordinate slice is a
/// CB-configuration: dimension 0 changes from weakly up to strictly down
/// across its bottom or top edge, dimension 1 across its left or right edge,
/// and dimension 2 moves strictly down at the lower corner and weakly up at
/// the upper corner. Down polarity evaluates the same conditions on the
/// instance reflected through the grid centre. Makes at most four queries.
bool isCbConfig(DmacOracle& f, Coord slice, const Point& x, Coord k,
                Polarity polarity = Polarity::Up);

/// A half-plane of slice points removed by the half-space rule.
struct HalfSpace {
  enum class Kind {
    Below0,     ///< p0 <= bound
    Above0,     ///< p0 >= bound
    Below1,     ///< p1 <= bound
    Above1,     ///< p1 >= bound
    UpperLeft,  ///< p1 - p0 >= bound
    LowerRight  ///< p1 - p0 <= bound
  };
  Kind kind = Kind::Below0;
  Coord bound = 0;

  bool contains(const Point& p) const;
};

/// Outcome of one query of the search inside a slice holding a global
/// fixed point.
struct TerminalCut {
  /// Set when the query point is a global fixed point.
  std::optional<Point> fixedPoint;
  /// Half-planes whose removal keeps a global fixed point in the region.
  std::vector<HalfSpace> removed;
  /// The case of the response, 1 to 12; 13 to 18 are cases 5 to 10 with
  /// the two slice dimensions exchanged.
  int caseNumber = 0;
};

/// Query the slice point q (two-dimensional) of the slice at coordinate
/// slice and classify the response. Raises PromiseViolation on a response
/// outside the unit-displacement cases.
TerminalCut terminalHalfspace(DmacOracle& f, Coord slice, const Point& q);

/// A part of a valid region: rows r0..r1 whose row r spans columns
/// [left0 + leftSlope (r - r0), right0 + rightSlope (r - r0)].
struct BasicShape {
  enum class Kind {
    Box,            ///< both sides vertical
    Parallelogram,  ///< both sides diagonal
    TriangleWide,   ///< right side diagonal: rows widen upwards
    TriangleNarrow  ///< left side diagonal: rows narrow upwards
  };
  Kind kind = Kind::Box;
  Coord r0 = 0, r1 = -1;
  Coord left0 = 0, right0 = -1;
  Coord leftSlope = 0, rightSlope = 0;

  Coord left(Coord r) const { return left0 + leftSlope * (r - r0); }
  Coord right(Coord r) const { return right0 + rightSlope * (r - r0); }
  bool contains(const Point& p) const;
  Coord count() const;
};

/// A box of slice points with at most one upper-left and one lower-right
/// diagonal half-plane removed.
class ValidRegion {
 public:
  ValidRegion(Coord lo0, Coord hi0, Coord lo1, Coord hi1);

  bool contains(const Point& p) const;
  Coord count() const;
  bool empty() const { return count() == 0; }
  /// Remove a half-plane. The region stays valid.
  void remove(const HalfSpace& h);
  /// A partition of the region into at most five basic shapes.
  std::vector<BasicShape> decompose() const;
  /// All points, in row order. Intended for small regions.
  std::vector<Point> points() const;

 private:
  Coord rowLeft(Coord r) const;
  Coord rowRight(Coord r) const;
  Coord lo0_, hi0_, lo1_, hi1_;
  std::optional<Coord> upperLeft_;   ///< removes p1 - p0 >= value
  std::optional<Coord> lowerRight_;  ///< removes p1 - p0 <= value
};

/// The query point for a basic shape: the centre of a box or parallelogram,
/// and the quarter point of a triangle.
Point basicQuery(const BasicShape& s);

}  // namespace dmac
