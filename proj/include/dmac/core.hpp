#pragma once

/// @file core.hpp
/// Lattice points, grids, the query-counted oracle abstraction, solution
/// types and the cone/monotone elimination predicates shared by all solvers.
///
/// Dimensions are indexed from 0 in code. Documentation that talks about
/// "dimension 1, 2, 3" of a three-dimensional instance refers to indices
/// 0, 1, 2.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace dmac {

using Coord = std::int64_t;

/// Raised when an instance breaks the promise a solver relies on.
class PromiseViolation : public std::runtime_error {
 public:
  explicit PromiseViolation(const std::string& what)
      : std::runtime_error("promise violated: " + what) {}
};

/// Raised when an exhaustive scan would exceed its point budget.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what)
      : std::runtime_error("budget exceeded: " + what) {}
};

/// Raised when an oracle returns a point outside its grid, or breaks the
/// unit-displacement assertion.
class OracleError : public std::runtime_error {
 public:
  explicit OracleError(const std::string& what)
      : std::runtime_error("oracle error: " + what) {}
};

/// Raised by violation back-mappers when the supplied pair is not a witness.
class NotAViolation : public std::runtime_error {
 public:
  explicit NotAViolation(const std::string& what)
      : std::runtime_error("not a violation witness: " + what) {}
};

/// A lattice point with an explicit scale denominator.
///
/// A coordinate c at scale s denotes the rational c / s. Unit grids use
/// scale 1 and the quarter grid uses scale 4. Points of different scale
/// never mix.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<Coord> coords, int scale = 1);
  Point(std::initializer_list<Coord> coords);

  /// The all-zero point of the given dimension.
  static Point zeros(std::size_t dim, int scale = 1);
  /// The point with every coordinate equal to v.
  static Point filled(std::size_t dim, Coord v, int scale = 1);
  /// The unit vector e_i (one lattice step, not one unit of value).
  static Point unit(std::size_t dim, std::size_t i, int scale = 1);

  std::size_t dim() const { return c_.size(); }
  int scale() const { return scale_; }
  const std::vector<Coord>& coords() const { return c_; }

  Coord operator[](std::size_t i) const { return c_[i]; }
  Coord& operator[](std::size_t i) { return c_[i]; }

  /// Componentwise order.
  bool leq(const Point& o) const;
  bool geq(const Point& o) const { return o.leq(*this); }
  bool comparable(const Point& o) const { return leq(o) || o.leq(*this); }

  Point operator+(const Point& o) const;
  Point operator-(const Point& o) const;
  Point& operator+=(const Point& o);
  Point& operator-=(const Point& o);

  /// Copy with coordinate i replaced.
  Point with(std::size_t i, Coord v) const;
  /// Copy with coordinate i shifted by delta.
  Point shifted(std::size_t i, Coord delta) const;
  /// Copy with a different scale and the same raw coordinates.
  Point rescaled(int scale) const { return Point(c_, scale); }

  /// Concatenation x ⊕ y.
  Point concat(const Point& o) const;
  /// Coordinates [from, from + len).
  Point sub(std::size_t from, std::size_t len) const;

  /// Lexicographic comparison, used for deterministic ordering.
  friend bool operator<(const Point& a, const Point& b);
  friend bool operator==(const Point& a, const Point& b) {
    return a.scale_ == b.scale_ && a.c_ == b.c_;
  }
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }

  std::string str() const;

 private:
  void checkCompatible(const Point& o) const;
  std::vector<Coord> c_;
  int scale_ = 1;
};

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept;
};

/// ℓ∞ distance between two points of equal dimension and scale.
Coord infNorm(const Point& a, const Point& b);

/// Componentwise meet and join.
Point meet(const Point& a, const Point& b);
Point join(const Point& a, const Point& b);

/// An axis-aligned box of lattice points with inclusive bounds.
class Grid {
 public:
  Grid() = default;
  Grid(Point lower, Point upper);
  /// The cube {lo, ..., hi}^d.
  static Grid cube(std::size_t dim, Coord lo, Coord hi, int scale = 1);

  const Point& lower() const { return lo_; }
  const Point& upper() const { return hi_; }
  std::size_t dim() const { return lo_.dim(); }
  int scale() const { return lo_.scale(); }

  bool contains(const Point& p) const;
  /// Number of values along dimension i.
  Coord extent(std::size_t i) const { return hi_[i] - lo_[i] + 1; }
  /// Total number of points, saturating at INT64_MAX.
  Coord size() const;
  /// Clamp each coordinate into the grid.
  Point clamp(const Point& p) const;
  /// Reflect p through the centre of the grid in every dimension.
  Point flip(const Point& p) const;

  /// Visit every point in lexicographic order.
  void forEach(const std::function<void(const Point&)>& visit) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  Point lo_;
  Point hi_;
};

/// Sign of an integer: -1, 0 or 1.
inline int sgn(Coord v) { return (v > 0) - (v < 0); }

class DmacOracle;
using OraclePtr = std::shared_ptr<DmacOracle>;

/// A query-counted black box f: G -> G.
///
/// Every evaluation result is checked to lie inside the grid. With
/// memoization on, each distinct point is evaluated once and the counter
/// counts distinct evaluations. With memoization off the counter counts
/// raw calls.
class DmacOracle {
 public:
  using Eval = std::function<Point(const Point&)>;

  DmacOracle(Grid grid, Eval eval, bool unitDisplacement = false);

  static OraclePtr make(Grid grid, Eval eval, bool unitDisplacement = false);

  /// Evaluate f(x). Throws std::invalid_argument if x is outside the grid.
  Point query(const Point& x);
  /// Sign of f_i(x) - x_i.
  int direction(const Point& x, std::size_t i);

  const Grid& grid() const { return grid_; }
  std::size_t dim() const { return grid_.dim(); }

  std::int64_t queryCount() const { return count_; }
  void resetCount() { count_ = 0; }
  void clearMemo() { memo_.clear(); }

  bool memoize() const { return memoize_; }
  void setMemoize(bool on);
  bool unitDisplacement() const { return unit_; }
  void setUnitDisplacement(bool on) { unit_ = on; }

  /// An independent copy sharing the evaluator but with a fresh counter and
  /// an empty cache.
  OraclePtr clone() const;

 private:
  Grid grid_;
  Eval eval_;
  bool unit_;
  bool memoize_ = true;
  std::int64_t count_ = 0;
  std::unordered_map<Point, Point, PointHash> memo_;
};

/// The oracle obtained by reflecting every coordinate through the centre of
/// the grid. Down-sets of f become up-sets of the flipped oracle.
OraclePtr flipOracle(const OraclePtr& f);

/// A solution of a DMAC instance.
struct Solution {
  enum class Kind { FixedPoint, MonoViolation, NonExpViolation };

  Kind kind = Kind::FixedPoint;
  Point x;
  Point y;

  static Solution fixedPoint(Point p) { return {Kind::FixedPoint, std::move(p), {}}; }
  static Solution mono(Point a, Point b) {
    return {Kind::MonoViolation, std::move(a), std::move(b)};
  }
  static Solution nonExp(Point a, Point b) {
    return {Kind::NonExpViolation, std::move(a), std::move(b)};
  }

  bool isFixedPoint() const { return kind == Kind::FixedPoint; }
  bool isViolation() const { return kind != Kind::FixedPoint; }
  std::string str() const;
};

/// Classify a pair of points. Returns a monotonicity violation if the pair is
/// comparable and the images are not ordered the same way, otherwise a
/// non-expansion violation if the images are further apart than the points,
/// otherwise nothing. Makes at most two queries.
std::optional<Solution> classifyPair(DmacOracle& f, const Point& x, const Point& y);

/// Check that a claimed solution is valid for f.
bool isValidSolution(DmacOracle& f, const Solution& s);

/// A slice: every dimension is either free or fixed to a coordinate.
class Slice {
 public:
  Slice() = default;
  explicit Slice(std::vector<std::optional<Coord>> pattern);

  /// The slice through x whose first i dimensions are free.
  static Slice prefixFree(const Point& x, std::size_t i);
  /// The slice with every dimension free.
  static Slice full(std::size_t dim);

  std::size_t dim() const { return pattern_.size(); }
  bool isFree(std::size_t i) const { return !pattern_[i].has_value(); }
  std::optional<Coord> fixedAt(std::size_t i) const { return pattern_[i]; }
  std::vector<std::size_t> freeDims() const;
  std::size_t numFree() const;
  bool contains(const Point& p) const;
  /// The sub-grid of g lying in this slice.
  Grid restrict(const Grid& g) const;

 private:
  std::vector<std::optional<Coord>> pattern_;
};

enum class ConeKind {
  Up,             ///< UC_i(anchor): y_i - a_i >= |y_j - a_j| for all j != i
  Down,           ///< DC_i(anchor): a_i - y_i >= |y_j - a_j| for all j != i
  MonotoneBelow,  ///< y <= anchor with y_i = anchor_i
  MonotoneAbove,  ///< y >= anchor with y_i = anchor_i
};

enum class Strictness { Strict, Weak };

/// True iff p lies in the region where the direction of dimension i is forced
/// by the direction observed at the anchor.
///
/// For ConeKind::Up a strictly (weakly) downward move of dimension i at the
/// anchor forces a strictly (weakly) downward move at every point of the
/// cone. ConeKind::Down is the mirror statement for upward moves. The
/// monotone kinds carry a downward move below the anchor and an upward move
/// above it. The membership test itself does not depend on strictness; the
/// argument records which form of the implication the caller relies on.
bool coneEliminates(ConeKind kind, std::size_t i, const Point& anchor,
                    Strictness strictness, const Point& p);

}  // namespace dmac
