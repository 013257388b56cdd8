#pragma once

/// @file verification.hpp
/// Least-fixed-point verification inside a slice, the direction function of
/// the induced one-permutation discrete contraction instance, and the
/// mapping of its violations back to violations of the DMAC instance.

#include <variant>
#include <vector>

#include "dmac/core.hpp"

namespace dmac {

/// Points visited while verifying a fixed point: v^0 < v^1 < ... < v^k, each
/// step adding e_i for the dimension recorded in dims.
struct VerificationSequence {
  std::vector<Point> points;
  std::vector<std::size_t> dims;
};

struct LesserFixpointResult {
  /// A fixed point of the slice strictly below x, or x itself when none was
  /// found.
  Point point;
  VerificationSequence sequence;
  /// True iff the walk reached x, so x is a verified least fixed point.
  bool verified = false;
};

/// Walk from x - 1 (restricted to the free dimensions of slice and clamped to
/// the grid) towards x, stepping in the smallest free dimension whose
/// coordinate still lies below x and moves up. Uses at most |free(slice)|
/// queries.
LesserFixpointResult findLesserFixpoint(DmacOracle& f, const Slice& slice, const Point& x);

/// True iff findLesserFixpoint verifies x in the slice whose first i
/// dimensions are free. i = 0 is vacuously true.
bool isLfp(DmacOracle& f, const Point& x, std::size_t i);

enum class Direction { Up, Down, Zero };

/// Up iff f_i(x) > x_i; down iff f_i(x) < x_i, or f_i(x) = x_i and x is not
/// a verified least fixed point of the slice with dimensions 0..i free;
/// zero otherwise.
Direction opdcDirection(DmacOracle& f, const Point& x, std::size_t i);

/// x and y are distinct verified least fixed points of the same slice.
/// Returns a monotonicity or non-expansion violation of f. Raises
/// NotAViolation when the inputs do not form such a witness or no violating
/// pair can be derived from them.
Solution mapOv1(DmacOracle& f, const Slice& slice, const Point& x, const Point& y);

/// From a point x whose first i coordinates are fixed by f, iterate f on
/// those coordinates from the bottom corner of B(x, 1) in the neighbouring
/// slice x + dir * e_j (j >= i). Returns a point of that slice within
/// distance one of x + dir * e_j whose first i coordinates are fixed, or a
/// violation witness.
std::variant<Point, Solution> neighborSliceFixpoint(DmacOracle& f, const Point& x, std::size_t j,
                                                    int dir, std::size_t i);

/// x and y agree beyond dimension i, are zeros of the direction function
/// in dimensions 0..i-1, x_i = y_i + 1, and the direction function points
/// down at x and up at y in dimension i. Returns a violation of f.
Solution mapOv2(DmacOracle& f, const Slice& slice, const Point& x, const Point& y, std::size_t i);

}  // namespace dmac
