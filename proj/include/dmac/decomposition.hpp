#pragma once

/// @file decomposition.hpp
/// Composition of least-fixed-point solvers along a split of the
/// coordinates, and the d-dimensional solver built from blocks of at most
/// three dimensions.

#include <cstdint>
#include <functional>

#include "dmac/core.hpp"
#include "dmac/solvers.hpp"

namespace dmac {

/// A solver returning the least fixed point of its instance, or a violation
/// of that instance.
using LfpSolver = std::function<Solution(const OraclePtr&)>;

/// f^x(y) = f(x ⊕ y) restricted to the last d - |x| coordinates. Each query
/// of the sub-instance costs one query of f.
OraclePtr subInstance(const OraclePtr& f, const Point& x);

struct DecompositionStats {
  /// Distinct queries made to f.
  std::int64_t queries = 0;
  /// Queries the outer solver made to the super-instance.
  std::int64_t outerQueries = 0;
  /// Largest number of queries one inner solve made, counting the final
  /// evaluation of f at the combined point.
  std::int64_t maxInnerQueries = 0;
  /// Area-ledger assertions that fired inside the 2D and 3D block solvers.
  std::int64_t ledgerViolations = 0;
};

/// Solve f by running solverA on the first d1 coordinates, where each query
/// x of the super-instance runs solverB on f^x to obtain its least fixed
/// point y*(x) and answers f(x ⊕ y*(x)) restricted to the first d1
/// coordinates. Returns the least fixed point x* ⊕ y*(x*), or a violation of
/// f mapped from one reported by either solver. Raises PromiseViolation when
/// a reported violation cannot be turned into a violation of f.
Solution solveDecomposed(const OraclePtr& f, std::size_t d1, const LfpSolver& solverA,
                         const LfpSolver& solverB, DecompositionStats* stats = nullptr);

/// Least fixed point of a one-dimensional instance by binary search for the
/// smallest x with f(x) <= x.
Solution solveLfp1d(const OraclePtr& f);

/// Least fixed point of a two-dimensional instance through the uniqueness
/// reduction on the half grid and the 2D solver.
Solution solveLfp2d(const OraclePtr& f, SolveStats* stats = nullptr);

/// Least fixed point of a three-dimensional instance through the full
/// preprocessing pipeline and the 3D solver.
Solution solveLfp3d(const OraclePtr& f, SolveStats* stats = nullptr);

/// Least fixed point of a d-dimensional violation-free instance, splitting
/// off blocks of three dimensions from the front until at most three remain.
Solution solveD(const OraclePtr& f, DecompositionStats* stats = nullptr);

}  // namespace dmac
