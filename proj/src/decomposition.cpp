#include "dmac/decomposition.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dmac/reductions.hpp"
#include "dmac/solvers.hpp"

namespace dmac {

OraclePtr subInstance(const OraclePtr& f, const Point& x) {
  const std::size_t d = f->dim();
  const std::size_t d1 = x.dim();
  if (d1 >= d) throw std::invalid_argument("subInstance: prefix must leave at least one dimension");
  const Grid& g = f->grid();
  const Point prefixLo = g.lower().sub(0, d1);
  const Point prefixHi = g.upper().sub(0, d1);
  if (!Grid(prefixLo, prefixHi).contains(x))
    throw std::invalid_argument("subInstance: prefix outside the grid");
  Grid sub(g.lower().sub(d1, d - d1), g.upper().sub(d1, d - d1));
  return DmacOracle::make(
      std::move(sub), [f, x, d1, d](const Point& y) { return f->query(x.concat(y)).sub(d1, d - d1); },
      f->unitDisplacement());
}

namespace {

/// Carries a violation of f out of a super-instance query.
struct InnerViolation {
  Solution solution;
};

Solution requireViolation(DmacOracle& f, const Point& a, const Point& b, const char* what) {
  if (auto s = classifyPair(f, a, b)) return *s;
  throw PromiseViolation(std::string("could not map a violation reported by the ") + what +
                         " solver");
}

}  // namespace

Solution solveDecomposed(const OraclePtr& f, std::size_t d1, const LfpSolver& solverA,
                         const LfpSolver& solverB, DecompositionStats* stats) {
  const std::size_t d = f->dim();
  if (d1 == 0 || d1 >= d) throw std::invalid_argument("solveDecomposed: split must be proper");
  const Grid& g = f->grid();
  const std::int64_t before = f->queryCount();

  std::map<Point, Point> inner;
  std::int64_t maxInner = 0;
  auto innerLfp = [&](const Point& x) -> Point {
    if (auto it = inner.find(x); it != inner.end()) return it->second;
    OraclePtr fx = subInstance(f, x);
    const Solution s = solverB(fx);
    if (s.isViolation()) {
      throw InnerViolation{requireViolation(*f, x.concat(s.x), x.concat(s.y), "inner")};
    }
    fx->query(s.x);
    maxInner = std::max(maxInner, fx->queryCount());
    inner.emplace(x, s.x);
    return s.x;
  };

  Grid superGrid(g.lower().sub(0, d1), g.upper().sub(0, d1));
  OraclePtr super = DmacOracle::make(
      std::move(superGrid),
      [&](const Point& x) { return f->query(x.concat(innerLfp(x))).sub(0, d1); },
      f->unitDisplacement());

  Solution out;
  try {
    const Solution a = solverA(super);
    if (a.isViolation()) {
      out = requireViolation(*f, a.x.concat(innerLfp(a.x)), a.y.concat(innerLfp(a.y)), "outer");
    } else {
      out = Solution::fixedPoint(a.x.concat(innerLfp(a.x)));
    }
  } catch (const InnerViolation& v) {
    out = v.solution;
  }
  if (stats) {
    stats->queries = f->queryCount() - before;
    stats->outerQueries = super->queryCount();
    stats->maxInnerQueries = maxInner;
  }
  return out;
}

Solution solveLfp1d(const OraclePtr& f) {
  if (f->dim() != 1) throw std::invalid_argument("solveLfp1d: instance must be one-dimensional");
  Coord lo = f->grid().lower()[0];
  Coord hi = f->grid().upper()[0];
  // Invariant: f(hi) <= hi; the answer lies in [lo, hi].
  while (lo < hi) {
    const Coord mid = lo + (hi - lo) / 2;
    const Point p = Point({mid}, f->grid().scale());
    if (f->query(p)[0] <= mid)
      hi = mid;
    else
      lo = mid + 1;
  }
  const Point x = Point({lo}, f->grid().scale());
  if (f->query(x) == x) return Solution::fixedPoint(x);
  // Here f(x) < x, and lo only ever moved past points with f(p) > p.
  const Point below = Point({lo - 1}, f->grid().scale());
  if (lo > f->grid().lower()[0] && f->query(below)[0] > below[0]) return Solution::mono(below, x);
  throw PromiseViolation("one-dimensional instance has no least fixed point at " + x.str());
}

Solution solveLfp2d(const OraclePtr& f, SolveStats* stats) {
  if (f->dim() != 2) throw std::invalid_argument("solveLfp2d: instance must be two-dimensional");
  ReductionResult r = compose(clampUnitDisplacement(f), make1DUnique);
  r = compose(r, forceBoundaryInward);
  r = compose(r, enforceUniqueFixedPoint2d);
  const Point p = solve2d(*r.oracle, stats);
  return r.mapBack(Solution::fixedPoint(p));
}

Solution solveLfp3d(const OraclePtr& f, SolveStats* stats) {
  SolveOptions opts;
  opts.lfpMode = true;
  SolveResult r = solve3d(f, opts);
  if (stats) stats->merge(r.stats);
  return r.solution;
}

namespace {

Solution solveBlock(const OraclePtr& f, SolveStats* stats) {
  switch (f->dim()) {
    case 1:
      return solveLfp1d(f);
    case 2:
      return solveLfp2d(f, stats);
    case 3:
      return solveLfp3d(f, stats);
    default:
      throw std::invalid_argument("solveBlock: blocks have one to three dimensions");
  }
}

}  // namespace

Solution solveD(const OraclePtr& f, DecompositionStats* stats) {
  if (f->dim() == 0) throw std::invalid_argument("solveD: instance has no dimensions");
  SolveStats blockStats;
  if (f->dim() <= 3) {
    const std::int64_t before = f->queryCount();
    Solution s = solveBlock(f, &blockStats);
    if (stats) {
      stats->queries = f->queryCount() - before;
      stats->outerQueries = stats->queries;
      stats->maxInnerQueries = 0;
      stats->ledgerViolations = blockStats.ledgerViolations;
    }
    return s;
  }
  std::int64_t innerLedger = 0;
  Solution s = solveDecomposed(
      f, 3, [&](const OraclePtr& sub) { return solveBlock(sub, &blockStats); },
      [&](const OraclePtr& sub) {
        DecompositionStats inner;
        Solution r = solveD(sub, &inner);
        innerLedger += inner.ledgerViolations;
        return r;
      },
      stats);
  if (stats) stats->ledgerViolations = blockStats.ledgerViolations + innerLedger;
  return s;
}

}  // namespace dmac
