#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "dmac/instances.hpp"
#include "dmac/reference_oracle.hpp"
#include "dmac/solvers.hpp"
#include "test_util.hpp"

using namespace dmac;
using namespace dmac::testing;

namespace {

/// A 2D instance whose dimension-0 surface jumps by two between p1 = 2 and
/// p1 = 3, and whose dimension-1 surface is constant.
OraclePtr gradientTwoInstance() {
  return DmacOracle::make(
      Grid::cube(2, 1, 6),
      [](const Point& x) {
        const Coord s0 = x[1] <= 2 ? 2 : 4;
        const Coord s1 = 3;
        return Point{x[0] + sgn(s0 - x[0]), x[1] + sgn(s1 - x[1])};
      },
      true);
}

Slice dim2Slice(Coord z) { return Slice({std::nullopt, std::nullopt, z}); }

}  // namespace

TEST(BruteForce, IdentityHasEveryPointFixed) {
  auto f = identity(Grid::cube(2, 1, 2));
  const BruteForceResult r = bruteForceSolve(*f);
  EXPECT_EQ(r.fixedPoints.size(), 4u);
  EXPECT_FALSE(r.violation.has_value());
}

TEST(BruteForce, ConstantHasExactlyItsValue) {
  auto f = constant(Grid::cube(3, 1, 4), Point{2, 4, 1});
  const BruteForceResult r = bruteForceSolve(*f);
  ASSERT_EQ(r.fixedPoints.size(), 1u);
  EXPECT_EQ(r.fixedPoints[0], (Point{2, 4, 1}));
  EXPECT_FALSE(r.violation.has_value());
}

TEST(BruteForce, FindsInjectedViolations) {
  const SurfaceInstance inst = genSurfaceInstance(2, 8, 3);
  for (ViolationKind kind : {ViolationKind::Mono, ViolationKind::NonExp}) {
    const InjectedInstance bad = injectViolation(inst.oracle, kind, Point{4, 4}, 1);
    const BruteForceResult r = bruteForceSolve(*bad.oracle);
    ASSERT_TRUE(r.violation.has_value());
    EXPECT_TRUE(isValidSolution(*bad.oracle, *r.violation));
  }
}

TEST(BruteForce, BudgetIsEnforced) {
  auto f = identity(Grid::cube(3, 1, 10));
  BruteForceOptions opts;
  opts.budget = 999;
  EXPECT_THROW(bruteForceSolve(*f, opts), BudgetExceeded);
  EXPECT_THROW(allFixedPoints(*f, 999), BudgetExceeded);
}

TEST(BruteForce, Solve3dOutputIsAmongTheFixedPoints) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SurfaceInstance inst = genSurfaceInstance(3, 8, seed);
    const std::vector<Point> fps = allFixedPoints(*inst.oracle);
    const SolveResult r = solve3d(inst.oracle->clone());
    ASSERT_TRUE(r.solution.isFixedPoint());
    EXPECT_TRUE(std::find(fps.begin(), fps.end(), r.solution.x) != fps.end()) << "seed " << seed;
  }
}

TEST(LeastFixedPoint, ConstantIdentityAndGenerated) {
  EXPECT_EQ(leastFixedPoint(*constant(Grid::cube(2, 1, 5), Point{3, 2})), (Point{3, 2}));
  EXPECT_EQ(leastFixedPoint(*identity(Grid::cube(3, 1, 4))), (Point{1, 1, 1}));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SurfaceInstance inst = genSurfaceInstance(3, 8, seed);
    EXPECT_EQ(leastFixedPoint(*inst.oracle), inst.lfp) << "seed " << seed;
    EXPECT_EQ(kleeneLeastFixedPoint(*inst.oracle), inst.lfp) << "seed " << seed;
  }
}

TEST(LeastFixedPoint, NoFixedPointMeansNone) {
  // f(0) = 1, f(1) = 0: no fixed point at all.
  EXPECT_FALSE(leastFixedPoint(*table1d(0, {1, 0})).has_value());
}

TEST(SliceLeastFixedPoint, AgreesWithFilteredScan) {
  const SurfaceInstance inst = genSurfaceInstance(3, 6, 9);
  DmacOracle& f = *inst.oracle;
  for (Coord z = 1; z <= 6; ++z) {
    const Slice s = dim2Slice(z);
    std::optional<Point> best;
    f.grid().forEach([&](const Point& p) {
      if (!s.contains(p)) return;
      const Point fp = f.query(p);
      if (fp[0] != p[0] || fp[1] != p[1]) return;
      if (!best || p.leq(*best)) best = p;
    });
    EXPECT_EQ(sliceLeastFixedPoint(f, s), best) << "slice " << z;
  }
}

TEST(Surface, ConstantHeightTowardsMiddle) {
  auto f = DmacOracle::make(Grid::cube(2, 1, 7), [](const Point& x) {
    return Point{x[0] + sgn(4 - x[0]), x[1]};
  });
  const SurfaceTable t = surface(*f, 0);
  EXPECT_EQ(t.nonUnique, 0u);
  for (const auto& [rest, v] : t.values) EXPECT_EQ(v, std::optional<Coord>(4)) << rest.str();
}

TEST(Surface, IdentityFlagsEverySlice) {
  auto f = identity(Grid::cube(2, 1, 4));
  const SurfaceTable t = surface(*f, 1);
  EXPECT_EQ(t.nonUnique, t.values.size());
  EXPECT_EQ(t.values.size(), 4u);
}

TEST(Surface, GeneratedTableEqualsGeneratorSurfaces) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SurfaceInstance inst = genSurfaceInstance(3, 8, seed);
    for (std::size_t i = 0; i < 3; ++i) {
      const SurfaceTable t = surface(*inst.oracle, i);
      EXPECT_EQ(t.nonUnique, 0u);
      for (const auto& [rest, v] : t.values) {
        ASSERT_TRUE(v.has_value());
        EXPECT_EQ(*v, inst.spec.height(i, insertDim(rest, i, 1)));
      }
    }
  }
}

TEST(SurfaceTheorem, GeneratedInstancesPassAllPredicates) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SurfaceReport r = checkSurfaceTheorem(*genSurfaceInstance(3, 8, seed).oracle);
    EXPECT_TRUE(r.oneDRational && r.monotone && r.gradientOne && r.violationFree);
    EXPECT_TRUE(r.biconditionalHolds);
  }
}

TEST(SurfaceTheorem, GradientTwoStepIsCaught) {
  const SurfaceReport r = checkSurfaceTheorem(*gradientTwoInstance());
  EXPECT_TRUE(r.oneDRational);
  EXPECT_FALSE(r.gradientOne);
  EXPECT_FALSE(r.violationFree);
  EXPECT_TRUE(r.biconditionalHolds);
}

TEST(SurfaceTheorem, ConstantIsAllTrue) {
  const SurfaceReport r = checkSurfaceTheorem(*constant(Grid::cube(3, 1, 4), Point{2, 3, 2}));
  EXPECT_TRUE(r.oneDRational && r.monotone && r.gradientOne && r.violationFree);
}

TEST(Heights, DirectDefinition) {
  const Slice s = dim2Slice(2);
  auto down = DmacOracle::make(Grid::cube(3, 1, 8), [](const Point& x) {
    return Point{std::max<Coord>(x[0] - 1, 1), std::max<Coord>(x[1] - 1, 1), x[2]};
  });
  const auto [a, b] = heights(*down, s, Point{5, 5, 2});
  EXPECT_EQ(a, std::optional<Coord>(0));
  EXPECT_EQ(b, std::optional<Coord>(0));

  // Dimension 0 moves up below 5 and down from 5 on.
  auto threeUp = DmacOracle::make(Grid::cube(3, 1, 8), [](const Point& x) {
    return Point{x[0] < 5 ? x[0] + 1 : x[0] - 1, x[1], x[2]};
  });
  EXPECT_EQ(heights(*threeUp, s, Point{2, 3, 2}).first, std::optional<Coord>(3));
}

TEST(Heights, AgreeWithLinearScan) {
  const SurfaceInstance inst = genSurfaceInstance(3, 8, 4);
  DmacOracle& f = *inst.oracle;
  const Slice s = dim2Slice(5);
  s.restrict(f.grid()).forEach([&](const Point& x) {
    const auto [h0, h1] = heights(f, s, x);
    for (std::size_t i = 0; i < 2; ++i) {
      std::optional<Coord> scan;
      for (Coord k = 0; x[i] + k <= 8; ++k) {
        if (f.query(x.shifted(i, k))[i] < x[i] + k) {
          scan = k;
          break;
        }
      }
      EXPECT_EQ(i == 0 ? h0 : h1, scan) << x.str() << " dim " << i;
    }
  });
}

TEST(CriticalBoxes, EmptyUpSetGivesNoBoxes) {
  auto f = constant(Grid::cube(3, 1, 4), Point{1, 1, 1});
  EXPECT_TRUE(enumerateCriticalBoxes(*f, dim2Slice(3)).empty());
}

TEST(CriticalBoxes, AlmostSquareBoxExistsAndBoxesLieInUpSet) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const SurfaceInstance inst = genSurfaceInstance(3, 8, seed);
    DmacOracle& f = *inst.oracle;
    for (Coord z = 1; z <= 8; ++z) {
      const Slice s = dim2Slice(z);
      bool upNonEmpty = false;
      s.restrict(f.grid()).forEach([&](const Point& p) { upNonEmpty |= inUpSet(f, p); });
      const auto boxes = enumerateCriticalBoxes(f, s);
      for (const CriticalBox& b : boxes) EXPECT_TRUE(b.containedInSet);
      const bool square = std::any_of(boxes.begin(), boxes.end(), [](const CriticalBox& b) {
        return std::abs(b.h - b.w) <= 1;
      });
      EXPECT_EQ(square, upNonEmpty) << "seed " << seed << " slice " << z;
    }
  }
}

TEST(Invariants, ContiguityOfNonLeastFixedPoints) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t d = 2 + seed % 2;
    auto f = genSurfaceInstance(d, d == 2 ? 12 : 6, seed).oracle;
    const std::vector<Point> fps = allFixedPoints(*f);
    const Point lfp = *leastFixedPoint(*f);
    for (const Point& x : fps) {
      if (x == lfp) continue;
      const bool near = std::any_of(fps.begin(), fps.end(), [&](const Point& y) {
        return y.leq(x) && infNorm(x, y) == 1;
      });
      EXPECT_TRUE(near) << x.str();
    }
  }
}

TEST(Invariants, FixedPointPathFromLeastToGreatest) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto f = genSurfaceInstance(3, 6, seed).oracle;
    const std::vector<Point> fps = allFixedPoints(*f);
    const Point lo = fps.front();
    Point hi = fps.front();
    for (const Point& p : fps) hi = join(hi, p);
    ASSERT_TRUE(std::find(fps.begin(), fps.end(), hi) != fps.end());
    std::set<Point> seen{*leastFixedPoint(*f)};
    std::vector<Point> frontier(seen.begin(), seen.end());
    while (!frontier.empty()) {
      const Point p = frontier.back();
      frontier.pop_back();
      for (const Point& q : fps)
        if (!seen.count(q) && infNorm(p, q) == 1) {
          seen.insert(q);
          frontier.push_back(q);
        }
    }
    EXPECT_EQ(seen.size(), fps.size()) << "seed " << seed << " from " << lo.str();
  }
}

TEST(Invariants, HereditaryLeastFixedPoints) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto f = genSurfaceInstance(3, 6, seed).oracle;
    f->grid().forEach([&](const Point& x) {
      const auto outer = sliceLeastFixedPoint(*f, Slice::prefixFree(x, 2));
      if (!outer || *outer != x) return;
      EXPECT_EQ(sliceLeastFixedPoint(*f, Slice::prefixFree(x, 1)), std::optional<Point>(x));
    });
  }
}

TEST(Invariants, EverySliceMeetsUpOrDown) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto f = genSurfaceInstance(3, 8, seed).oracle;
    for (Coord z = 1; z <= 8; ++z) {
      bool hit = false;
      dim2Slice(z).restrict(f->grid()).forEach([&](const Point& p) {
        hit |= inUpSet(*f, p) || inDownSet(*f, p);
      });
      EXPECT_TRUE(hit) << "seed " << seed << " slice " << z;
    }
  }
}
