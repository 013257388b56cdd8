#include <gtest/gtest.h>

#include <random>

#include "dmac/instances.hpp"
#include "dmac/reference_oracle.hpp"
#include "dmac/states.hpp"

using namespace dmac;

namespace {

ValidRegion fullSlice(const Grid& g) { return ValidRegion(g.lower()[0], g.upper()[0], g.lower()[1], g.upper()[1]); }

std::vector<Point> sliceFixedPoints(DmacOracle& f, Coord c) {
  std::vector<Point> out;
  for (const Point& p : allFixedPoints(f))
    if (p[2] == c) out.push_back(Point{p[0], p[1]});
  return out;
}

bool holdsAny(const ValidRegion& r, const std::vector<Point>& ps) {
  for (const Point& p : ps)
    if (r.contains(p)) return true;
  return false;
}

}  // namespace

TEST(CBox, AreaAndMembership) {
  const CBox b{Point{2, 3}, 4, 5};
  EXPECT_EQ(b.area(), 20);
  EXPECT_TRUE(b.contains(Point{2, 3}));
  EXPECT_TRUE(b.contains(Point{7, 7}));
  EXPECT_FALSE(b.contains(Point{8, 7}));
  EXPECT_FALSE(b.contains(Point{2, 8}));
}

TEST(DBox, AreaAndMembership) {
  const DBox d{Point{0, 4}, Point{4, 0}, 2};
  EXPECT_EQ(d.area(), 6 * 6 - 4);
  EXPECT_TRUE(d.contains(Point{0, 4}));
  EXPECT_TRUE(d.contains(Point{4, 0}));
  EXPECT_TRUE(d.contains(Point{6, 2}));
  EXPECT_TRUE(d.contains(Point{2, 6}));
  EXPECT_FALSE(d.contains(Point{7, 3}));
  EXPECT_FALSE(d.contains(Point{5, 0}));
  EXPECT_EQ((DBox{Point{0, 4}, Point{4, 0}, 0}).area(), 16);
}

TEST(SolverState, AreaMembershipAndShapeConstraints) {
  LeftLobe left{CBox{Point{10, 0}, 2, 8}, CBox{Point{6, 1}, 1, 4}};
  SolverState s{left, Polarity::Up};
  EXPECT_TRUE(s.wellFormed());
  EXPECT_EQ(s.area(), 16 + 4);
  EXPECT_TRUE(s.contains(Point{6, 1}));
  EXPECT_TRUE(s.contains(Point{18, 2}));
  EXPECT_FALSE(s.contains(Point{6, 0}));

  left.main.h = 3;
  EXPECT_FALSE((SolverState{left, Polarity::Up}).wellFormed());

  BottomLobe bottom{CBox{Point{0, 10}, 8, 2}, CBox{Point{1, 6}, 4, 1}};
  EXPECT_TRUE((SolverState{bottom, Polarity::Down}).wellFormed());
  bottom.sub.h = 3;
  EXPECT_FALSE((SolverState{bottom, Polarity::Down}).wellFormed());
}

TEST(HalfSpace, Membership) {
  using K = HalfSpace::Kind;
  const Point p{3, 5};
  EXPECT_TRUE((HalfSpace{K::Below0, 3}).contains(p));
  EXPECT_FALSE((HalfSpace{K::Below0, 2}).contains(p));
  EXPECT_TRUE((HalfSpace{K::Above0, 3}).contains(p));
  EXPECT_TRUE((HalfSpace{K::Below1, 5}).contains(p));
  EXPECT_FALSE((HalfSpace{K::Above1, 6}).contains(p));
  EXPECT_TRUE((HalfSpace{K::UpperLeft, 2}).contains(p));
  EXPECT_FALSE((HalfSpace{K::UpperLeft, 3}).contains(p));
  EXPECT_TRUE((HalfSpace{K::LowerRight, 2}).contains(p));
  EXPECT_FALSE((HalfSpace{K::LowerRight, 1}).contains(p));
}

TEST(ValidRegion, DecomposesIntoAtMostFiveBasicShapes) {
  std::mt19937_64 rng(1);
  auto pick = [&](Coord a, Coord b) { return static_cast<Coord>(a + static_cast<Coord>(rng() % (b - a + 1))); };
  for (int t = 0; t < 3000; ++t) {
    const Coord lo0 = pick(0, 5), lo1 = pick(0, 5);
    ValidRegion v(lo0, lo0 + pick(-1, 12), lo1, lo1 + pick(-1, 12));
    const int cuts = static_cast<int>(pick(0, 4));
    for (int c = 0; c < cuts; ++c) v.remove({static_cast<HalfSpace::Kind>(pick(0, 5)), pick(-8, 18)});
    const std::vector<BasicShape> shapes = v.decompose();
    ASSERT_LE(shapes.size(), 5u);
    Coord total = 0;
    for (const BasicShape& s : shapes) {
      total += s.count();
      if (s.count() > 0) {
        EXPECT_TRUE(s.contains(basicQuery(s)));
      }
    }
    EXPECT_EQ(total, v.count());
    for (Coord a = -2; a < 22; ++a)
      for (Coord b = -2; b < 22; ++b) {
        const Point p{a, b};
        int k = 0;
        for (const BasicShape& s : shapes) k += s.contains(p);
        ASSERT_EQ(k, v.contains(p) ? 1 : 0) << p.str();
      }
  }
}

TEST(ValidRegion, PointsMatchTheCount) {
  ValidRegion v(1, 6, 1, 6);
  EXPECT_EQ(v.count(), 36);
  v.remove({HalfSpace::Kind::UpperLeft, 2});
  v.remove({HalfSpace::Kind::Below0, 1});
  const std::vector<Point> pts = v.points();
  EXPECT_EQ(static_cast<Coord>(pts.size()), v.count());
  for (const Point& p : pts) {
    EXPECT_LT(p[1] - p[0], 2);
    EXPECT_GT(p[0], 1);
  }
}

TEST(TerminalHalfspace, RemovalKeepsAFixedPointOfTheSlice) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SurfaceInstance inst = genSurfaceInstance(3, 4 + static_cast<Coord>(seed % 5), seed);
    DmacOracle& f = *inst.oracle;
    const Grid& g = f.grid();
    for (Coord c = g.lower()[2]; c <= g.upper()[2]; ++c) {
      const std::vector<Point> fps = sliceFixedPoints(f, c);
      if (fps.empty()) continue;
      for (const Point& q : fullSlice(g).points()) {
        const TerminalCut cut = terminalHalfspace(f, c, q);
        if (cut.fixedPoint) {
          EXPECT_EQ(f.query(*cut.fixedPoint), *cut.fixedPoint);
          continue;
        }
        EXPECT_GE(cut.caseNumber, 1);
        EXPECT_LE(cut.caseNumber, 18);
        ValidRegion r = fullSlice(g);
        for (const HalfSpace& h : cut.removed) r.remove(h);
        EXPECT_TRUE(holdsAny(r, fps)) << "seed " << seed << " case " << cut.caseNumber;
      }
    }
  }
}

TEST(TerminalHalfspace, RepeatedCutsReachAFixedPoint) {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SurfaceInstance inst = genSurfaceInstance(3, 8, seed);
    DmacOracle& f = *inst.oracle;
    const Point& lfp = inst.lfp;
    const std::vector<Point> fps = sliceFixedPoints(f, lfp[2]);
    ValidRegion r = fullSlice(f.grid());
    bool found = false;
    for (int step = 0; step < 200 && !found; ++step) {
      ASSERT_TRUE(holdsAny(r, fps));
      const std::vector<Point> pts = r.points();
      const TerminalCut cut = terminalHalfspace(f, lfp[2], pts[rng() % pts.size()]);
      if (cut.fixedPoint) {
        found = true;
      } else {
        for (const HalfSpace& h : cut.removed) r.remove(h);
      }
    }
    EXPECT_TRUE(found) << "seed " << seed;
  }
}

TEST(CbConfig, SquaresStrictlyHoldingAnAlmostSquareCriticalBox) {
  std::size_t checks = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const SurfaceInstance inst = genSurfaceInstance(3, 6 + static_cast<Coord>(seed % 6), seed);
    DmacOracle& f = *inst.oracle;
    const Grid& g = f.grid();
    for (Coord c = g.lower()[2]; c <= g.upper()[2]; ++c) {
      const Slice s({std::nullopt, std::nullopt, c});
      for (const CriticalBox& cb : enumerateCriticalBoxes(f, s)) {
        if (std::abs(cb.h - cb.w) > 1) continue;
        const Coord side = std::max(cb.h, cb.w);
        for (Coord k = std::max<Coord>(1, side); k <= side + 2; ++k)
          for (Coord x0 = cb.x[0] - 2 * k; x0 < cb.x[0]; ++x0)
            for (Coord x1 = cb.x[1] - 2 * k; x1 < cb.x[1]; ++x1) {
              if (x0 < g.lower()[0] || x1 < g.lower()[1] || x0 + 2 * k > g.upper()[0] ||
                  x1 + 2 * k > g.upper()[1])
                continue;
              if (cb.x[0] + cb.w + 1 > x0 + 2 * k || cb.x[1] + cb.h + 1 > x1 + 2 * k) continue;
              ++checks;
              EXPECT_TRUE(isCbConfig(f, c, Point{x0, x1}, k)) << "seed " << seed << " slice " << c;
            }
      }
    }
  }
  EXPECT_GT(checks, 0u);
}

TEST(CbConfig, RejectsBadArguments) {
  auto f = genSurfaceInstance(3, 8, 1).oracle;
  EXPECT_THROW(isCbConfig(*f, 4, Point{1, 1}, 0), std::invalid_argument);
  EXPECT_THROW(isCbConfig(*f, 4, Point{5, 5}, 3), std::invalid_argument);
  auto g2 = genSurfaceInstance(2, 8, 1).oracle;
  EXPECT_THROW(isCbConfig(*g2, 4, Point{1, 1}, 1), std::invalid_argument);
}
