#include "dmac/states.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace dmac {

bool CBox::contains(const Point& p) const {
  return x[0] <= p[0] && p[0] <= x[0] + w && x[1] <= p[1] && p[1] <= x[1] + h;
}

bool DBox::contains(const Point& p) const {
  const Coord z0 = p[0];
  const Coord z1 = p[1];
  return y[1] + (z0 - y[0]) <= z1 && z1 <= x[1] + (z0 - x[0]) && x[0] <= z0 && z0 <= y[0] + l &&
         y[1] <= z1 && z1 <= x[1] + l;
}

Coord DBox::area() const { return (x[1] - y[1] + l) * (y[0] - x[0] + l) - l * l; }

namespace {

Coord floorDiv(Coord a, Coord b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

bool leftWellFormed(const LeftLobe& s) {
  const CBox& m = s.main;
  const CBox& u = s.sub;
  return u.x[0] <= m.x[0] && u.x[0] + u.w == m.x[0] && m.x[1] <= u.x[1] &&
         u.x[1] + u.h <= m.x[1] + m.h && m.h <= floorDiv(m.w, 4);
}

bool bottomWellFormed(const BottomLobe& s) {
  const CBox& m = s.main;
  const CBox& u = s.sub;
  return m.x[0] <= u.x[0] && u.x[0] + u.w <= m.x[0] + m.w && u.x[1] <= m.x[1] &&
         u.x[1] + u.h == m.x[1] && m.w <= floorDiv(m.h, 4);
}

bool diagWellFormed(const DiagLobe& s) {
  const DBox& m = s.main;
  const DBox& u = s.sub;
  const bool ratio = (m.y[0] - m.x[0]) + (m.x[1] - m.y[1]) <= floorDiv(m.l, 8);
  const bool a = u.x[0] == m.y[0] + m.l || u.x[1] == m.x[1] + m.l;
  const bool b = u.y[0] == m.y[0] + m.l || u.y[1] == m.x[1] + m.l;
  return ratio && a && b;
}

bool fullWellFormed(const FullState& s) {
  const CBox& c = s.center;
  return leftWellFormed(s.left) && bottomWellFormed(s.bottom) && diagWellFormed(s.diag) &&
         c.x == s.left.main.x.shifted(0, s.left.main.w) &&
         c.x == s.bottom.main.x.shifted(1, s.bottom.main.h) && s.diag.main.x == c.x.shifted(1, c.h) &&
         s.diag.main.y == c.x.shifted(0, c.w);
}

}  // namespace

Coord SolverState::area() const {
  struct {
    Coord operator()(const LeftLobe& s) const { return s.main.area() + s.sub.area(); }
    Coord operator()(const BottomLobe& s) const { return s.main.area() + s.sub.area(); }
    Coord operator()(const DiagLobe& s) const { return s.main.area() + s.sub.area(); }
    Coord operator()(const FullState& s) const {
      return s.center.area() + (*this)(s.left) + (*this)(s.bottom) + (*this)(s.diag);
    }
  } visit;
  return std::visit(visit, shape);
}

bool SolverState::contains(const Point& p) const {
  struct {
    const Point& p;
    bool operator()(const LeftLobe& s) const { return s.main.contains(p) || s.sub.contains(p); }
    bool operator()(const BottomLobe& s) const { return s.main.contains(p) || s.sub.contains(p); }
    bool operator()(const DiagLobe& s) const { return s.main.contains(p) || s.sub.contains(p); }
    bool operator()(const FullState& s) const {
      return s.center.contains(p) || (*this)(s.left) || (*this)(s.bottom) || (*this)(s.diag);
    }
  } visit{p};
  return std::visit(visit, shape);
}

bool SolverState::wellFormed() const {
  struct {
    bool operator()(const LeftLobe& s) const { return leftWellFormed(s); }
    bool operator()(const BottomLobe& s) const { return bottomWellFormed(s); }
    bool operator()(const DiagLobe& s) const { return diagWellFormed(s); }
    bool operator()(const FullState& s) const { return fullWellFormed(s); }
  } visit;
  return std::visit(visit, shape);
}

bool isCbConfig(DmacOracle& f, Coord slice, const Point& x, Coord k, Polarity polarity) {
  const Grid& g = f.grid();
  if (g.dim() != 3) throw std::invalid_argument("isCbConfig: instance must be three-dimensional");
  if (k <= 0) throw std::invalid_argument("isCbConfig: k must be positive");
  // Query the displacement of a slice point, seen from the chosen polarity.
  auto shift = [&](Coord d0, Coord d1) -> Point {
    Point p{x[0] + d0, x[1] + d1, slice};
    if (polarity == Polarity::Down) p = g.flip(p);
    if (!g.contains(p)) throw std::invalid_argument("isCbConfig: square leaves the grid");
    Point fp = f.query(p);
    if (polarity == Polarity::Down) {
      fp = g.flip(fp);
      p = g.flip(p);
    }
    return fp - p;
  };
  const Coord s = 2 * k;
  const Point h00 = shift(0, 0);
  const Point h10 = shift(s, 0);
  const Point h01 = shift(0, s);
  const Point h11 = shift(s, s);
  // Displacements are relative to the queried point, so "f_0(x + 2k e_0) <
  // x_0 + 2k" reads h10[0] < 0, and "f_0(x + 2k e_1) >= x_0" reads h01[0] >= 0.
  const bool dim0 = (h00[0] >= 0 && h10[0] < 0) || (h01[0] >= 0 && h11[0] < 0);
  const bool dim1 = (h00[1] >= 0 && h01[1] < 0) || (h10[1] >= 0 && h11[1] < 0);
  const bool dim2 = h00[2] < 0 && h11[2] >= 0;
  return dim0 && dim1 && dim2;
}

bool HalfSpace::contains(const Point& p) const {
  switch (kind) {
    case Kind::Below0:
      return p[0] <= bound;
    case Kind::Above0:
      return p[0] >= bound;
    case Kind::Below1:
      return p[1] <= bound;
    case Kind::Above1:
      return p[1] >= bound;
    case Kind::UpperLeft:
      return p[1] - p[0] >= bound;
    case Kind::LowerRight:
      return p[1] - p[0] <= bound;
  }
  return false;
}

TerminalCut terminalHalfspace(DmacOracle& f, Coord slice, const Point& q) {
  if (f.dim() != 3) throw std::invalid_argument("terminalHalfspace: instance must be three-dimensional");
  const Point p{q[0], q[1], slice};
  const Point fp = f.query(p);
  const int s0 = sgn(fp[0] - p[0]);
  const int s1 = sgn(fp[1] - p[1]);
  const int s2 = sgn(fp[2] - p[2]);
  using K = HalfSpace::Kind;
  TerminalCut out;
  if (s0 == 0 && s1 == 0 && s2 == 0) {
    out.fixedPoint = p;
    return out;
  }
  auto cut = [&](int c, std::initializer_list<HalfSpace> hs) {
    out.caseNumber = c;
    out.removed.assign(hs.begin(), hs.end());
    return out;
  };
  const Coord diag = q[1] - q[0];
  if (s0 != 0 && s1 != 0) {
    if (s0 > 0 && s1 > 0) return cut(1, {{K::Below0, q[0]}, {K::Below1, q[1]}});
    if (s0 < 0 && s1 > 0) return cut(2, {{K::LowerRight, diag}});
    if (s0 > 0 && s1 < 0) return cut(3, {{K::UpperLeft, diag}});
    return cut(4, {{K::Above0, q[0]}, {K::Above1, q[1]}});
  }
  if (s0 != 0) {
    if (s0 > 0) {
      if (s2 > 0) return cut(5, {{K::Above1, q[1]}});
      if (s2 < 0) return cut(6, {{K::Below0, q[0]}});
      return cut(7, {{K::Below0, q[0] - 1}});
    }
    if (s2 > 0) return cut(8, {{K::Above0, q[0]}});
    if (s2 < 0) return cut(9, {{K::Below1, q[1]}});
    return cut(10, {{K::Above0, q[0] + 1}});
  }
  if (s1 != 0) {
    // Cases 5 to 10 with the slice dimensions exchanged.
    if (s1 > 0) {
      if (s2 > 0) return cut(13, {{K::Above0, q[0]}});
      if (s2 < 0) return cut(14, {{K::Below1, q[1]}});
      return cut(15, {{K::Below1, q[1] - 1}});
    }
    if (s2 > 0) return cut(16, {{K::Above1, q[1]}});
    if (s2 < 0) return cut(17, {{K::Below0, q[0]}});
    return cut(18, {{K::Above1, q[1] + 1}});
  }
  if (s2 < 0) return cut(11, {{K::Above0, q[0] + 1}});
  return cut(12, {{K::Below0, q[0] - 1}});
}

bool BasicShape::contains(const Point& p) const {
  return p[1] >= r0 && p[1] <= r1 && p[0] >= left(p[1]) && p[0] <= right(p[1]);
}

Coord BasicShape::count() const {
  Coord n = 0;
  for (Coord r = r0; r <= r1; ++r) n += std::max<Coord>(0, right(r) - left(r) + 1);
  return n;
}

ValidRegion::ValidRegion(Coord lo0, Coord hi0, Coord lo1, Coord hi1)
    : lo0_(lo0), hi0_(hi0), lo1_(lo1), hi1_(hi1) {}

Coord ValidRegion::rowLeft(Coord r) const {
  return upperLeft_ ? std::max(lo0_, r - *upperLeft_ + 1) : lo0_;
}

Coord ValidRegion::rowRight(Coord r) const {
  return lowerRight_ ? std::min(hi0_, r - *lowerRight_ - 1) : hi0_;
}

bool ValidRegion::contains(const Point& p) const {
  return p[1] >= lo1_ && p[1] <= hi1_ && p[0] >= rowLeft(p[1]) && p[0] <= rowRight(p[1]);
}

Coord ValidRegion::count() const {
  Coord n = 0;
  for (Coord r = lo1_; r <= hi1_; ++r) n += std::max<Coord>(0, rowRight(r) - rowLeft(r) + 1);
  return n;
}

void ValidRegion::remove(const HalfSpace& h) {
  using K = HalfSpace::Kind;
  switch (h.kind) {
    case K::Below0:
      lo0_ = std::max(lo0_, h.bound + 1);
      break;
    case K::Above0:
      hi0_ = std::min(hi0_, h.bound - 1);
      break;
    case K::Below1:
      lo1_ = std::max(lo1_, h.bound + 1);
      break;
    case K::Above1:
      hi1_ = std::min(hi1_, h.bound - 1);
      break;
    case K::UpperLeft:
      upperLeft_ = upperLeft_ ? std::min(*upperLeft_, h.bound) : h.bound;
      break;
    case K::LowerRight:
      lowerRight_ = lowerRight_ ? std::max(*lowerRight_, h.bound) : h.bound;
      break;
  }
}

std::vector<Point> ValidRegion::points() const {
  std::vector<Point> out;
  for (Coord r = lo1_; r <= hi1_; ++r)
    for (Coord c = rowLeft(r); c <= rowRight(r); ++c) out.push_back(Point{c, r});
  return out;
}

std::vector<BasicShape> ValidRegion::decompose() const {
  using K = BasicShape::Kind;
  std::vector<BasicShape> out;
  if (lo1_ > hi1_) return out;
  // The left side turns diagonal at row a, the right side turns vertical at
  // row b.
  const Coord big = hi1_ + 1;
  const Coord a = upperLeft_ ? lo0_ + *upperLeft_ : big;
  const Coord b = lowerRight_ ? hi0_ + *lowerRight_ + 1 : lo1_;
  std::vector<Coord> cuts{lo1_, std::clamp(std::min(a, b), lo1_, big), std::clamp(std::max(a, b), lo1_, big),
                          big};
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    Coord r0 = cuts[k];
    Coord r1 = cuts[k + 1] - 1;
    if (r0 > r1) continue;
    const Coord sl = r0 >= a ? 1 : 0;
    const Coord sr = r0 >= b ? 0 : 1;
    // Keep the rows that are non-empty; the width is linear in the row.
    while (r0 <= r1 && rowRight(r0) < rowLeft(r0)) ++r0;
    while (r1 >= r0 && rowRight(r1) < rowLeft(r1)) --r1;
    if (r0 > r1) continue;
    const Coord l0 = rowLeft(r0);
    const Coord rr0 = rowRight(r0);
    if (sl == 0 && sr == 0) {
      out.push_back({K::Box, r0, r1, l0, rr0, 0, 0});
    } else if (sl == 1 && sr == 1) {
      out.push_back({K::Parallelogram, r0, r1, l0, rr0, 1, 1});
    } else if (sl == 0) {
      out.push_back({K::Box, r0, r1, l0, rr0, 0, 0});
      if (r1 > r0) out.push_back({K::TriangleWide, r0 + 1, r1, rr0 + 1, rr0 + 1, 0, 1});
    } else {
      const Coord lTop = rowLeft(r1);
      out.push_back({K::Box, r0, r1, lTop, rr0, 0, 0});
      if (r1 > r0) out.push_back({K::TriangleNarrow, r0, r1 - 1, l0, lTop - 1, 1, 0});
    }
  }
  return out;
}

Point basicQuery(const BasicShape& s) {
  using K = BasicShape::Kind;
  const Coord w = s.right0 - s.left0;
  const Coord h = s.r1 - s.r0;
  switch (s.kind) {
    case K::Box:
      return Point{s.left0 + w / 2, s.r0 + h / 2};
    case K::Parallelogram:
      return Point{s.left0 + w / 2 + h / 2, s.r0 + h / 2};
    case K::TriangleNarrow: {
      const Coord q = (w + 1) / 4;
      return Point{s.left0 + 2 * q, s.r0 + q};
    }
    case K::TriangleWide: {
      const Coord top = s.right(s.r1);
      const Coord q = (top - s.left0 + 1) / 4;
      return Point{top - 2 * q, s.r1 - q};
    }
  }
  throw std::logic_error("basicQuery: unknown shape");
}

}  // namespace dmac
