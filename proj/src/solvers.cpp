#include "dmac/solvers.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <stdexcept>

namespace dmac {

namespace {

constexpr Coord kInf = Coord(1) << 50;

/// Sum over integers x in [p, r) of max(0, c0 + c1 * x) with c1 in {-1, 0, 1}.
Wide sumPositive(Coord c0, int c1, Coord p, Coord r) {
  if (p >= r) return 0;
  if (c1 == 0) return c0 > 0 ? Wide(c0) * (r - p) : Wide(0);
  if (c1 == 1) {
    const Coord lo = std::max(p, 1 - c0);
    if (lo >= r) return 0;
    const Wide cnt = r - lo;
    return cnt * c0 + (Wide(lo) + (r - 1)) * cnt / 2;
  }
  const Coord hi = std::min(r - 1, c0 - 1);
  if (hi < p) return 0;
  const Wide cnt = hi - p + 1;
  return cnt * c0 - (Wide(p) + hi) * cnt / 2;
}

/// The column band [max(Lc, x + Ls), min(Hc, x + Hs)] over a range of x.
struct Band {
  Coord Lc, Ls, Hc, Hs;

  /// Adds the number of points and the number of columns whose band
  /// contains row.
  void accumulate(Coord s, Coord e, Coord row, Wide& area, Wide& rowHits) const {
    const Coord xL = Lc - Ls;  // x >= xL: lower bound is x + Ls
    const Coord xH = Hc - Hs;  // x >= xH: upper bound is Hc
    std::array<Coord, 4> cuts{s, e, std::clamp(xL, s, e), std::clamp(xH, s, e)};
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const Coord p = cuts[k], r = cuts[k + 1];
      if (p >= r) continue;
      const bool lSlope = p >= xL;
      const bool hConst = p >= xH;
      const Coord lOff = lSlope ? Ls : Lc;
      const Coord hOff = hConst ? Hc : Hs;
      const int c1 = (hConst ? 0 : 1) - (lSlope ? 1 : 0);
      area += sumPositive(hOff - lOff + 1, c1, p, r);
      // Columns x with lower(x) <= row <= upper(x).
      Coord a = p, b = r - 1;
      if (lSlope) b = std::min(b, row - Ls);
      else if (lOff > row) continue;
      if (hConst) {
        if (hOff < row) continue;
      } else {
        a = std::max(a, row - Hs);
      }
      if (a <= b) rowHits += b - a + 1;
    }
  }
};

}  // namespace

bool Cut::contains(Coord p0, Coord p1) const {
  switch (kind) {
    case Kind::Dim0:
      return p0 >= a && p0 - p1 >= a - b;
    case Kind::Dim1:
      return p1 >= b && p1 - p0 >= b - a;
    case Kind::Dim2:
      return p0 <= a && p1 <= b;
  }
  return false;
}

SliceRegion::SliceRegion(Coord lo0, Coord hi0, Coord lo1, Coord hi1, Coord faceWeight)
    : lo0_(lo0), hi0_(hi0), lo1_(lo1), hi1_(hi1), weight_(std::max<Coord>(faceWeight, 1)) {}

bool SliceRegion::contains(Coord p0, Coord p1) const {
  if (p0 < lo0_ || p0 > hi0_ || p1 < lo1_ || p1 > hi1_) return false;
  for (const Cut& c : cuts_)
    if (c.contains(p0, p1)) return false;
  return true;
}

Wide SliceRegion::measure() const { return measureCuts(cuts_, nullptr); }

Wide SliceRegion::measureWith(const Cut& c) const { return measureCuts(cuts_, &c); }

Wide SliceRegion::measureCuts(const std::vector<Cut>& cuts, const Cut* extra) const {
  if (lo0_ > hi0_ || lo1_ > hi1_) return 0;
  std::vector<Coord> xs{lo0_, lo0_ + 1, hi0_ + 1};
  auto addBreaks = [&](const Cut& c) {
    xs.push_back(c.kind == Cut::Kind::Dim2 ? c.a + 1 : c.a);
  };
  for (const Cut& c : cuts) addBreaks(c);
  if (extra) addBreaks(*extra);
  for (Coord& x : xs) x = std::clamp(x, lo0_, hi0_ + 1);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  Wide total = 0;
  Wide rowHits = 0;
  auto visit = [&](const Cut& c, Coord s, Coord& Dc, Coord& Ds, Coord& Uc, Coord& Us) {
    switch (c.kind) {
      case Cut::Kind::Dim2:
        if (s <= c.a) Dc = std::max(Dc, c.b);
        break;
      case Cut::Kind::Dim0:
        if (s >= c.a) Ds = std::max(Ds, c.b - c.a);
        break;
      case Cut::Kind::Dim1:
        if (s >= c.a) Us = std::min(Us, c.b - c.a);
        else Uc = std::min(Uc, c.b);
        break;
    }
  };
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const Coord s = xs[k], e = xs[k + 1];
    Coord Dc = lo1_ - 1, Ds = -kInf, Uc = hi1_ + 1, Us = kInf;
    for (const Cut& c : cuts) visit(c, s, Dc, Ds, Uc, Us);
    if (extra) visit(*extra, s, Dc, Ds, Uc, Us);
    const Band band{std::max(Dc + 1, lo1_), Ds == -kInf ? -kInf : Ds + 1,
                    std::min(Uc - 1, hi1_), Us == kInf ? kInf : Us - 1};
    Wide area = 0, hits = 0;
    band.accumulate(s, e, lo1_, area, hits);
    total += (s == lo0_) ? area * weight_ : area;
    rowHits += hits;
  }
  total += rowHits * (weight_ - 1);
  const bool corner = [&] {
    if (!contains(lo0_, lo1_)) return false;
    return !(extra && extra->contains(lo0_, lo1_));
  }();
  if (corner) total += Wide(weight_ - 1) * (weight_ - 1);
  return total;
}

void SliceRegion::translate(Coord delta) {
  for (Cut& c : cuts_) {
    c.a += delta;
    c.b += delta;
  }
}

Wide SliceRegion::guaranteedRemoval(Coord q0, Coord q1) const {
  const Wide mu = measure();
  Wide worst = mu;
  for (Cut::Kind kind : {Cut::Kind::Dim0, Cut::Kind::Dim1, Cut::Kind::Dim2})
    worst = std::min(worst, mu - measureWith(Cut{kind, q0, q1}));
  return worst;
}

std::pair<Coord, Coord> SliceRegion::choose() const {
  const Wide mu = measure();
  if (mu == 0) throw std::logic_error("SliceRegion::choose on an empty region");

  // Weighted median of w = p0 - p1: the least W with mass(w <= W) >= mu / 2.
  Coord wLo = lo0_ - hi1_, wHi = hi0_ - lo1_;
  while (wLo < wHi) {
    const Coord mid = wLo + (wHi - wLo) / 2;
    const Wide below = measureWith(Cut{Cut::Kind::Dim0, lo0_, lo0_ - mid - 1});
    if (2 * below >= mu) wHi = mid;
    else wLo = mid + 1;
  }
  const Coord W = wLo;

  // Along the line p0 - p1 = W the removal of a Dim2 cut grows with t = p0
  // while the removals of Dim0 and Dim1 cuts shrink. Find the crossing.
  const Coord tMin = std::max(lo0_, lo1_ + W);
  const Coord tMax = std::min(hi0_, hi1_ + W);
  auto removals = [&](Coord t) {
    std::array<Wide, 3> r{};
    r[0] = mu - measureWith(Cut{Cut::Kind::Dim0, t, t - W});
    r[1] = mu - measureWith(Cut{Cut::Kind::Dim1, t, t - W});
    r[2] = mu - measureWith(Cut{Cut::Kind::Dim2, t, t - W});
    return r;
  };
  Coord lo = tMin, hi = tMax;
  while (lo < hi) {
    const Coord mid = lo + (hi - lo) / 2;
    const auto r = removals(mid);
    if (r[2] >= std::min(r[0], r[1])) hi = mid;
    else lo = mid + 1;
  }
  std::pair<Coord, Coord> best{lo, lo - W};
  Wide bestScore = -1;
  for (Coord t : {lo - 1, lo, lo + 1}) {
    if (t < tMin || t > tMax) continue;
    const auto r = removals(t);
    const Wide score = std::min({r[0], r[1], r[2]});
    if (score > bestScore) {
      bestScore = score;
      best = {t, t - W};
    }
  }
  if (contains(lo0_, lo1_)) {
    const Wide score = guaranteedRemoval(lo0_, lo1_);
    if (score > bestScore) {
      bestScore = score;
      best = {lo0_, lo1_};
    }
  }
  if (bestScore > 0) return best;

  // Fall back to a point of the region, which every cut at it removes.
  Coord xa = lo0_, xb = hi0_;
  while (xa < xb) {
    const Coord mid = xa + (xb - xa) / 2;
    if (measureWith(Cut{Cut::Kind::Dim2, mid, hi1_}) < mu) xb = mid;
    else xa = mid + 1;
  }
  Coord ya = lo1_, yb = hi1_;
  while (ya < yb) {
    const Coord mid = ya + (yb - ya) / 2;
    if (measureWith(Cut{Cut::Kind::Dim2, xa, mid}) < mu) yb = mid;
    else ya = mid + 1;
  }
  return {xa, ya};
}

LineRegion::LineRegion(Coord lo, Coord hi, Coord faceWeight)
    : lo_(lo), hi_(hi), weight_(std::max<Coord>(faceWeight, 1)), below_(-kInf), above_(kInf) {}

Wide LineRegion::measure() const {
  const Coord a = std::max(below_ + 1, lo_);
  const Coord b = std::min(above_ - 1, hi_);
  if (a > b) return 0;
  Wide m = b - a + 1;
  if (a == lo_) m += weight_ - 1;
  return m;
}

void LineRegion::translate(Coord delta) {
  if (below_ != -kInf) below_ += delta;
  if (above_ != kInf) above_ += delta;
}

Coord LineRegion::choose() const {
  const Wide mu = measure();
  if (mu == 0) throw std::logic_error("LineRegion::choose on an empty region");
  const Coord a = std::max(below_ + 1, lo_);
  const Coord b = std::min(above_ - 1, hi_);
  const Wide head = (a == lo_) ? Wide(weight_) : Wide(1);
  if (2 * head >= mu) return a;
  // Mass of [a, y] is head + (y - a); take the least y reaching mu / 2.
  const Wide need = (mu + 1) / 2 - head;
  const Coord y = a + static_cast<Coord>(need);
  return std::min(y, b);
}

void SolveStats::merge(const SolveStats& o) {
  solverQueries += o.solverQueries;
  outerIterations += o.outerIterations;
  innerSteps += o.innerSteps;
  jumps += o.jumps;
  worstStepRatio = std::max(worstStepRatio, o.worstStepRatio);
  worstJumpRatio = std::max(worstJumpRatio, o.worstJumpRatio);
  ledgerViolations += o.ledgerViolations;
  ledgerMessages.insert(ledgerMessages.end(), o.ledgerMessages.begin(), o.ledgerMessages.end());
}

namespace {

OraclePtr borrow(DmacOracle& f) { return OraclePtr(&f, [](DmacOracle*) {}); }

double ratio(Wide after, Wide before) {
  if (before == 0) return after == 0 ? 0.0 : 1e300;
  return static_cast<double>(after) / static_cast<double>(before);
}

/// Records a multiplier of the weighted area and checks it against a bound.
class Ledger {
 public:
  Ledger(SolveStats& stats, const LedgerBounds& bounds) : stats_(stats), bounds_(bounds) {}

  void step(Wide before, Wide after, const char* where) {
    const double r = ratio(after, before);
    stats_.worstStepRatio = std::max(stats_.worstStepRatio, r);
    if (r > bounds_.step) note(where, "step", r);
  }
  void jump(Wide before, Wide after, const char* where) {
    ++stats_.jumps;
    const double r = ratio(after, before);
    stats_.worstJumpRatio = std::max(stats_.worstJumpRatio, r);
    if (r > bounds_.jump) note(where, "jump", r);
  }

 private:
  void note(const char* where, const char* what, double r) {
    ++stats_.ledgerViolations;
    if (stats_.ledgerMessages.size() < 32) {
      std::ostringstream os;
      os << where << ": " << what << " multiplier " << r;
      stats_.ledgerMessages.push_back(os.str());
    }
  }
  SolveStats& stats_;
  LedgerBounds bounds_;
};

enum class StepStatus { Found, Empty, Continue };

/// The search for an up point in one slice of a 2D instance. The slice
/// dimension is index 1 and the searched coordinate index 0.
struct LineSide {
  using Region = LineRegion;
  OraclePtr f;
  Region region;
  Coord slice = 0;
  Point found;

  static Region initial(const Grid& g) {
    return Region(g.lower()[0], g.upper()[0], g.extent(1));
  }

  StepStatus step(Ledger& ledger) {
    const Wide before = region.measure();
    if (before == 0) return StepStatus::Empty;
    const Coord y = region.choose();
    const Point x(std::vector<Coord>{y, slice}, f->grid().scale());
    const Point fx = f->query(x);
    if (fx[0] >= x[0] && fx[1] >= x[1]) {
      found = x;
      return StepStatus::Found;
    }
    if (fx[0] < x[0]) region.cutAbove(y);
    if (fx[1] < x[1]) region.cutBelow(y);
    ledger.step(before, region.measure(), "solve2d");
    return StepStatus::Continue;
  }
};

/// The search for an up point in one dimension-3 slice of a 3D instance.
struct PlaneSide {
  using Region = SliceRegion;
  OraclePtr f;
  Region region;
  Coord slice = 0;
  Point found;

  static Region initial(const Grid& g) {
    return Region(g.lower()[0], g.upper()[0], g.lower()[1], g.upper()[1], g.extent(2));
  }

  StepStatus step(Ledger& ledger) {
    const Wide before = region.measure();
    if (before == 0) return StepStatus::Empty;
    const auto [q0, q1] = region.choose();
    const Point x(std::vector<Coord>{q0, q1, slice}, f->grid().scale());
    const Point fx = f->query(x);
    if (fx.geq(x)) {
      found = x;
      return StepStatus::Found;
    }
    static constexpr Cut::Kind kinds[3] = {Cut::Kind::Dim0, Cut::Kind::Dim1, Cut::Kind::Dim2};
    for (std::size_t i = 0; i < 3; ++i)
      if (fx[i] < x[i]) region.addCut(Cut{kinds[i], q0, q1});
    ledger.step(before, region.measure(), "solve3d");
    return StepStatus::Continue;
  }
};

/// Move a side to a later slice of its own oracle.
template <class Side>
void moveSide(Side& side, Coord target, Ledger& ledger, const char* where) {
  const Coord delta = target - side.slice;
  if (delta < 0) throw std::logic_error("sides only move towards higher slices");
  if (delta == 0) return;
  const Wide before = side.region.measure();
  side.region.translate(delta);
  side.slice = target;
  ledger.jump(before, side.region.measure(), where);
}

/// State of the outer binary search over the last dimension: the up side
/// lives in slice l of f and the down side in slice u, expressed in the
/// coordinates of the flipped oracle.
template <class Side>
struct Bracket {
  OraclePtr f;
  OraclePtr flipped;
  std::size_t sliceDim = 0;
  Coord lo = 0, hi = 0;
  Coord l = 0, u = 0;
  Side up;
  Side down;

  Coord flipSlice(Coord c) const { return lo + hi - c; }

  static Bracket start(const OraclePtr& f, std::size_t sliceDim) {
    Bracket b;
    b.f = f;
    b.flipped = flipOracle(f);
    b.sliceDim = sliceDim;
    b.lo = f->grid().lower()[sliceDim];
    b.hi = f->grid().upper()[sliceDim];
    b.l = b.lo;
    b.u = b.hi;
    b.up = Side{f, Side::initial(f->grid()), b.lo, {}};
    b.down = Side{b.flipped, Side::initial(f->grid()), b.lo, {}};
    return b;
  }

  void run(SolveStats& stats, Ledger& ledger, const char* where) {
    while (u - l > 1) {
      ++stats.outerIterations;
      const Coord i = l + (u - l) / 2;
      Side a = up;
      Side b = down;
      moveSide(a, i, ledger, where);
      moveSide(b, flipSlice(i), ledger, where);
      for (;;) {
        ++stats.innerSteps;
        const StepStatus sa = a.step(ledger);
        if (sa == StepStatus::Found) {
          l = i;
          up = a;
          break;
        }
        if (sa == StepStatus::Empty) {
          u = i;
          down = b;
          break;
        }
        ++stats.innerSteps;
        const StepStatus sb = b.step(ledger);
        if (sb == StepStatus::Found) {
          u = i;
          down = b;
          break;
        }
        if (sb == StepStatus::Empty) {
          l = i;
          up = a;
          break;
        }
      }
    }
  }

  /// With u = l + 1, decide which slice meets both Up(f) and Down(f).
  Coord twoSlice(SolveStats& stats, Ledger& ledger, const char* where) {
    if (u <= l) return l;
    if (u - l != 1) throw std::logic_error("twoSlice needs adjacent slices");
    Side b = down;
    moveSide(b, flipSlice(l), ledger, where);
    for (;;) {
      ++stats.innerSteps;
      const StepStatus s = b.step(ledger);
      if (s == StepStatus::Found) return l;
      if (s == StepStatus::Empty) return u;
    }
  }
};

void requireDim(const DmacOracle& f, std::size_t d, const char* who) {
  if (f.dim() != d) throw std::invalid_argument(std::string(who) + ": wrong dimension");
}

/// The fixed point of slice x_1 = slice of a 2D instance, which must exist.
Point terminal2d(DmacOracle& f, Coord slice) {
  const Grid& g = f.grid();
  Coord a = g.lower()[0], b = g.upper()[0];
  while (a <= b) {
    const Coord y = a + (b - a) / 2;
    const Point x(std::vector<Coord>{y, slice}, g.scale());
    const Point fx = f.query(x);
    if (fx[0] > y) {
      a = y + 1;
    } else if (fx[0] < y) {
      b = y - 1;
    } else {
      if (fx[1] != slice)
        throw PromiseViolation("slice " + std::to_string(slice) +
                               " has no fixed point although it meets both Up and Down");
      return x;
    }
  }
  throw PromiseViolation("no one-dimensional fixed point in slice " + std::to_string(slice));
}

}  // namespace

Point solve2d(DmacOracle& f, SolveStats* stats, const LedgerBounds& bounds) {
  requireDim(f, 2, "solve2d");
  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  const std::int64_t q0 = f.queryCount();
  Ledger ledger(st, bounds);
  auto bracket = Bracket<LineSide>::start(borrow(f), 1);
  bracket.run(st, ledger, "solve2d");
  const Coord slice = bracket.twoSlice(st, ledger, "solve2d");
  const Point p = terminal2d(f, slice);
  st.solverQueries += f.queryCount() - q0;
  return p;
}

SliceBracket mainLoop3d(DmacOracle& f, SolveStats* stats, const LedgerBounds& bounds) {
  requireDim(f, 3, "mainLoop3d");
  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  const std::int64_t q0 = f.queryCount();
  Ledger ledger(st, bounds);
  auto bracket = Bracket<PlaneSide>::start(borrow(f), 2);
  bracket.run(st, ledger, "mainLoop3d");
  st.solverQueries += f.queryCount() - q0;
  return {bracket.l, bracket.u};
}

Coord twoSliceSubAlgorithm(DmacOracle& f, Coord l, Coord u, SolveStats* stats,
                           const LedgerBounds& bounds) {
  requireDim(f, 3, "twoSliceSubAlgorithm");
  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  const std::int64_t q0 = f.queryCount();
  Ledger ledger(st, bounds);
  auto bracket = Bracket<PlaneSide>::start(borrow(f), 2);
  bracket.l = l;
  bracket.u = u;
  bracket.down.slice = bracket.flipSlice(u);
  const Coord i = bracket.twoSlice(st, ledger, "twoSlice");
  st.solverQueries += f.queryCount() - q0;
  return i;
}

OraclePtr sliceOracle3d(DmacOracle& f, Coord slice) {
  requireDim(f, 3, "sliceOracle3d");
  const Grid& g = f.grid();
  const Grid sg(Point(std::vector<Coord>{g.lower()[0], g.lower()[1]}, g.scale()),
                Point(std::vector<Coord>{g.upper()[0], g.upper()[1]}, g.scale()));
  DmacOracle* fp = &f;
  const int scale = g.scale();
  return DmacOracle::make(
      sg,
      [fp, slice, scale](const Point& p) {
        const Point fx = fp->query(Point(std::vector<Coord>{p[0], p[1], slice}, scale));
        return Point(std::vector<Coord>{fx[0], fx[1]}, scale);
      },
      f.unitDisplacement());
}

Point terminalPhase(DmacOracle& f, Coord slice, SolveStats* stats, const LedgerBounds& bounds) {
  requireDim(f, 3, "terminalPhase");
  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  const std::int64_t q0 = f.queryCount();
  const Grid& g = f.grid();
  const int scale = g.scale();

  // The fixed points of the slice map form a diagonal segment along which
  // f_3 is monotone, and a global fixed point lies on it.
  OraclePtr sf = sliceOracle3d(f, slice);
  SolveStats inner;
  const Point p = solve2d(*sf, &inner, bounds);
  inner.solverQueries = 0;
  st.merge(inner);

  auto at = [&](Coord k) {
    return Point(std::vector<Coord>{p[0] + k, p[1] + k, slice}, scale);
  };
  auto sliceFixed = [&](const Point& x, const Point& fx) { return fx[0] == x[0] && fx[1] == x[1]; };

  const Point x0 = at(0);
  const Point f0 = f.query(x0);
  if (!sliceFixed(x0, f0)) throw PromiseViolation("slice solver returned a non-fixed point");
  Point result;
  if (f0[2] == slice) {
    result = x0;
  } else {
    const int dir = f0[2] > slice ? -1 : 1;
    const Coord K = std::max(g.extent(0), g.extent(1));
    // Search k in [1, K] along direction dir for f_3 = slice.
    Coord a = 1, b = K;
    bool done = false;
    while (a <= b && !done) {
      const Coord m = a + (b - a) / 2;
      const Point x = at(dir * m);
      if (!g.contains(x)) {
        b = m - 1;
        continue;
      }
      const Point fx = f.query(x);
      if (!sliceFixed(x, fx)) {
        b = m - 1;
        continue;
      }
      const int s = sgn(fx[2] - slice) * dir;
      if (s == 0) {
        result = x;
        done = true;
      } else if (s > 0) {
        b = m - 1;
      } else {
        a = m + 1;
      }
    }
    if (!done)
      throw PromiseViolation("no global fixed point on the fixed diagonal of slice " +
                             std::to_string(slice));
  }
  st.solverQueries += f.queryCount() - q0;
  return result;
}

Point solve3dCore(DmacOracle& f, SolveStats* stats, const LedgerBounds& bounds) {
  requireDim(f, 3, "solve3d");
  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  const std::int64_t q0 = f.queryCount();
  Ledger ledger(st, bounds);
  auto bracket = Bracket<PlaneSide>::start(borrow(f), 2);
  bracket.run(st, ledger, "mainLoop3d");
  const Coord slice = bracket.twoSlice(st, ledger, "twoSlice");
  SolveStats term;
  const Point p = terminalPhase(f, slice, &term, bounds);
  term.solverQueries = 0;
  st.merge(term);
  st.solverQueries += f.queryCount() - q0;
  return p;
}

SolveResult solve3d(const OraclePtr& f, const SolveOptions& opts) {
  if (f->dim() != 3) throw std::invalid_argument("solve3d: instance must be three-dimensional");
  SolveResult out;
  if (!opts.preprocess && !opts.lfpMode) {
    const Point p = solve3dCore(*f, &out.stats, opts.ledger);
    out.solution = Solution::fixedPoint(p);
    return out;
  }
  const ReductionResult r = preprocess3d(f, opts.lfpMode);
  const Point p = solve3dCore(*r.oracle, &out.stats, opts.ledger);
  out.solution = r.mapBack(Solution::fixedPoint(p));
  return out;
}

}  // namespace dmac
