#include "dmac/reference_oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <unordered_map>

namespace dmac {

namespace {

using Table = std::unordered_map<Point, Point, PointHash>;

void checkBudget(const Grid& g, Coord budget) {
  if (g.size() > budget)
    throw BudgetExceeded("grid has " + std::to_string(g.size()) + " points, budget " +
                         std::to_string(budget));
}

Table tabulate(DmacOracle& f, Coord budget) {
  checkBudget(f.grid(), budget);
  Table t;
  t.reserve(static_cast<std::size_t>(f.grid().size()));
  f.grid().forEach([&](const Point& x) { t.emplace(x, f.query(x)); });
  return t;
}

std::optional<Solution> classifyTabulated(const Table& t, const Point& x, const Point& y) {
  const Point& fx = t.at(x);
  const Point& fy = t.at(y);
  if (x.leq(y) && !fx.leq(fy)) return Solution::mono(x, y);
  if (y.leq(x) && !fy.leq(fx)) return Solution::mono(y, x);
  if (infNorm(fx, fy) > infNorm(x, y)) return Solution::nonExp(x, y);
  return std::nullopt;
}

/// Offsets in [-D, D]^d that are lexicographically positive.
std::vector<Point> positiveOffsets(std::size_t d, Coord D, int scale) {
  std::vector<Point> out;
  Grid box = Grid::cube(d, -D, D, scale);
  box.forEach([&](const Point& o) {
    for (std::size_t k = 0; k < d; ++k) {
      if (o[k] > 0) {
        out.push_back(o);
        return;
      }
      if (o[k] < 0) return;
    }
  });
  return out;
}

std::optional<Point> leastOf(std::vector<Point> pts) {
  if (pts.empty()) return std::nullopt;
  Point m = pts.front();
  for (const auto& p : pts) m = meet(m, p);
  if (std::find(pts.begin(), pts.end(), m) != pts.end()) return m;
  for (const auto& p : pts) {
    bool minimal = true;
    for (const auto& q : pts)
      if (q != p && q.leq(p)) {
        minimal = false;
        break;
      }
    if (minimal) return p;
  }
  return pts.front();
}

}  // namespace

Coord defaultBruteForceBudget() {
  if (const char* env = std::getenv("DMAC_BUDGET")) {
    try {
      Coord v = std::stoll(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return 50000;
}

BruteForceResult bruteForceSolve(const DmacOracle& f, const BruteForceOptions& opts) {
  auto g = f.clone();
  Table t = tabulate(*g, opts.budget);
  const Grid& grid = g->grid();
  BruteForceResult r;
  grid.forEach([&](const Point& x) {
    if (t.at(x) == x) r.fixedPoints.push_back(x);
  });
  const auto offsets = positiveOffsets(grid.dim(), opts.nearDistance, grid.scale());
  grid.forEach([&](const Point& x) {
    if (r.violation) return;
    for (const auto& o : offsets) {
      Point y = x + o;
      if (!grid.contains(y)) continue;
      if (auto v = classifyTabulated(t, x, y)) {
        r.violation = v;
        return;
      }
    }
  });
  if (!r.violation && grid.size() <= opts.comparableScanLimit) {
    std::vector<Point> pts;
    grid.forEach([&](const Point& x) { pts.push_back(x); });
    for (std::size_t a = 0; a < pts.size() && !r.violation; ++a)
      for (std::size_t b = a + 1; b < pts.size(); ++b) {
        if (!pts[a].comparable(pts[b])) continue;
        if (auto v = classifyTabulated(t, pts[a], pts[b])) {
          r.violation = v;
          break;
        }
      }
  }
  return r;
}

std::vector<Point> allFixedPoints(const DmacOracle& f, Coord budget) {
  auto g = f.clone();
  checkBudget(g->grid(), budget);
  std::vector<Point> out;
  g->grid().forEach([&](const Point& x) {
    if (g->query(x) == x) out.push_back(x);
  });
  return out;
}

std::optional<Point> leastFixedPoint(const DmacOracle& f, Coord budget) {
  return leastOf(allFixedPoints(f, budget));
}

std::optional<Point> sliceLeastFixedPoint(const DmacOracle& f, const Slice& slice, Coord budget) {
  auto g = f.clone();
  const Grid sub = slice.restrict(g->grid());
  checkBudget(sub, budget);
  const auto free = slice.freeDims();
  std::vector<Point> fps;
  sub.forEach([&](const Point& x) {
    const Point fx = g->query(x);
    for (std::size_t k : free)
      if (fx[k] != x[k]) return;
    fps.push_back(x);
  });
  return leastOf(std::move(fps));
}

Point dropDim(const Point& p, std::size_t i) {
  std::vector<Coord> c = p.coords();
  c.erase(c.begin() + static_cast<std::ptrdiff_t>(i));
  return Point(std::move(c), p.scale());
}

Point insertDim(const Point& p, std::size_t i, Coord v) {
  std::vector<Coord> c = p.coords();
  c.insert(c.begin() + static_cast<std::ptrdiff_t>(i), v);
  return Point(std::move(c), p.scale());
}

std::optional<Coord> SurfaceTable::at(const Point& rest) const {
  auto it = values.find(rest);
  if (it == values.end()) return std::nullopt;
  return it->second;
}

SurfaceTable surface(const DmacOracle& f, std::size_t i) {
  auto g = f.clone();
  const Grid& grid = g->grid();
  SurfaceTable table;
  table.dim = i;
  Point lo = grid.lower(), hi = grid.upper();
  hi[i] = lo[i];
  Grid base(lo, hi);
  base.forEach([&](const Point& x0) {
    std::optional<Coord> found;
    int count = 0;
    for (Coord a = grid.lower()[i]; a <= grid.upper()[i]; ++a) {
      Point x = x0.with(i, a);
      if (g->query(x)[i] == a) {
        ++count;
        found = a;
      }
    }
    if (count != 1) {
      found.reset();
      ++table.nonUnique;
    }
    table.values.emplace(dropDim(x0, i), found);
  });
  return table;
}

SurfaceReport checkSurfaceTheorem(const DmacOracle& f, Coord budget) {
  auto g = f.clone();
  checkBudget(g->grid(), budget);
  const Grid& grid = g->grid();
  const std::size_t d = grid.dim();
  SurfaceReport rep;
  rep.oneDRational = true;
  rep.monotone = true;
  rep.gradientOne = true;

  std::vector<SurfaceTable> tables;
  for (std::size_t i = 0; i < d; ++i) tables.push_back(surface(*g, i));

  grid.forEach([&](const Point& x) {
    const Point fx = g->query(x);
    for (std::size_t i = 0; i < d; ++i) {
      auto s = tables[i].at(dropDim(x, i));
      if (!s) {
        rep.oneDRational = false;
        continue;
      }
      if (x[i] < *s && !(fx[i] > x[i])) rep.oneDRational = false;
      if (x[i] > *s && !(fx[i] < x[i])) rep.oneDRational = false;
    }
  });

  // Surface monotonicity follows from unit steps and the gradient bound from
  // king-move neighbours, so neighbouring pairs of G_{-i} suffice.
  for (std::size_t i = 0; i < d; ++i) {
    const auto& vals = tables[i].values;
    for (const auto& [p, sp] : vals) {
      if (!sp) continue;
      Grid box = Grid::cube(p.dim(), -1, 1, p.scale());
      box.forEach([&](const Point& o) {
        Point q = p + o;
        auto it = vals.find(q);
        if (it == vals.end() || !it->second) return;
        const Coord sq = *it->second;
        if (p.leq(q) && *sp > sq) rep.monotone = false;
        if (std::abs(*sp - sq) > infNorm(p, q)) rep.gradientOne = false;
      });
    }
  }

  BruteForceOptions opts;
  opts.budget = budget;
  rep.violationFree = !bruteForceSolve(*g, opts).violation.has_value();
  rep.biconditionalHolds =
      rep.violationFree == (rep.oneDRational && rep.monotone && rep.gradientOne);
  return rep;
}

std::pair<std::optional<Coord>, std::optional<Coord>> heights(const DmacOracle& f,
                                                              const Slice& slice,
                                                              const Point& x) {
  auto g = f.clone();
  const auto free = slice.freeDims();
  if (free.size() != 2) throw std::invalid_argument("heights requires a two-dimensional slice");
  auto hei = [&](std::size_t i) -> std::optional<Coord> {
    for (Coord k = 0; x[i] + k <= g->grid().upper()[i]; ++k) {
      Point y = x.shifted(i, k);
      if (g->query(y)[i] < x[i] + k) return k;
    }
    return std::nullopt;
  };
  return {hei(free[0]), hei(free[1])};
}

std::vector<CriticalBox> enumerateCriticalBoxes(const DmacOracle& f, const Slice& slice,
                                                bool upset) {
  if (f.dim() != 3 || slice.numFree() != 2)
    throw std::invalid_argument("critical boxes need a 2D slice of a 3D instance");
  OraclePtr g = f.clone();
  Slice s = slice;
  if (!upset) {
    g = flipOracle(g);
    std::vector<std::optional<Coord>> pat(3);
    for (std::size_t k = 0; k < 3; ++k)
      if (auto v = slice.fixedAt(k)) pat[k] = g->grid().flip(Point::zeros(3, g->grid().scale()).with(k, *v))[k];
    s = Slice(pat);
  }
  const auto free = s.freeDims();
  const std::size_t a = free[0], b = free[1];
  std::size_t c = 0;
  while (c == a || c == b) ++c;
  const Grid& grid = g->grid();
  const Grid sub = s.restrict(grid);

  // Direction of dimension i at p, with points past the grid treated as
  // moving strictly back inside.
  auto dirAt = [&](const Point& p, std::size_t i) -> int {
    if (!grid.contains(p)) return p[i] > grid.upper()[i] ? -1 : 1;
    return g->direction(p, i);
  };

  std::vector<CriticalBox> out;
  sub.forEach([&](const Point& x) {
    if (!inUpSet(*g, x)) return;
    const bool onLowBoundary = x[a] == grid.lower()[a] || x[b] == grid.lower()[b];
    if (!onLowBoundary) {
      Point diag = x.shifted(a, -1).shifted(b, -1);
      if (!(g->query(diag)[c] < x[c])) return;
    }
    std::vector<Coord> ws, hs;
    for (Coord w = 0; x[a] + w <= grid.upper()[a]; ++w)
      if (dirAt(x.shifted(a, w), a) >= 0 && dirAt(x.shifted(a, w + 1), a) < 0) ws.push_back(w);
    for (Coord h = 0; x[b] + h <= grid.upper()[b]; ++h)
      if (dirAt(x.shifted(b, h), b) >= 0 && dirAt(x.shifted(b, h + 1), b) < 0) hs.push_back(h);
    for (Coord w : ws)
      for (Coord h : hs) {
        CriticalBox box;
        box.x = upset ? x : grid.flip(x);
        box.h = h;
        box.w = w;
        box.containedInSet = true;
        for (Coord i = 0; i <= w && box.containedInSet; ++i)
          for (Coord j = 0; j <= h; ++j)
            if (!inUpSet(*g, x.shifted(a, i).shifted(b, j))) {
              box.containedInSet = false;
              break;
            }
        out.push_back(std::move(box));
      }
  });
  return out;
}

bool inUpSet(DmacOracle& f, const Point& x) { return x.leq(f.query(x)); }

bool inDownSet(DmacOracle& f, const Point& x) { return f.query(x).leq(x); }

Point kleeneLeastFixedPoint(DmacOracle& f) {
  Point x = f.grid().lower();
  while (true) {
    Point y = f.query(x);
    if (y == x) return x;
    if (!x.leq(y)) throw PromiseViolation("Kleene iteration failed to ascend at " + x.str());
    x = y;
  }
}

}  // namespace dmac
