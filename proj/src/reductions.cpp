#include "dmac/reductions.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace dmac {

// ---------------------------------------------------------------------------
// Rational helpers

namespace {

/// A base-10 integer with an optional leading sign. Leading zeros are
/// stripped so the text is never read as octal.
boost::multiprecision::cpp_int parseDecimalInteger(const std::string& s, const std::string& text) {
  std::size_t pos = 0;
  bool neg = false;
  if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) neg = s[pos++] == '-';
  if (pos == s.size()) throw std::invalid_argument("malformed rational '" + text + "'");
  for (std::size_t k = pos; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k])))
      throw std::invalid_argument("malformed rational '" + text + "'");
  while (pos + 1 < s.size() && s[pos] == '0') ++pos;
  boost::multiprecision::cpp_int v(s.substr(pos));
  return neg ? boost::multiprecision::cpp_int(-v) : v;
}

}  // namespace

Rational parseRational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    const boost::multiprecision::cpp_int num = parseDecimalInteger(s.substr(0, slash), text);
    const boost::multiprecision::cpp_int den = parseDecimalInteger(s.substr(slash + 1), text);
    if (den == 0) throw std::invalid_argument("zero denominator in " + text);
    return Rational(num, den);
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    const bool neg = s[0] == '-';
    const std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    std::string intPart = s.substr(start, dot - start);
    const std::string frac = s.substr(dot + 1);
    if (intPart.empty() && frac.empty()) throw std::invalid_argument("malformed rational '" + text + "'");
    if (intPart.empty()) intPart = "0";
    const boost::multiprecision::cpp_int num = parseDecimalInteger(intPart + frac, text);
    const boost::multiprecision::cpp_int den = boost::multiprecision::pow(
        boost::multiprecision::cpp_int(10), static_cast<unsigned>(frac.size()));
    const Rational r(num, den);
    return neg ? Rational(-r) : r;
  }
  return Rational(parseDecimalInteger(s, text));
}

std::string rationalToString(const Rational& r) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(r);
  if (boost::multiprecision::denominator(r) != 1) os << '/' << boost::multiprecision::denominator(r);
  return os.str();
}

double toDouble(const Rational& r) { return r.convert_to<double>(); }

Rational infNorm(const RVec& a, const RVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
  Rational m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Rational d = a[i] - b[i];
    if (d < 0) d = -d;
    if (d > m) m = d;
  }
  return m;
}

bool isValidContinuousSolution(const ContinuousOracle& g, const ContinuousSolution& s) {
  switch (s.kind) {
    case ContinuousSolution::Kind::ApproxFixedPoint:
      return infNorm(g.eval(s.x), s.x) <= g.eps;
    case ContinuousSolution::Kind::MonoViolation: {
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (s.x[i] > s.y[i]) return false;
      RVec gx = g.eval(s.x), gy = g.eval(s.y);
      for (std::size_t i = 0; i < gx.size(); ++i)
        if (gx[i] > gy[i]) return true;
      return false;
    }
    case ContinuousSolution::Kind::ContractionViolation:
      return infNorm(g.eval(s.x), g.eval(s.y)) > g.lambda * infNorm(s.x, s.y);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Generic helpers

namespace {

/// Return the first violating pair of f among all pairs drawn from pts.
Solution firstViolation(DmacOracle& f, const std::vector<Point>& pts) {
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      if (!f.grid().contains(pts[a]) || !f.grid().contains(pts[b]) || pts[a] == pts[b]) continue;
      if (auto v = classifyPair(f, pts[a], pts[b])) return *v;
    }
  throw NotAViolation("no violation of the input among the derived candidate pairs");
}

Solution mapFixedPointIdentity(DmacOracle& f, const Solution& s) {
  if (f.query(s.x) != s.x) throw NotAViolation("claimed fixed point " + s.x.str() + " is not fixed");
  return s;
}

}  // namespace

ReductionResult compose(const ReductionResult& r1,
                        const std::function<ReductionResult(const OraclePtr&)>& r2) {
  ReductionResult second = r2(r1.oracle);
  auto m1 = r1.mapBack;
  auto m2 = second.mapBack;
  return {second.oracle, [m1, m2](const Solution& s) { return m1(m2(s)); }};
}

// ---------------------------------------------------------------------------
// MonotoneContraction to DMAC

RVec scaleToUnit(const Point& y, const Rational& epsHat) {
  RVec r(y.dim());
  for (std::size_t i = 0; i < y.dim(); ++i) r[i] = epsHat * Rational(y[i]);
  return r;
}

McReduction mcToDmac(const ContinuousOracle& g) {
  if (g.eps <= 0 || g.eps >= 1) throw std::invalid_argument("ε must lie in (0,1)");
  using boost::multiprecision::cpp_int;
  Rational inv = 1 / g.eps;
  cpp_int n = boost::multiprecision::numerator(inv) / boost::multiprecision::denominator(inv);
  if (Rational(n) < inv) n += 1;
  McReduction r;
  r.n = static_cast<Coord>(n);
  r.epsHat = Rational(cpp_int(1), n);
  const Rational eh = r.epsHat;
  const std::size_t d = g.d;
  auto eval = g.eval;
  auto evalChecked = [eval, d](const RVec& x) {
    RVec gx = eval(x);
    if (gx.size() != d) throw OracleError("continuous oracle returned wrong dimension");
    for (const auto& v : gx)
      if (v < 0 || v > 1) throw OracleError("continuous oracle left [0,1]^d");
    return gx;
  };
  r.oracle = DmacOracle::make(
      Grid::cube(d, 0, r.n),
      [evalChecked, eh](const Point& y) {
        RVec yh = scaleToUnit(y, eh);
        RVec gy = evalChecked(yh);
        Point out = y;
        for (std::size_t i = 0; i < y.dim(); ++i) {
          Rational disp = gy[i] - yh[i];
          if (disp >= eh)
            out[i] += 1;
          else if (disp <= -eh)
            out[i] -= 1;
        }
        return out;
      },
      true);
  OraclePtr f = r.oracle;
  r.mapBack = [f, eh, evalChecked](const Solution& s) {
    ContinuousSolution c;
    c.x = scaleToUnit(s.x, eh);
    switch (s.kind) {
      case Solution::Kind::FixedPoint:
        if (f->query(s.x) != s.x) throw NotAViolation("claimed fixed point is not fixed");
        c.kind = ContinuousSolution::Kind::ApproxFixedPoint;
        return c;
      case Solution::Kind::MonoViolation: {
        Point a = s.x, b = s.y;
        if (!a.leq(b)) std::swap(a, b);
        if (!a.leq(b) || f->query(a).leq(f->query(b)))
          throw NotAViolation("pair is not a monotonicity violation");
        c.kind = ContinuousSolution::Kind::MonoViolation;
        c.x = scaleToUnit(a, eh);
        c.y = scaleToUnit(b, eh);
        return c;
      }
      case Solution::Kind::NonExpViolation:
        if (infNorm(f->query(s.x), f->query(s.y)) <= infNorm(s.x, s.y))
          throw NotAViolation("pair is not a non-expansion violation");
        c.kind = ContinuousSolution::Kind::ContractionViolation;
        c.y = scaleToUnit(s.y, eh);
        return c;
    }
    return c;
  };
  return r;
}

// ---------------------------------------------------------------------------
// Unit displacement and 1D uniqueness

ReductionResult clampUnitDisplacement(const OraclePtr& f) {
  auto g = DmacOracle::make(
      f->grid(),
      [f](const Point& x) {
        Point fx = f->query(x);
        Point out = x;
        for (std::size_t i = 0; i < x.dim(); ++i) out[i] += sgn(fx[i] - x[i]);
        return out;
      },
      true);
  return {g, [f](const Solution& s) {
            if (s.isFixedPoint()) return mapFixedPointIdentity(*f, s);
            if (auto v = classifyPair(*f, s.x, s.y)) return *v;
            throw NotAViolation("pair is not a violation of the input");
          }};
}

ReductionResult make1DUnique(const OraclePtr& f) {
  const Grid grid = f->grid();
  auto g = DmacOracle::make(
      grid,
      [f, grid](const Point& x) {
        Point fx = f->query(x);
        Point out = fx;
        for (std::size_t i = 0; i < x.dim(); ++i) {
          if (fx[i] != x[i] || x[i] <= grid.lower()[i]) continue;
          Point below = x.shifted(i, -1);
          if (f->query(below)[i] == below[i]) out[i] = x[i] - 1;
        }
        return out;
      },
      true);
  return {g, [f](const Solution& s) {
            if (s.isFixedPoint()) return mapFixedPointIdentity(*f, s);
            std::vector<Point> pts{s.x, s.y};
            for (std::size_t k = 0; k < s.x.dim(); ++k) {
              pts.push_back(s.x.shifted(k, -1));
              pts.push_back(s.y.shifted(k, -1));
            }
            return firstViolation(*f, pts);
          }};
}

// ---------------------------------------------------------------------------
// Boundary handling

ReductionResult forceBoundaryInward(const OraclePtr& f) {
  const Grid inner = f->grid();
  const std::size_t d = inner.dim();
  Point lo = inner.lower(), hi = inner.upper();
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] -= 1;
    hi[i] += 1;
  }
  auto g = DmacOracle::make(
      Grid(lo, hi),
      [f, inner](const Point& x) {
        Point px = inner.clamp(x);
        Point fx = f->query(px);
        Point out = fx;
        for (std::size_t i = 0; i < x.dim(); ++i) {
          if (x[i] < inner.lower()[i])
            out[i] = inner.lower()[i];
          else if (x[i] > inner.upper()[i])
            out[i] = inner.upper()[i];
        }
        return out;
      },
      f->unitDisplacement());
  return {g, [f, inner](const Solution& s) {
            if (s.isFixedPoint()) return mapFixedPointIdentity(*f, s);
            return firstViolation(*f, {inner.clamp(s.x), inner.clamp(s.y)});
          }};
}

OraclePtr reflectOracle(const OraclePtr& f, const Point& center) {
  const Grid& g = f->grid();
  Grid rg(center - g.upper(), center - g.lower());
  return DmacOracle::make(
      rg, [f, center](const Point& x) { return center - f->query(center - x); },
      f->unitDisplacement());
}

namespace {

void require3d(const DmacOracle& f) {
  if (f.dim() != 3) throw std::invalid_argument("operation requires a 3D instance");
}

Solution mapExtendedBack(DmacOracle& f, const Grid& inner, const Solution& s) {
  if (s.isFixedPoint()) {
    if (!inner.contains(s.x)) throw NotAViolation("fixed point lies in the extension");
    return mapFixedPointIdentity(f, s);
  }
  // Extension layers copy the base layer, so a violation there comes from
  // the base layer near the projected pair.
  std::vector<Point> pts{inner.clamp(s.x), inner.clamp(s.y)};
  for (const Point& p : {s.x, s.y}) {
    const Point q = inner.clamp(p);
    for (Coord a = -1; a <= 1; ++a)
      for (Coord b = -1; b <= 1; ++b)
        for (Coord c = 0; c <= 1; ++c) pts.push_back(inner.clamp(q + Point(std::vector<Coord>{a, b, c}, q.scale())));
  }
  return firstViolation(f, pts);
}

}  // namespace

ReductionResult extendBelow3d(const OraclePtr& f, std::size_t projDim) {
  require3d(*f);
  if (projDim > 1) throw std::invalid_argument("projection dimension must be 0 or 1");
  const Grid inner = f->grid();
  const std::size_t other = 1 - projDim;
  const Coord K = inner.extent(projDim);
  const Coord lo3 = inner.lower()[2];
  Point lo = inner.lower();
  lo[2] -= K;
  auto g = DmacOracle::make(
      Grid(lo, inner.upper()),
      [f, inner, projDim, other, lo3](const Point& x) {
        if (x[2] >= lo3) return f->query(x);
        Point out = x;
        out[2] = x[2] + 1;
        const Point base = x.with(2, lo3);
        const Point fb = f->query(base);
        out[other] = x[other] + (fb[other] - base[other]);
        // The projDim surface on layer lo3 - k is max(lo, min(s, hi + 1 - k))
        // with s the surface on layer lo3. It is monotone and 1-Lipschitz in
        // the l-infinity sense and sits at lo on the bottom layer.
        const Coord k = lo3 - x[2];
        const Coord cap = inner.upper()[projDim] + 1 - k;
        const Coord lowP = inner.lower()[projDim];
        const int baseDir = sgn(fb[projDim] - x[projDim]);
        int dir;
        if (x[projDim] > cap)
          dir = -1;
        else if (x[projDim] == cap)
          dir = std::min(baseDir, 0);
        else
          dir = baseDir;
        out[projDim] = std::max(x[projDim] + dir, lowP);
        return out;
      },
      f->unitDisplacement());
  return {g, [f, inner](const Solution& s) { return mapExtendedBack(*f, inner, s); }};
}

ReductionResult extendAbove3d(const OraclePtr& f, std::size_t projDim) {
  const Grid inner = f->grid();
  const Point center = inner.lower() + inner.upper();
  OraclePtr flipped = reflectOracle(f, center);
  ReductionResult below = extendBelow3d(flipped, projDim);
  OraclePtr g = reflectOracle(below.oracle, center);
  auto mb = below.mapBack;
  return {g, [mb, center](const Solution& s) {
            Solution t = s;
            t.x = center - s.x;
            if (!s.isFixedPoint()) t.y = center - s.y;
            Solution r = mb(t);
            r.x = center - r.x;
            if (!r.isFixedPoint()) r.y = center - r.y;
            return r;
          }};
}

ReductionResult upDownBoundaryPreprocess3d(const OraclePtr& f) {
  require3d(*f);
  ReductionResult r = extendBelow3d(f, 0);
  r = compose(r, [](const OraclePtr& g) { return extendBelow3d(g, 1); });
  r = compose(r, [](const OraclePtr& g) { return extendAbove3d(g, 0); });
  r = compose(r, [](const OraclePtr& g) { return extendAbove3d(g, 1); });
  return r;
}

// ---------------------------------------------------------------------------
// Unique fixed point via interpolation on a refined grid

namespace {

Coord floorDiv(Coord a, Coord b) {
  Coord q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Sign of the interpolated surface of dimension i relative to the refined
/// point z, where z has the given scale and f lives on the unit grid.
int interpolatedSign(DmacOracle& f, const Point& z, std::size_t i, Coord S) {
  const std::size_t d = z.dim();
  const Grid& g = f.grid();
  Point p = Point::zeros(d);
  for (std::size_t l = 0; l < d; ++l) p[l] = floorDiv(z[l], S);
  std::vector<std::size_t> spread;
  for (std::size_t l = 0; l < d; ++l)
    if (l != i && z[l] != S * p[l]) spread.push_back(l);
  Coord best = std::numeric_limits<Coord>::min();
  const std::size_t corners = std::size_t{1} << spread.size();
  for (std::size_t mask = 0; mask < corners; ++mask) {
    Point c = p;
    for (std::size_t b = 0; b < spread.size(); ++b)
      if (mask & (std::size_t{1} << b)) c[spread[b]] += 1;
    int dir = f.direction(c, i);
    Coord V;
    if (dir < 0) {
      V = -S;
    } else if (dir == 0) {
      V = 0;
    } else {
      Point up = c.shifted(i, 1);
      int dir2 = g.contains(up) ? f.direction(up, i) : 0;
      if (dir2 > 0)
        V = 2 * S;
      else if (dir2 == 0)
        V = S;
      else
        throw PromiseViolation("one-dimensional slice through " + c.str() + " has no fixed height");
    }
    Coord penalty = 0;
    for (std::size_t l : spread) penalty = std::max(penalty, S * c[l] - z[l]);
    best = std::max(best, V - penalty);
  }
  return sgn(best - (z[i] - S * p[i]));
}

ReductionResult enforceUnique(const OraclePtr& f, Coord S, const std::vector<Coord>& shift) {
  const Grid inner = f->grid();
  const std::size_t d = inner.dim();
  Point flo = Point::zeros(d, static_cast<int>(S)), fhi = Point::zeros(d, static_cast<int>(S));
  for (std::size_t l = 0; l < d; ++l) {
    flo[l] = S * inner.lower()[l];
    fhi[l] = S * inner.upper()[l];
  }
  const Grid quarter(flo, fhi);
  auto g = DmacOracle::make(
      quarter,
      [f, quarter, shift, S](const Point& z) {
        Point out = z;
        for (std::size_t i = 0; i < z.dim(); ++i) {
          Point zs = z.shifted(i, shift[i]);
          int h;
          if (!quarter.contains(zs)) {
            h = -1;
          } else {
            Point unit(zs.coords(), 1);
            h = interpolatedSign(*f, unit, i, S);
          }
          out[i] = std::clamp(z[i] + h, quarter.lower()[i], quarter.upper()[i]);
        }
        return out;
      },
      true);
  const Coord window = S + S / 2;
  return {g, [f, S, window, d](const Solution& s) {
            if (!s.isFixedPoint())
              throw PromiseViolation("violation of the uniqueness instance has no preimage");
            Point lo = Point::zeros(d), hi = Point::zeros(d);
            for (std::size_t l = 0; l < d; ++l) {
              lo[l] = -floorDiv(-s.x[l], S);
              hi[l] = floorDiv(s.x[l] + window, S);
            }
            std::optional<Point> best;
            Grid(lo, hi).forEach([&](const Point& y) {
              if (!f->grid().contains(y) || f->query(y) != y) return;
              if (!best || y.leq(*best) || (!best->leq(y) && y < *best)) best = y;
            });
            if (!best) throw PromiseViolation("no fixed point near " + s.x.str());
            return Solution::fixedPoint(*best);
          }};
}

}  // namespace

int interpolatedDirection(DmacOracle& f, const Point& z, std::size_t i) {
  return interpolatedSign(f, Point(z.coords(), 1), i, 4);
}

ReductionResult enforceUniqueFixedPoint3d(const OraclePtr& f) {
  require3d(*f);
  return enforceUnique(f, 4, {0, 1, 2});
}

ReductionResult enforceUniqueFixedPoint2d(const OraclePtr& f) {
  if (f->dim() != 2) throw std::invalid_argument("operation requires a 2D instance");
  return enforceUnique(f, 2, {0, 1});
}

ReductionResult preprocess3d(const OraclePtr& f, bool lfpMode) {
  require3d(*f);
  ReductionResult r = clampUnitDisplacement(f);
  r = compose(r, make1DUnique);
  r = compose(r, forceBoundaryInward);
  if (lfpMode) r = compose(r, enforceUniqueFixedPoint3d);
  r = compose(r, upDownBoundaryPreprocess3d);
  return r;
}

}  // namespace dmac
