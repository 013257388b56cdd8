#include "dmac/core.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace dmac {

Point::Point(std::vector<Coord> coords, int scale) : c_(std::move(coords)), scale_(scale) {
  if (scale_ <= 0) throw std::invalid_argument("Point scale must be positive");
}

Point::Point(std::initializer_list<Coord> coords) : c_(coords), scale_(1) {}

Point Point::zeros(std::size_t dim, int scale) { return Point(std::vector<Coord>(dim, 0), scale); }

Point Point::filled(std::size_t dim, Coord v, int scale) {
  return Point(std::vector<Coord>(dim, v), scale);
}

Point Point::unit(std::size_t dim, std::size_t i, int scale) {
  Point p = zeros(dim, scale);
  p.c_.at(i) = 1;
  return p;
}

void Point::checkCompatible(const Point& o) const {
  if (c_.size() != o.c_.size()) throw std::invalid_argument("Point dimension mismatch");
  if (scale_ != o.scale_) throw std::invalid_argument("Point scale mismatch");
}

bool Point::leq(const Point& o) const {
  checkCompatible(o);
  for (std::size_t i = 0; i < c_.size(); ++i)
    if (c_[i] > o.c_[i]) return false;
  return true;
}

Point Point::operator+(const Point& o) const {
  Point r = *this;
  r += o;
  return r;
}

Point Point::operator-(const Point& o) const {
  Point r = *this;
  r -= o;
  return r;
}

Point& Point::operator+=(const Point& o) {
  checkCompatible(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Point& Point::operator-=(const Point& o) {
  checkCompatible(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Point Point::with(std::size_t i, Coord v) const {
  Point r = *this;
  r.c_.at(i) = v;
  return r;
}

Point Point::shifted(std::size_t i, Coord delta) const {
  Point r = *this;
  r.c_.at(i) += delta;
  return r;
}

Point Point::concat(const Point& o) const {
  if (scale_ != o.scale_) throw std::invalid_argument("Point scale mismatch");
  std::vector<Coord> c = c_;
  c.insert(c.end(), o.c_.begin(), o.c_.end());
  return Point(std::move(c), scale_);
}

Point Point::sub(std::size_t from, std::size_t len) const {
  if (from + len > c_.size()) throw std::out_of_range("Point::sub out of range");
  return Point(std::vector<Coord>(c_.begin() + static_cast<std::ptrdiff_t>(from),
                                  c_.begin() + static_cast<std::ptrdiff_t>(from + len)),
               scale_);
}

bool operator<(const Point& a, const Point& b) {
  if (a.scale_ != b.scale_) return a.scale_ < b.scale_;
  return a.c_ < b.c_;
}

std::string Point::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i) os << ',';
    os << c_[i];
  }
  os << ')';
  if (scale_ != 1) os << '/' << scale_;
  return os.str();
}

std::size_t PointHash::operator()(const Point& p) const noexcept {
  std::size_t h = static_cast<std::size_t>(p.scale()) * 0x9e3779b97f4a7c15ULL;
  for (Coord c : p.coords()) {
    h ^= std::hash<Coord>{}(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Coord infNorm(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("Point dimension mismatch");
  if (a.scale() != b.scale()) throw std::invalid_argument("Point scale mismatch");
  Coord m = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, a[i] > b[i] ? a[i] - b[i] : b[i] - a[i]);
  return m;
}

Point meet(const Point& a, const Point& b) {
  if (a.dim() != b.dim() || a.scale() != b.scale())
    throw std::invalid_argument("Point dimension or scale mismatch");
  Point r = a;
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] = std::min(a[i], b[i]);
  return r;
}

Point join(const Point& a, const Point& b) {
  if (a.dim() != b.dim() || a.scale() != b.scale())
    throw std::invalid_argument("Point dimension or scale mismatch");
  Point r = a;
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

Grid::Grid(Point lower, Point upper) : lo_(std::move(lower)), hi_(std::move(upper)) {
  if (!lo_.leq(hi_)) throw std::invalid_argument("Grid lower bound exceeds upper bound");
}

Grid Grid::cube(std::size_t dim, Coord lo, Coord hi, int scale) {
  return Grid(Point::filled(dim, lo, scale), Point::filled(dim, hi, scale));
}

bool Grid::contains(const Point& p) const {
  if (p.dim() != dim() || p.scale() != scale()) return false;
  return lo_.leq(p) && p.leq(hi_);
}

Coord Grid::size() const {
  Coord total = 1;
  for (std::size_t i = 0; i < dim(); ++i) {
    Coord e = extent(i);
    if (total > std::numeric_limits<Coord>::max() / e) return std::numeric_limits<Coord>::max();
    total *= e;
  }
  return total;
}

Point Grid::clamp(const Point& p) const {
  Point r = p;
  for (std::size_t i = 0; i < dim(); ++i) r[i] = std::clamp(p[i], lo_[i], hi_[i]);
  return r;
}

Point Grid::flip(const Point& p) const {
  Point r = p;
  for (std::size_t i = 0; i < dim(); ++i) r[i] = lo_[i] + hi_[i] - p[i];
  return r;
}

void Grid::forEach(const std::function<void(const Point&)>& visit) const {
  const std::size_t d = dim();
  if (d == 0) {
    visit(lo_);
    return;
  }
  Point p = lo_;
  while (true) {
    visit(p);
    std::size_t k = d;
    while (k > 0) {
      --k;
      if (p[k] < hi_[k]) {
        ++p[k];
        break;
      }
      p[k] = lo_[k];
      if (k == 0) return;
    }
  }
}

DmacOracle::DmacOracle(Grid grid, Eval eval, bool unitDisplacement)
    : grid_(std::move(grid)), eval_(std::move(eval)), unit_(unitDisplacement) {}

OraclePtr DmacOracle::make(Grid grid, Eval eval, bool unitDisplacement) {
  return std::make_shared<DmacOracle>(std::move(grid), std::move(eval), unitDisplacement);
}

Point DmacOracle::query(const Point& x) {
  if (!grid_.contains(x)) throw std::invalid_argument("query point " + x.str() + " outside grid");
  if (memoize_) {
    auto it = memo_.find(x);
    if (it != memo_.end()) return it->second;
  }
  Point y = eval_(x);
  ++count_;
  if (!grid_.contains(y))
    throw OracleError("f" + x.str() + " = " + y.str() + " lies outside the grid");
  if (unit_ && infNorm(x, y) > 1)
    throw OracleError("displacement at " + x.str() + " exceeds one lattice step");
  if (memoize_) memo_.emplace(x, y);
  return y;
}

int DmacOracle::direction(const Point& x, std::size_t i) { return sgn(query(x)[i] - x[i]); }

void DmacOracle::setMemoize(bool on) {
  memoize_ = on;
  if (!on) memo_.clear();
}

OraclePtr DmacOracle::clone() const {
  auto c = std::make_shared<DmacOracle>(grid_, eval_, unit_);
  c->memoize_ = memoize_;
  return c;
}

OraclePtr flipOracle(const OraclePtr& f) {
  const Grid g = f->grid();
  return DmacOracle::make(
      g, [f, g](const Point& x) { return g.flip(f->query(g.flip(x))); }, f->unitDisplacement());
}

std::string Solution::str() const {
  switch (kind) {
    case Kind::FixedPoint:
      return "FixedPoint" + x.str();
    case Kind::MonoViolation:
      return "MonoViolation" + x.str() + y.str();
    case Kind::NonExpViolation:
      return "NonExpViolation" + x.str() + y.str();
  }
  return "?";
}

std::optional<Solution> classifyPair(DmacOracle& f, const Point& x, const Point& y) {
  const Point fx = f.query(x);
  const Point fy = f.query(y);
  if (x.leq(y) && !fx.leq(fy)) return Solution::mono(x, y);
  if (y.leq(x) && !fy.leq(fx)) return Solution::mono(y, x);
  if (infNorm(fx, fy) > infNorm(x, y)) return Solution::nonExp(x, y);
  return std::nullopt;
}

bool isValidSolution(DmacOracle& f, const Solution& s) {
  if (!f.grid().contains(s.x)) return false;
  if (s.isFixedPoint()) return f.query(s.x) == s.x;
  if (!f.grid().contains(s.y)) return false;
  const Point fx = f.query(s.x);
  const Point fy = f.query(s.y);
  if (s.kind == Solution::Kind::MonoViolation)
    return (s.x.leq(s.y) && !fx.leq(fy)) || (s.y.leq(s.x) && !fy.leq(fx));
  return infNorm(fx, fy) > infNorm(s.x, s.y);
}

Slice::Slice(std::vector<std::optional<Coord>> pattern) : pattern_(std::move(pattern)) {}

Slice Slice::prefixFree(const Point& x, std::size_t i) {
  std::vector<std::optional<Coord>> p(x.dim());
  for (std::size_t k = i; k < x.dim(); ++k) p[k] = x[k];
  return Slice(std::move(p));
}

Slice Slice::full(std::size_t dim) { return Slice(std::vector<std::optional<Coord>>(dim)); }

std::vector<std::size_t> Slice::freeDims() const {
  std::vector<std::size_t> r;
  for (std::size_t k = 0; k < pattern_.size(); ++k)
    if (!pattern_[k]) r.push_back(k);
  return r;
}

std::size_t Slice::numFree() const {
  return static_cast<std::size_t>(
      std::count_if(pattern_.begin(), pattern_.end(), [](const auto& v) { return !v; }));
}

bool Slice::contains(const Point& p) const {
  if (p.dim() != pattern_.size()) return false;
  for (std::size_t k = 0; k < p.dim(); ++k)
    if (pattern_[k] && *pattern_[k] != p[k]) return false;
  return true;
}

Grid Slice::restrict(const Grid& g) const {
  Point lo = g.lower(), hi = g.upper();
  for (std::size_t k = 0; k < pattern_.size(); ++k) {
    if (pattern_[k]) {
      lo[k] = *pattern_[k];
      hi[k] = *pattern_[k];
    }
  }
  return Grid(lo, hi);
}

bool coneEliminates(ConeKind kind, std::size_t i, const Point& anchor, Strictness,
                    const Point& p) {
  if (anchor.dim() != p.dim() || anchor.scale() != p.scale())
    throw std::invalid_argument("Point dimension or scale mismatch");
  switch (kind) {
    case ConeKind::Up:
    case ConeKind::Down: {
      const Coord rise = kind == ConeKind::Up ? p[i] - anchor[i] : anchor[i] - p[i];
      for (std::size_t j = 0; j < p.dim(); ++j) {
        if (j == i) continue;
        const Coord off = p[j] > anchor[j] ? p[j] - anchor[j] : anchor[j] - p[j];
        if (rise < off) return false;
      }
      return rise >= 0;
    }
    case ConeKind::MonotoneBelow:
      return p[i] == anchor[i] && p.leq(anchor);
    case ConeKind::MonotoneAbove:
      return p[i] == anchor[i] && anchor.leq(p);
  }
  return false;
}

}  // namespace dmac
