#include "dmac/verification.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

namespace dmac {

LesserFixpointResult findLesserFixpoint(DmacOracle& f, const Slice& slice, const Point& x) {
  const Grid& g = f.grid();
  const std::vector<std::size_t> free = slice.freeDims();
  Point y = x;
  for (std::size_t m : free) y[m] = std::max(x[m] - 1, g.lower()[m]);
  LesserFixpointResult out;
  out.sequence.points.push_back(y);
  for (;;) {
    if (y == x) {
      out.point = x;
      out.verified = true;
      return out;
    }
    const Point fy = f.query(y);
    std::optional<std::size_t> step;
    for (std::size_t m : free) {
      if (y[m] < x[m] && fy[m] > y[m]) {
        step = m;
        break;
      }
    }
    if (!step) {
      out.point = y;
      return out;
    }
    y[*step] += 1;
    out.sequence.points.push_back(y);
    out.sequence.dims.push_back(*step);
  }
}

bool isLfp(DmacOracle& f, const Point& x, std::size_t i) {
  if (i == 0) return true;
  if (i > x.dim()) throw std::invalid_argument("isLfp: slice has more free dimensions than the point");
  return findLesserFixpoint(f, Slice::prefixFree(x, i), x).verified;
}

Direction opdcDirection(DmacOracle& f, const Point& x, std::size_t i) {
  const Point fx = f.query(x);
  const Coord h = fx[i] - x[i];
  if (h > 0) return Direction::Up;
  if (h < 0) return Direction::Down;
  return isLfp(f, x, i + 1) ? Direction::Zero : Direction::Down;
}

namespace {

/// Pairs proposed by the case analysis, checked in order, followed by every
/// pair of the pool as a last resort.
class Candidates {
 public:
  explicit Candidates(DmacOracle& f) : f_(f) {}

  void propose(const Point& a, const Point& b) { proposed_.emplace_back(a, b); }
  void pool(const Point& p) { pool_.push_back(p); }
  void pool(const std::vector<Point>& ps) { pool_.insert(pool_.end(), ps.begin(), ps.end()); }

  std::optional<Solution> resolve() const {
    for (const auto& [a, b] : proposed_)
      if (auto s = classifyPair(f_, a, b)) return s;
    for (std::size_t p = 0; p < pool_.size(); ++p)
      for (std::size_t q = p + 1; q < pool_.size(); ++q)
        if (auto s = classifyPair(f_, pool_[p], pool_[q])) return s;
    return std::nullopt;
  }

 private:
  DmacOracle& f_;
  std::vector<std::pair<Point, Point>> proposed_;
  std::vector<Point> pool_;
};

bool fixedOn(DmacOracle& f, const Point& x, const std::vector<std::size_t>& dims) {
  const Point fx = f.query(x);
  return std::all_of(dims.begin(), dims.end(), [&](std::size_t m) { return fx[m] == x[m]; });
}

/// The index of the first step of a verification sequence in dimension j.
std::optional<std::size_t> stepIn(const VerificationSequence& seq, std::size_t j) {
  for (std::size_t l = 0; l < seq.dims.size(); ++l)
    if (seq.dims[l] == j) return l;
  return std::nullopt;
}

/// x is a verified least fixed point of slice, y < x, and f does not move y
/// up in any free dimension of slice.
void comparableCase(DmacOracle& f, const Slice& slice, const Point& x, const Point& y,
                    Candidates& cand) {
  const VerificationSequence seq = findLesserFixpoint(f, slice, x).sequence;
  cand.pool(seq.points);
  const Point& v0 = seq.points.front();
  if (v0.leq(y)) {
    // y lies in the cube below x: the last sequence point below y moved up
    // in a dimension where y does not.
    for (std::size_t l = 0; l + 1 < seq.points.size(); ++l) {
      if (seq.points[l].leq(y) && !seq.points[l + 1].leq(y)) {
        cand.propose(seq.points[l], y);
        break;
      }
    }
    return;
  }
  // Project the sequence onto the smallest slice containing x and y.
  std::vector<bool> inS(x.dim(), false);
  for (std::size_t m = 0; m < x.dim(); ++m) inS[m] = x[m] != y[m];
  std::vector<Point> w;
  std::vector<std::size_t> wDims;
  std::vector<std::size_t> origin;  // index into seq.points of each w
  for (std::size_t l = 0; l < seq.points.size(); ++l) {
    Point p = seq.points[l];
    for (std::size_t m = 0; m < p.dim(); ++m)
      if (!inS[m]) p[m] = x[m];
    if (!w.empty() && w.back() == p) continue;
    if (!w.empty()) wDims.push_back(seq.dims[l - 1]);
    w.push_back(p);
    origin.push_back(l);
  }
  cand.pool(w);
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    const std::size_t d = wDims[k];
    const Point fw = f.query(w[k]);
    if (!(fw[d] > w[k][d])) {
      // The original point below w[k] that moved up in d.
      const std::size_t l = origin[k + 1] - 1;
      cand.propose(seq.points[l], w[k]);
      return;
    }
  }
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    if (infNorm(y, w[k + 1]) == infNorm(y, w[k]) + 1) {
      cand.propose(w[k], y);
      return;
    }
  }
}

[[noreturn]] void notWitness(const std::string& why) { throw NotAViolation(why); }

}  // namespace

Solution mapOv1(DmacOracle& f, const Slice& slice, const Point& x, const Point& y) {
  if (!slice.contains(x) || !slice.contains(y)) notWitness("points outside the slice");
  if (x == y) notWitness("points coincide");
  const std::vector<std::size_t> free = slice.freeDims();
  if (!fixedOn(f, x, free) || !fixedOn(f, y, free)) notWitness("points are not fixed in the slice");
  if (!findLesserFixpoint(f, slice, x).verified || !findLesserFixpoint(f, slice, y).verified)
    notWitness("points are not verified least fixed points");

  Candidates cand(f);
  cand.pool(x);
  cand.pool(y);
  if (y.leq(x)) {
    comparableCase(f, slice, x, y, cand);
  } else if (x.leq(y)) {
    comparableCase(f, slice, y, x, cand);
  } else {
    const Point z = meet(x, y);
    cand.pool(z);
    const Point fz = f.query(z);
    bool direct = false;
    for (std::size_t m : free) {
      if (fz[m] > z[m]) {
        cand.propose(z, z[m] == x[m] ? x : y);
        direct = true;
        break;
      }
    }
    if (!direct) comparableCase(f, slice, x, z, cand);
  }
  if (auto s = cand.resolve()) return *s;
  notWitness("no violating pair could be derived from the OV1 witness");
}

std::variant<Point, Solution> neighborSliceFixpoint(DmacOracle& f, const Point& x, std::size_t j,
                                                    int dir, std::size_t i) {
  const Grid& g = f.grid();
  if (j < i || j >= x.dim()) throw std::invalid_argument("neighborSliceFixpoint: j must be a fixed dimension");
  if (dir != 1 && dir != -1) throw std::invalid_argument("neighborSliceFixpoint: dir must be +1 or -1");
  const Point target = x.shifted(j, dir);
  if (!g.contains(target)) throw std::invalid_argument("neighborSliceFixpoint: target slice outside the grid");

  std::vector<Coord> lo(i), hi(i);
  Point z = target;
  for (std::size_t m = 0; m < i; ++m) {
    lo[m] = std::max(x[m] - 1, g.lower()[m]);
    hi[m] = std::min(x[m] + 1, g.upper()[m]);
    z[m] = lo[m];
  }
  auto violation = [&](const Point& a, const Point& b) -> Solution {
    if (auto s = classifyPair(f, a, b)) return *s;
    throw NotAViolation("iteration stopped at a pair that is not a violation: " + a.str() + " " +
                        b.str());
  };
  std::optional<Point> prev;
  for (std::size_t iter = 0; iter <= 2 * i + 1; ++iter) {
    const Point fz = f.query(z);
    bool fixed = true;
    for (std::size_t m = 0; m < i; ++m) fixed = fixed && fz[m] == z[m];
    if (fixed) return z;
    Point next = z;
    for (std::size_t m = 0; m < i; ++m) next[m] = fz[m];
    if (!next.geq(z)) {
      if (!prev) return violation(z, x);
      return violation(*prev, z);
    }
    for (std::size_t m = 0; m < i; ++m)
      if (next[m] < lo[m] || next[m] > hi[m]) return violation(z, x);
    prev = z;
    z = next;
  }
  throw std::logic_error("neighborSliceFixpoint: iteration did not terminate");
}

Solution mapOv2(DmacOracle& f, const Slice& slice, const Point& x, const Point& y, std::size_t i) {
  const std::size_t d = x.dim();
  if (i >= d || y.dim() != d) notWitness("dimension out of range");
  if (!slice.contains(x) || !slice.contains(y)) notWitness("points outside the slice");
  if (x[i] != y[i] + 1) notWitness("x_i must equal y_i + 1");
  for (std::size_t m = i + 1; m < d; ++m)
    if (x[m] != y[m]) notWitness("points lie in different slices");
  for (std::size_t m = 0; m < i; ++m)
    if (opdcDirection(f, x, m) != Direction::Zero || opdcDirection(f, y, m) != Direction::Zero)
      notWitness("points are not zeros of the lower dimensions");
  if (opdcDirection(f, x, i) != Direction::Down || opdcDirection(f, y, i) != Direction::Up)
    notWitness("directions do not point towards each other");

  Candidates cand(f);
  cand.pool(x);
  cand.pool(y);
  const Slice lower = Slice::prefixFree(x, i);
  const Slice lowerY = Slice::prefixFree(y, i);
  // The verification walk behind a zero height at x reports a failed check
  // between its points and x.
  cand.pool(findLesserFixpoint(f, slice, x).sequence.points);

  // The lower dimension with the largest gap.
  std::size_t j = 0;
  Coord gap = -1;
  for (std::size_t m = 0; m < i; ++m) {
    const Coord g = x[m] > y[m] ? x[m] - y[m] : y[m] - x[m];
    if (g > gap) {
      gap = g;
      j = m;
    }
  }

  if (gap >= 2) {
    const bool yBelow = y[j] < x[j];
    // Move from the lower slice of the pair to the other one.
    const Point& from = yBelow ? y : x;
    const Point& other = yBelow ? x : y;
    const auto nb = neighborSliceFixpoint(f, from, i, yBelow ? 1 : -1, i);
    if (std::holds_alternative<Solution>(nb)) return std::get<Solution>(nb);
    const Point z = std::get<Point>(nb);
    cand.pool(z);
    const VerificationSequence seq =
        findLesserFixpoint(f, yBelow ? lower : lowerY, other).sequence;
    cand.pool(seq.points);
    if (auto l = stepIn(seq, j)) cand.propose(seq.points[*l], z);
  } else {
    bool equal = true;
    std::optional<std::size_t> above;
    for (std::size_t m = 0; m < i; ++m) {
      if (x[m] != y[m]) equal = false;
      if (x[m] == y[m] - 1 && !above) above = m;
    }
    if (equal || !above) {
      cand.propose(y, x);
    } else {
      const std::size_t jj = *above;
      const Point z = x.shifted(i, -1);
      cand.pool(z);
      const VerificationSequence seq = findLesserFixpoint(f, lowerY, y).sequence;
      cand.pool(seq.points);
      const Point fz = f.query(z);
      const auto l = stepIn(seq, jj);
      if (fz[jj] <= z[jj]) {
        if (l) cand.propose(seq.points[*l], z);
      } else {
        cand.propose(z, x);
      }
    }
  }
  if (auto s = cand.resolve()) return *s;
  notWitness("no violating pair could be derived from the OV2 witness");
}

}  // namespace dmac
