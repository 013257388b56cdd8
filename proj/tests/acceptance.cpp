// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dmac/decomposition.hpp"
#include "dmac/instances.hpp"
#include "dmac/reductions.hpp"
#include "dmac/reference_oracle.hpp"
#include "dmac/solvers.hpp"
#include "dmac/verification.hpp"

using namespace dmac;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Ledger firings collected while running criteria 1 to 3.
struct LedgerTally {
  std::int64_t fired = 0;
  std::int64_t solves = 0;
  std::vector<std::string> messages;

  void add(const SolveStats& s) {
    ++solves;
    fired += s.ledgerViolations;
    for (const std::string& m : s.ledgerMessages)
      if (messages.size() < 5) messages.push_back(m);
  }
  void add(const DecompositionStats& s) {
    ++solves;
    fired += s.ledgerViolations;
  }
};

LedgerTally ledger;

/// The instance schedule of criterion 1, shared with criterion 10.
Coord criterion1N(std::uint64_t k) { return std::array<Coord, 3>{8, 16, 32}[k % 3]; }

Outcome criterion1() {
  const auto t0 = Clock::now();
  int notFixed = 0, wrongLfp = 0, errors = 0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    const SurfaceInstance inst = genSurfaceInstance(3, criterion1N(k), k);
    try {
      const SolveResult raw = solve3d(inst.oracle->clone());
      ledger.add(raw.stats);
      if (!raw.solution.isFixedPoint() || inst.oracle->query(raw.solution.x) != raw.solution.x) ++notFixed;
      SolveOptions opts;
      opts.lfpMode = true;
      const SolveResult lfp = solve3d(inst.oracle->clone(), opts);
      ledger.add(lfp.stats);
      if (lfp.solution.x != leastFixedPoint(*inst.oracle)) ++wrongLfp;
    } catch (const std::exception&) {
      ++errors;
    }
  }
  const double secs = secondsSince(t0);
  std::ostringstream os;
  os << "200 instances, not fixed " << notFixed << ", LFP mismatches " << wrongLfp << ", errors " << errors
     << ", " << secs << " s";
  return {notFixed == 0 && wrongLfp == 0 && errors == 0 && secs < 120, os.str()};
}

double measuredC = 0;

Outcome criterion2() {
  std::map<Coord, double> ratio;
  int errors = 0;
  for (Coord n : {16, 64, 256, 1024, 4096}) {
    std::int64_t worst = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const SurfaceInstance inst = genSurfaceInstance(3, n, seed);
      try {
        const SolveResult r = solve3d(inst.oracle);
        ledger.add(r.stats);
        if (!r.solution.isFixedPoint() || inst.oracle->query(r.solution.x) != r.solution.x) ++errors;
      } catch (const std::exception&) {
        ++errors;
      }
      worst = std::max(worst, inst.oracle->queryCount());
    }
    ratio[n] = static_cast<double>(worst) / std::log2(static_cast<double>(n));
    measuredC = std::max(measuredC, ratio[n]);
  }
  const double growth = ratio[4096] / ratio[256];
  std::ostringstream os;
  os << "C = " << measuredC << " (";
  for (const auto& [n, r] : ratio) os << "n=" << n << ": " << r << (n == 4096 ? "" : ", ");
  os << "), growth 256->4096 " << growth << ", errors " << errors;
  return {errors == 0 && growth <= 1.25, os.str()};
}

Outcome criterion3() {
  const double bound = std::pow(4 * measuredC * 3, 2);
  int wrong = 0, over = 0, errors = 0;
  std::int64_t worst = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SurfaceInstance inst = genSurfaceInstance(6, 8, seed);
    try {
      DecompositionStats stats;
      const Solution s = solveD(inst.oracle, &stats);
      ledger.add(stats);
      if (!s.isFixedPoint() || s.x != leastFixedPoint(*inst.oracle, 300000)) ++wrong;
      worst = std::max(worst, stats.queries);
      if (static_cast<double>(stats.queries) > bound) ++over;
    } catch (const std::exception&) {
      ++errors;
    }
  }
  std::ostringstream os;
  os << "50 instances, LFP mismatches " << wrong << ", max queries " << worst << " vs bound " << bound
     << ", over bound " << over << ", errors " << errors;
  return {wrong == 0 && over == 0 && errors == 0, os.str()};
}

/// Steps up in dimension i while below the generated surface and stays put
/// otherwise, so every point on or above a surface is fixed in its dimension.
OraclePtr weakUpInstance(std::size_t d, Coord n, std::uint64_t seed) {
  const SurfaceSpec spec = genSurfaceInstance(d, n, seed).spec;
  return DmacOracle::make(
      spec.grid,
      [spec, d](const Point& x) {
        Point out = x;
        for (std::size_t i = 0; i < d; ++i)
          if (x[i] < spec.height(i, x)) out[i] += 1;
        return out;
      },
      true);
}

Outcome criterion4() {
  int mismatches = 0, overBudget = 0;
  std::size_t checks = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const std::size_t d = 1 + k % 3;
    const Coord n = d == 3 ? 4 + static_cast<Coord>(k % 5) : 6 + static_cast<Coord>(k % 7);
    OraclePtr fp = k % 2 ? weakUpInstance(d, n, k) : genSurfaceInstance(d, n, k).oracle;
    DmacOracle& f = *fp;
    f.grid().forEach([&](const Point& x) {
      const Point fx = f.query(x);
      for (std::size_t i = 1; i <= d; ++i) {
        // x must be a fixed point of the slice with the first i dimensions free.
        if (fx[i - 1] != x[i - 1]) break;
        const Slice s = Slice::prefixFree(x, i);
        const bool oracle = sliceLeastFixedPoint(f, s) == x;
        if (isLfp(f, x, i) != oracle) ++mismatches;
        auto fresh = f.clone();
        fresh->resetCount();
        fresh->clearMemo();
        findLesserFixpoint(*fresh, s, x);
        if (fresh->queryCount() > static_cast<std::int64_t>(d)) ++overBudget;
        ++checks;
      }
    });
  }
  std::ostringstream os;
  os << checks << " (slice fixed point, slice) checks, isLfp mismatches " << mismatches
     << ", more than d queries " << overBudget;
  return {mismatches == 0 && overBudget == 0 && checks > 0, os.str()};
}

Outcome criterion5() {
  int notUnique = 0, wrong = 0, errors = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const SurfaceInstance inst = genSurfaceInstance(3, 4 + static_cast<Coord>(k % 5), k);
    try {
      ReductionResult r =
          compose(compose(clampUnitDisplacement(inst.oracle), make1DUnique), forceBoundaryInward);
      r = compose(r, enforceUniqueFixedPoint3d);
      const std::vector<Point> fps = allFixedPoints(*r.oracle, 1000000);
      if (fps.size() != 1) {
        ++notUnique;
        continue;
      }
      if (r.mapBack(Solution::fixedPoint(fps[0])).x != *leastFixedPoint(*inst.oracle)) ++wrong;
    } catch (const std::exception&) {
      ++errors;
    }
  }
  std::ostringstream os;
  os << "100 instances, not unique " << notUnique << ", wrong back-mapping " << wrong << ", errors " << errors;
  return {notUnique == 0 && wrong == 0 && errors == 0, os.str()};
}

Outcome criterion6() {
  int cleanFail = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const std::size_t d = 2 + k % 2;
    const SurfaceReport r = checkSurfaceTheorem(*genSurfaceInstance(d, d == 2 ? 12 : 6, k).oracle);
    if (!(r.oneDRational && r.monotone && r.gradientOne && r.violationFree)) ++cleanFail;
  }
  int injectedMissed = 0, injected = 0;
  for (std::uint64_t k = 0; injected < 100 && k < 1000; ++k) {
    const std::size_t d = 2 + k % 2;
    const Coord n = d == 2 ? 12 : 6;
    const SurfaceInstance inst = genSurfaceInstance(d, n, k);
    const Point loc = Point::filled(d, 1 + static_cast<Coord>(k % n));
    InjectedInstance inj;
    try {
      inj = injectViolation(inst.oracle, k % 2 ? ViolationKind::Mono : ViolationKind::NonExp, loc, k);
    } catch (const std::invalid_argument&) {
      continue;
    }
    ++injected;
    const SurfaceReport r = checkSurfaceTheorem(*inj.oracle);
    const bool structural = !r.oneDRational || !r.monotone || !r.gradientOne;
    if (r.violationFree || !structural) ++injectedMissed;
  }
  std::ostringstream os;
  os << "generated failing a predicate " << cleanFail << "/100, injected not flagged " << injectedMissed << "/"
     << injected;
  return {cleanFail == 0 && injected == 100 && injectedMissed == 0, os.str()};
}

Outcome criterion7() {
  int notApprox = 0, farFromVi = 0, errors = 0, runs = 0;
  double worstDev = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const TurnBasedGame game = genTurnBasedGame(1 + seed % 6, seed);
    const std::vector<double> vi = valueIteration(game, 1e-12);
    for (const char* e : {"1/8", "1/32"}) {
      ++runs;
      const Rational eps = parseRational(e);
      const ContinuousOracle g = shapleyOperator(game, eps);
      try {
        const McReduction red = mcToDmac(g);
        const ContinuousSolution cs = red.mapBack(solveD(red.oracle));
        if (cs.kind != ContinuousSolution::Kind::ApproxFixedPoint || infNorm(g.eval(cs.x), cs.x) > eps) {
          ++notApprox;
          continue;
        }
        double dev = 0;
        for (std::size_t i = 0; i < vi.size(); ++i) dev = std::max(dev, std::abs(toDouble(cs.x[i]) - vi[i]));
        worstDev = std::max(worstDev, dev / toDouble(eps));
        if (dev > 2 * toDouble(eps)) ++farFromVi;
      } catch (const std::exception&) {
        ++errors;
      }
    }
  }
  std::ostringstream os;
  os << runs << " runs, residual above eps " << notApprox << ", farther than 2 eps from value iteration "
     << farFromVi << " (worst " << worstDev << " eps), errors " << errors;
  return {notApprox == 0 && farFromVi == 0 && errors == 0, os.str()};
}

Outcome criterion8() {
  std::ostringstream os;
  os << ledger.solves << " solves, ledger assertions fired " << ledger.fired;
  for (const std::string& m : ledger.messages) os << "; " << m;
  return {ledger.fired == 0 && ledger.solves > 0, os.str()};
}

/// f with the listed points answered from the table instead.
OraclePtr overridden(const OraclePtr& f, std::map<Point, Point> table) {
  auto t = std::make_shared<std::map<Point, Point>>(std::move(table));
  return DmacOracle::make(
      f->grid(),
      [f, t](const Point& x) {
        auto it = t->find(x);
        return it == t->end() ? f->query(x) : it->second;
      },
      true);
}

/// A second verified least fixed point of the dimension-0 line through x,
/// two steps above x.
std::optional<std::pair<OraclePtr, Point>> plantOv1(const OraclePtr& f, const Point& x) {
  const Point y = x.shifted(0, 2);
  if (!f->grid().contains(y)) return std::nullopt;
  const Point mid = x.shifted(0, 1);
  Point fmid = f->query(mid), fy = f->query(y);
  fmid[0] = mid[0] + 1;
  fy[0] = y[0];
  return std::make_pair(overridden(f, {{mid, fmid}, {y, fy}}), y);
}

Outcome criterion9() {
  int ov1 = 0, ov2 = 0, ovBad = 0;
  for (std::uint64_t k = 0; k < 1000 && (ov1 < 50 || ov2 < 50); ++k) {
    const std::size_t d = 2 + k % 2;
    const Coord n = d == 2 ? 8 : 5;
    const SurfaceInstance inst = genSurfaceInstance(d, n, k);
    OraclePtr f = inst.oracle;
    if (ov1 < 50) {
      // Start from the least fixed point of a line in dimension 0.
      Point base = Point::filled(d, 1 + static_cast<Coord>(k % n));
      if (auto x = sliceLeastFixedPoint(*f, Slice::prefixFree(base, 1))) {
        if (auto planted = plantOv1(f, *x)) {
          auto& [g, y] = *planted;
          if (isLfp(*g, *x, 1) && isLfp(*g, y, 1) && g->query(y)[0] == y[0]) {
            ++ov1;
            try {
              const Solution v = mapOv1(*g, Slice::prefixFree(*x, 1), *x, y);
              if (!classifyPair(*g, v.x, v.y)) ++ovBad;
            } catch (const std::exception&) {
              ++ovBad;
            }
          }
        }
      }
    }
    if (ov2 < 50) {
      // x moves down in dimension 0 and its lower neighbour y moves up.
      Point x = Point::filled(d, 2 + static_cast<Coord>(k % (n - 1)));
      const Point y = x.shifted(0, -1);
      Point fx = f->query(x), fy = f->query(y);
      fx[0] = x[0] - 1;
      fy[0] = y[0] + 1;
      OraclePtr g = overridden(f, {{x, fx}, {y, fy}});
      ++ov2;
      try {
        const Solution v = mapOv2(*g, Slice::prefixFree(x, 1), x, y, 0);
        if (!classifyPair(*g, v.x, v.y)) ++ovBad;
      } catch (const std::exception&) {
        ++ovBad;
      }
    }
  }

  int dv1 = 0, dv2 = 0, dvBad = 0;
  for (std::uint64_t k = 0; dv1 < 50 || dv2 < 50; ++k) {
    const TurnBasedGame game = genTurnBasedGame(2 + k % 3, k);
    const ContinuousOracle base = shapleyOperator(game, Rational(1, 8));
    const McReduction plain = mcToDmac(base);
    const Rational eh = plain.epsHat;
    const Coord n = plain.n;
    const std::size_t d = base.d;
    const bool mono = dv1 < 50;
    // DV1: p <= q = p + e0 with p pushed to 1 and q pushed to 0 in
    // dimension 0. DV2: incomparable q = p + e0 - e1 with p pushed to 0 and
    // q pushed to 1.
    Point p = Point::filled(d, 1 + static_cast<Coord>(k % (n - 2)));
    Point q = mono ? p.shifted(0, 1) : p.shifted(0, 1).shifted(1, -1);
    const RVec up = scaleToUnit(mono ? p : q, eh), down = scaleToUnit(mono ? q : p, eh);
    ContinuousOracle g = base;
    g.eval = [base, up, down](const RVec& x) {
      RVec y = base.eval(x);
      if (x == up) y[0] = 1;
      if (x == down) y[0] = 0;
      return y;
    };
    const McReduction red = mcToDmac(g);
    const auto found = classifyPair(*red.oracle, p, q);
    (mono ? dv1 : dv2) += 1;
    if (!found) {
      ++dvBad;
      continue;
    }
    try {
      const ContinuousSolution cs = red.mapBack(*found);
      const auto want = mono ? ContinuousSolution::Kind::MonoViolation : ContinuousSolution::Kind::ContractionViolation;
      if (cs.kind != want || !isValidContinuousSolution(g, cs)) ++dvBad;
    } catch (const std::exception&) {
      ++dvBad;
    }
  }
  std::ostringstream os;
  os << "OV1 " << ov1 << ", OV2 " << ov2 << ", unmapped " << ovBad << "; DV1 " << dv1 << ", DV2 " << dv2
     << ", invalid " << dvBad;
  return {ov1 == 50 && ov2 == 50 && ovBad == 0 && dvBad == 0, os.str()};
}

Outcome criterion10() {
  std::size_t slices = 0, missing = 0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    const Coord n = criterion1N(k);
    if (n > 16) continue;
    const SurfaceInstance inst = genSurfaceInstance(3, n, k);
    DmacOracle& f = *inst.oracle;
    for (std::size_t fixed = 0; fixed < 3; ++fixed) {
      for (Coord c = 1; c <= n; ++c) {
        std::vector<std::optional<Coord>> pattern(3);
        pattern[fixed] = c;
        const Slice s(pattern);
        bool upNonEmpty = false;
        s.restrict(f.grid()).forEach([&](const Point& p) { upNonEmpty = upNonEmpty || inUpSet(f, p); });
        if (!upNonEmpty) continue;
        ++slices;
        const auto boxes = enumerateCriticalBoxes(f, s);
        if (std::none_of(boxes.begin(), boxes.end(),
                         [](const CriticalBox& b) { return std::abs(b.h - b.w) <= 1; }))
          ++missing;
      }
    }
  }
  std::ostringstream os;
  os << slices << " slices with a non-empty up set, without an almost-square critical box " << missing;
  return {missing == 0 && slices > 0, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8,
                                                          criterion9, criterion10};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("Criterion %zu: %s - %s [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                secondsSince(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
