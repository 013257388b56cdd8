// Command-line front end: generate, solve, verify, reduce and benchmark.
//
// Exit codes: 0 success, 1 usage or input error, 2 promise violation,
// 3 verification candidate is not a fixed point.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dmac/core.hpp"
#include "dmac/decomposition.hpp"
#include "dmac/instances.hpp"
#include "dmac/reductions.hpp"
#include "dmac/reference_oracle.hpp"
#include "dmac/solvers.hpp"
#include "dmac/verification.hpp"

using namespace dmac;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPromise = 2;
constexpr int kExitNotFixed = 3;

struct Source {
  std::string gen;
  std::size_t d = 3;
  Coord n = 16;
  std::uint64_t seed = 0;
  std::string instance;

  void attach(CLI::App* cmd) {
    cmd->add_option("--gen", gen, "Generator name (surface)");
    cmd->add_option("--d", d, "Dimension for --gen");
    cmd->add_option("--n", n, "Grid size for --gen");
    cmd->add_option("--seed", seed, "Seed for --gen");
    cmd->add_option("--instance", instance, "Instance file (JSON)");
  }

  OraclePtr load() const {
    if (!instance.empty()) {
      std::ifstream in(instance);
      if (!in) throw std::invalid_argument("cannot open instance file '" + instance + "'");
      nlohmann::json j;
      in >> j;
      return oracleFromJson(j);
    }
    if (gen.empty()) throw std::invalid_argument("give --gen or --instance");
    if (gen != "surface") throw std::invalid_argument("unknown generator '" + gen + "'");
    return genSurfaceInstance(d, n, seed).oracle;
  }
};

Point parsePoint(const std::string& text) {
  std::vector<Coord> c;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    c.push_back(std::stoll(part, &used));
    if (used != part.size()) throw std::invalid_argument("bad point '" + text + "'");
  }
  if (c.empty()) throw std::invalid_argument("empty point");
  return Point(c);
}

std::vector<Coord> parseList(const std::string& text) {
  std::vector<Coord> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    out.push_back(std::stoll(part));
  }
  return out;
}

double millisSince(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string defaultMode(std::size_t d) {
  if (d == 2) return "2d";
  if (d == 3) return "3d";
  return "decomposed";
}

/// Run one solve on a fresh oracle and return the solution.
Solution runSolver(const OraclePtr& f, const std::string& mode, bool lfp, bool raw) {
  if (mode == "3d") {
    SolveOptions opts;
    opts.lfpMode = lfp;
    opts.preprocess = !raw;
    return solve3d(f, opts).solution;
  }
  if (mode == "2d") {
    if (lfp) return solveLfp2d(f);
    if (f->dim() != 2) throw std::invalid_argument("mode 2d needs a two-dimensional instance");
    ReductionResult r = compose(clampUnitDisplacement(f), make1DUnique);
    if (!raw) r = compose(r, forceBoundaryInward);
    return r.mapBack(Solution::fixedPoint(solve2d(*r.oracle)));
  }
  if (mode == "decomposed") return solveD(f);
  throw std::invalid_argument("unknown mode '" + mode + "'");
}

int cmdSolve(const Source& src, const std::string& modeIn, bool lfp, bool raw,
             const std::string& gameFile, const std::string& epsText) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!gameFile.empty()) {
    std::ifstream in(gameFile);
    if (!in) throw std::invalid_argument("cannot open game file '" + gameFile + "'");
    nlohmann::json j;
    in >> j;
    const TurnBasedGame game = gameFromJson(j);
    const Rational eps = parseRational(epsText);
    const ContinuousOracle g = shapleyOperator(game, eps);
    const McReduction red = mcToDmac(g);
    const Solution s = solveD(red.oracle);
    const ContinuousSolution cs = red.mapBack(s);
    std::cout << "mode: game\n";
    std::cout << "states: " << game.states.size() << "\n";
    std::cout << "eps: " << rationalToString(eps) << "\n";
    std::cout << "grid_n: " << red.n << "\n";
    std::cout << "kind: "
              << (cs.kind == ContinuousSolution::Kind::ApproxFixedPoint ? "approx-fixed-point" : "violation")
              << "\n";
    std::cout << "values:";
    for (const auto& v : cs.x) std::cout << " " << rationalToString(v);
    std::cout << "\nvalues_decimal:";
    for (const auto& v : cs.x) std::cout << " " << std::fixed << std::setprecision(6) << toDouble(v);
    std::cout << "\nverified: " << (isValidContinuousSolution(g, cs) ? "yes" : "no") << "\n";
    std::cout << "queries: " << red.oracle->queryCount() << "\n";
    std::cerr << "wall_ms: " << std::fixed << std::setprecision(3) << millisSince(t0) << "\n";
    return kExitOk;
  }

  const OraclePtr f = src.load();
  const std::string mode = modeIn.empty() ? defaultMode(f->dim()) : modeIn;
  std::cout << "mode: " << mode << "\n";
  if (mode == "brute") {
    const BruteForceResult r = bruteForceSolve(*f);
    std::cout << "fixed_points: " << r.fixedPoints.size() << "\n";
    for (const Point& p : r.fixedPoints) std::cout << "  " << p.str() << "\n";
    if (r.violation) std::cout << "violation: " << r.violation->str() << "\n";
    else std::cout << "violation: none\n";
    std::cerr << "wall_ms: " << std::fixed << std::setprecision(3) << millisSince(t0) << "\n";
    return kExitOk;
  }
  const Solution s = runSolver(f, mode, lfp, raw);
  std::cout << "solution: " << s.str() << "\n";
  std::cout << "lfp_mode: " << (lfp || mode == "decomposed" ? "true" : "false") << "\n";
  std::cout << "valid: " << (isValidSolution(*f, s) ? "yes" : "no") << "\n";
  std::cout << "queries: " << f->queryCount() << "\n";
  std::cerr << "wall_ms: " << std::fixed << std::setprecision(3) << millisSince(t0) << "\n";
  return kExitOk;
}

std::string svgPlot(const std::vector<std::pair<double, double>>& pts) {
  // Max queries per log2 n, drawn as a polyline.
  const double w = 480, h = 320, pad = 40;
  double xmax = 1, ymax = 1;
  for (const auto& [x, y] : pts) {
    xmax = std::max(xmax, x);
    ymax = std::max(ymax, y);
  }
  std::ostringstream o;
  o << std::fixed << std::setprecision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  o << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad << "\" y2=\"" << h - pad
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << h - pad
    << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << w / 2 << "\" y=\"" << h - 8 << "\" text-anchor=\"middle\">log2 n</text>\n";
  o << "<text x=\"12\" y=\"" << h / 2 << "\" transform=\"rotate(-90 12 " << h / 2
    << ")\" text-anchor=\"middle\">max queries</text>\n";
  o << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (const auto& [x, y] : pts)
    o << pad + x / xmax * (w - 2 * pad) << "," << h - pad - y / ymax * (h - 2 * pad) << " ";
  o << "\"/>\n</svg>\n";
  return o.str();
}

int cmdBench(std::size_t d, const std::string& nsText, int seeds, const std::string& modeIn,
             bool lfp, const std::string& out, const std::string& svg) {
  const std::string mode = modeIn.empty() ? defaultMode(d) : modeIn;
  const std::vector<Coord> ns = parseList(nsText);
  std::ostringstream csv;
  csv << "d,n,seed,mode,queries,log2n,ratio,wall_ms\n";
  std::vector<std::pair<double, double>> plot;
  for (Coord n : ns) {
    std::int64_t worst = 0;
    for (int seed = 0; seed < seeds; ++seed) {
      const SurfaceInstance inst = genSurfaceInstance(d, n, static_cast<std::uint64_t>(seed));
      const auto t0 = std::chrono::steady_clock::now();
      const Solution s = runSolver(inst.oracle, mode, lfp, false);
      const double ms = millisSince(t0);
      if (!s.isFixedPoint()) throw PromiseViolation("benchmark instance produced a violation");
      const std::int64_t q = inst.oracle->queryCount();
      worst = std::max(worst, q);
      const double lg = std::log2(static_cast<double>(n));
      char line[256];
      std::snprintf(line, sizeof line, "%zu,%lld,%d,%s,%lld,%.4f,%.4f,%.3f\n", d,
                    static_cast<long long>(n), seed, mode.c_str(), static_cast<long long>(q), lg,
                    q / lg, ms);
      csv << line;
    }
    plot.emplace_back(std::log2(static_cast<double>(n)), static_cast<double>(worst));
  }
  if (out.empty() || out == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream o(out, std::ios::binary);
    if (!o) throw std::runtime_error("cannot write '" + out + "'");
    o << csv.str();
  }
  if (!svg.empty()) {
    std::ofstream o(svg, std::ios::binary);
    if (!o) throw std::runtime_error("cannot write '" + svg + "'");
    o << svgPlot(plot);
  }
  return kExitOk;
}

int cmdVerify(const Source& src, const std::string& pointText, std::optional<std::size_t> freeDims) {
  const OraclePtr f = src.load();
  const Point x = parsePoint(pointText);
  if (x.dim() != f->dim() || !f->grid().contains(x)) throw std::invalid_argument("point outside the grid");
  const std::size_t i = freeDims.value_or(f->dim());
  if (i == 0 || i > f->dim()) throw std::invalid_argument("--free must lie in 1..d");
  const Slice slice = Slice::prefixFree(x, i);
  const Point fx = f->query(x);
  for (std::size_t m = 0; m < i; ++m) {
    if (fx[m] != x[m]) {
      std::cout << "not-fixed: " << x.str() << " -> " << fx.str() << "\n";
      return kExitNotFixed;
    }
  }
  const LesserFixpointResult r = findLesserFixpoint(*f, slice, x);
  std::cout << (r.verified ? "LFP-verified" : "lesser-fixed-point-found") << ": " << r.point.str()
            << "\n";
  std::cout << "sequence:";
  for (std::size_t k = 0; k < r.sequence.points.size(); ++k) {
    std::cout << " " << r.sequence.points[k].str();
    if (k < r.sequence.dims.size()) std::cout << " -e" << r.sequence.dims[k] << "->";
  }
  std::cout << "\nqueries: " << f->queryCount() << "\n";
  return kExitOk;
}

int cmdGen(const Source& src, bool table, const std::string& out) {
  nlohmann::json j;
  if (table) {
    const OraclePtr f = src.load();
    j = oracleToJson(*f);
  } else {
    if (src.gen != "surface") throw std::invalid_argument("give --gen surface");
    j = {{"gen", "surface"}, {"d", src.d}, {"n", src.n}, {"seed", src.seed}};
    oracleFromJson(j);
  }
  const std::string text = (table ? j.dump() : j.dump(1)) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream o(out, std::ios::binary);
    if (!o) throw std::runtime_error("cannot write '" + out + "'");
    o << text;
  }
  return kExitOk;
}

int cmdReduce(const Source& src, const std::string& to, bool scan) {
  const OraclePtr f = src.load();
  ReductionResult r;
  if (to == "unit") r = clampUnitDisplacement(f);
  else if (to == "1dunique") r = compose(clampUnitDisplacement(f), make1DUnique);
  else if (to == "boundary")
    r = compose(compose(clampUnitDisplacement(f), make1DUnique), forceBoundaryInward);
  else if (to == "preprocess3d") r = preprocess3d(f, false);
  else if (to == "unique3d") r = preprocess3d(f, true);
  else if (to == "unique2d") {
    r = compose(compose(clampUnitDisplacement(f), make1DUnique), forceBoundaryInward);
    r = compose(r, enforceUniqueFixedPoint2d);
  } else {
    throw std::invalid_argument("unknown reduction '" + to + "'");
  }
  const Grid& g = r.oracle->grid();
  std::cout << "reduction: " << to << "\n";
  std::cout << "grid: " << g.lower().str() << " .. " << g.upper().str() << " scale " << g.scale() << "\n";
  std::cout << "points: " << g.size() << "\n";
  if (scan) {
    const std::vector<Point> fps = allFixedPoints(*r.oracle);
    std::cout << "fixed_points: " << fps.size() << "\n";
    for (const Point& p : fps) {
      std::cout << "  " << p.str() << " -> " << r.mapBack(Solution::fixedPoint(p)).str() << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed points of discrete monotone contractions"};
  app.require_subcommand(1);

  Source solveSrc;
  std::string solveMode, gameFile, eps = "1/8";
  bool lfp = false, raw = false;
  auto* solve = app.add_subcommand("solve", "Solve an instance or a game");
  solveSrc.attach(solve);
  solve->add_option("--mode", solveMode, "2d | 3d | decomposed | brute")
      ->check(CLI::IsMember({"2d", "3d", "decomposed", "brute"}));
  solve->add_flag("--lfp", lfp, "Return the least fixed point");
  solve->add_flag("--raw", raw, "Skip the preprocessing reductions");
  solve->add_option("--game", gameFile, "Turn-based game file (JSON)");
  solve->add_option("--eps", eps, "Precision for --game");

  std::size_t benchD = 3;
  std::string benchNs = "16,64,256,1024,4096", benchMode, benchOut, benchSvg;
  int benchSeeds = 20;
  bool benchLfp = false;
  auto* bench = app.add_subcommand("bench", "Query counts over a size sweep (CSV)");
  bench->add_option("--d", benchD, "Dimension");
  bench->add_option("--ns", benchNs, "Comma-separated grid sizes; empty for none");
  bench->add_option("--seeds", benchSeeds, "Seeds per size");
  bench->add_option("--mode", benchMode, "2d | 3d | decomposed")
      ->check(CLI::IsMember({"2d", "3d", "decomposed"}));
  bench->add_flag("--lfp", benchLfp, "Least-fixed-point mode");
  bench->add_option("--out", benchOut, "CSV output file (default stdout)");
  bench->add_option("--svg", benchSvg, "Optional SVG plot of max queries against log2 n");

  Source verifySrc;
  std::string verifyPoint;
  std::optional<std::size_t> verifyFree;
  auto* verify = app.add_subcommand("verify", "Check whether a point is a least fixed point");
  verifySrc.attach(verify);
  verify->add_option("--point", verifyPoint, "Candidate, e.g. 3,4,5")->required();
  verify->add_option("--free", verifyFree, "Number of leading free dimensions (default d)");

  Source genSrc;
  bool genTable = false;
  std::string genOut;
  auto* gen = app.add_subcommand("gen", "Write an instance document");
  genSrc.attach(gen);
  gen->add_flag("--table", genTable, "Write the explicit displacement table");
  gen->add_option("--out", genOut, "Output file (default stdout)");

  Source reduceSrc;
  std::string reduceTo = "unique3d";
  bool reduceScan = false;
  auto* reduce = app.add_subcommand("reduce", "Apply a reduction and describe the result");
  reduceSrc.attach(reduce);
  reduce->add_option("--to", reduceTo, "unit | 1dunique | boundary | preprocess3d | unique3d | unique2d");
  reduce->add_flag("--scan", reduceScan, "List the fixed points of the reduced instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*solve) return cmdSolve(solveSrc, solveMode, lfp, raw, gameFile, eps);
    if (*bench) return cmdBench(benchD, benchNs, benchSeeds, benchMode, benchLfp, benchOut, benchSvg);
    if (*verify) return cmdVerify(verifySrc, verifyPoint, verifyFree);
    if (*gen) return cmdGen(genSrc, genTable, genOut);
    if (*reduce) return cmdReduce(reduceSrc, reduceTo, reduceScan);
  } catch (const PromiseViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPromise;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
