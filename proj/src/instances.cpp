#include "dmac/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dmac/reference_oracle.hpp"

namespace dmac {

Coord SurfaceSpec::height(std::size_t i, const Point& x) const {
  bool any = false;
  Coord best = 0;
  for (const auto& t : terms[i]) {
    Coord v = t.c;
    for (std::size_t k = 0; k < t.mask.size(); ++k) v = std::min(v, x[t.mask[k]] - t.a[k]);
    v += t.b;
    if (!any || v > best) best = v;
    any = true;
  }
  if (!any) best = clampLo[i];
  return std::clamp(best, clampLo[i], clampHi[i]);
}

OraclePtr surfaceOracle(const SurfaceSpec& spec) {
  auto s = std::make_shared<SurfaceSpec>(spec);
  return DmacOracle::make(
      spec.grid,
      [s](const Point& x) {
        Point y = x;
        for (std::size_t i = 0; i < x.dim(); ++i) y[i] = x[i] + sgn(s->height(i, x) - x[i]);
        return y;
      },
      true);
}

SurfaceSpec constantSurfaces(std::size_t d, Coord lo, Coord hi, Coord height) {
  SurfaceSpec spec;
  spec.grid = Grid::cube(d, lo, hi);
  spec.terms.assign(d, {PlateauTerm{height, 0, {}, {}}});
  spec.clampLo.assign(d, lo);
  spec.clampHi.assign(d, hi);
  return spec;
}

SurfaceInstance makeSurfaceInstance(const SurfaceSpec& spec) {
  SurfaceInstance inst;
  inst.spec = spec;
  inst.oracle = surfaceOracle(spec);
  auto probe = inst.oracle->clone();
  inst.lfp = kleeneLeastFixedPoint(*probe);
  return inst;
}

SurfaceInstance genSurfaceInstance(std::size_t d, Coord n, std::uint64_t seed) {
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  if (n < 4) throw std::invalid_argument("n must be at least 4");
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + d * 1315423911ULL + static_cast<std::uint64_t>(n));
  auto uni = [&](Coord lo, Coord hi) { return std::uniform_int_distribution<Coord>(lo, hi)(rng); };

  SurfaceSpec spec;
  spec.grid = Grid::cube(d, 1, n);
  spec.clampLo.assign(d, 2);
  spec.clampHi.assign(d, n - 1);
  spec.terms.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < d; ++j)
      if (j != i) others.push_back(j);
    const int numTerms = static_cast<int>(uni(1, 3));
    for (int k = 0; k < numTerms; ++k) {
      PlateauTerm t;
      const int style = static_cast<int>(uni(0, 3));
      if (style == 0 || others.empty()) {
        // A flat plateau.
        t.b = uni(2, n - 1);
        t.c = 0;
      } else {
        for (std::size_t j : others)
          if (uni(0, 1) == 1) t.mask.push_back(j);
        if (t.mask.empty()) t.mask.push_back(others[static_cast<std::size_t>(uni(0, static_cast<Coord>(others.size()) - 1))]);
        if (style == 1) {
          // Tracks another coordinate along a diagonal, possibly forever.
          t.a.assign(t.mask.size(), 0);
          t.b = uni(-2, 2);
          t.c = n;
        } else {
          for (std::size_t m = 0; m < t.mask.size(); ++m) t.a.push_back(uni(1, n));
          t.b = uni(1, n);
          t.c = uni(0, n);
        }
      }
      spec.terms[i].push_back(std::move(t));
    }
  }
  return makeSurfaceInstance(spec);
}

InjectedInstance injectViolation(const OraclePtr& f, ViolationKind kind, const Point& location,
                                 std::uint64_t seed) {
  auto base = f->clone();
  const Grid& grid = base->grid();
  const std::size_t d = grid.dim();
  if (!grid.contains(location)) throw std::invalid_argument("location outside the grid");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  // Try a candidate point; on success record the override.
  std::optional<InjectedInstance> found;
  auto attempt = [&](const Point& z, std::size_t i) {
    const Coord lo = grid.lower()[i], hi = grid.upper()[i];
    if (kind == ViolationKind::Mono) {
      if (z[i] <= lo) return;
      const Point fz = base->query(z);
      const Point below = z.shifted(i, -1);
      if (fz[i] < z[i] || base->query(below)[i] <= z[i] - 1) return;
      Point over = fz.with(i, z[i] - 1);
      InjectedInstance r;
      r.overridden = z;
      r.dim = i;
      r.witness = Solution::mono(below, z);
      r.oracle = DmacOracle::make(
          grid,
          [base, z, over](const Point& x) { return x == z ? over : base->query(x); },
          base->unitDisplacement());
      found = std::move(r);
    } else {
      if (z[i] + 1 > hi - 1) return;
      if (base->query(z)[i] != z[i] - 1) return;
      const Point y = z.shifted(i, 1);
      Point over = base->query(y).with(i, y[i] + 1);
      InjectedInstance r;
      r.overridden = y;
      r.dim = i;
      r.witness = Solution::nonExp(z, y);
      r.oracle = DmacOracle::make(
          grid,
          [base, y, over](const Point& x) { return x == y ? over : base->query(x); },
          base->unitDisplacement());
      found = std::move(r);
    }
  };

  Coord maxR = 0;
  for (std::size_t k = 0; k < d; ++k) maxR = std::max(maxR, grid.extent(k));
  for (Coord r = 0; r <= maxR && !found; ++r) {
    Grid shell = Grid::cube(d, -r, r);
    shell.forEach([&](const Point& o) {
      if (found) return;
      Coord m = 0;
      for (std::size_t k = 0; k < d; ++k) m = std::max(m, std::abs(o[k]));
      if (m != r) return;
      const Point z = location + o;
      if (!grid.contains(z)) return;
      for (std::size_t i : order) {
        attempt(z, i);
        if (found) return;
      }
    });
  }
  if (!found) throw std::invalid_argument("no point admits the requested violation");
  auto check = found->oracle->clone();
  auto cls = classifyPair(*check, found->witness.x, found->witness.y);
  if (!cls || cls->kind != found->witness.kind)
    throw std::logic_error("injected override does not produce the requested violation");
  return *found;
}

void TurnBasedGame::validate() const {
  if (lambda < 0 || lambda >= 1) throw std::invalid_argument("discount must lie in [0,1)");
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (states[s].actions.empty())
      throw std::invalid_argument("state " + std::to_string(s) + " has no actions");
    for (const auto& a : states[s].actions) {
      if (a.reward < 0 || a.reward > 1) throw std::invalid_argument("reward outside [0,1]");
      Rational total = 0;
      for (const auto& [t, p] : a.transitions) {
        if (t >= states.size()) throw std::invalid_argument("transition to unknown state");
        if (p < 0) throw std::invalid_argument("negative probability");
        total += p;
      }
      if (total != 1) throw std::invalid_argument("transition probabilities do not sum to 1");
    }
  }
}

TurnBasedGame genTurnBasedGame(std::size_t numStates, std::uint64_t seed) {
  if (numStates == 0) throw std::invalid_argument("a game needs at least one state");
  std::mt19937_64 rng(seed * 0xD1B54A32D192ED03ULL + numStates);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  TurnBasedGame g;
  static const Rational lambdas[] = {Rational(1, 2), Rational(2, 3), Rational(3, 4)};
  g.lambda = lambdas[uni(0, 2)];
  g.states.resize(numStates);
  for (auto& st : g.states) {
    st.maximizer = uni(0, 1) == 1;
    const int numActions = uni(1, 3);
    for (int a = 0; a < numActions; ++a) {
      TurnBasedGame::Action act;
      act.reward = Rational(uni(0, 8), 8);
      const auto t1 = static_cast<std::size_t>(uni(0, static_cast<int>(numStates) - 1));
      if (uni(0, 1) == 0) {
        act.transitions.push_back({t1, Rational(1)});
      } else {
        const auto t2 = static_cast<std::size_t>(uni(0, static_cast<int>(numStates) - 1));
        const Rational p(uni(1, 3), 4);
        act.transitions.push_back({t1, p});
        act.transitions.push_back({t2, 1 - p});
      }
      st.actions.push_back(std::move(act));
    }
  }
  return g;
}

ContinuousOracle shapleyOperator(const TurnBasedGame& game, const Rational& eps) {
  game.validate();
  auto gp = std::make_shared<TurnBasedGame>(game);
  ContinuousOracle g;
  g.d = game.states.size();
  g.lambda = game.lambda;
  g.eps = eps;
  g.eval = [gp](const RVec& v) {
    RVec out(gp->states.size());
    for (std::size_t s = 0; s < gp->states.size(); ++s) {
      const auto& st = gp->states[s];
      bool first = true;
      Rational best;
      for (const auto& a : st.actions) {
        Rational val = (1 - gp->lambda) * a.reward;
        for (const auto& [t, p] : a.transitions) val += gp->lambda * p * v[t];
        if (first || (st.maximizer ? val > best : val < best)) best = val;
        first = false;
      }
      out[s] = best;
    }
    return out;
  };
  return g;
}

std::vector<double> valueIteration(const TurnBasedGame& game, double tol) {
  game.validate();
  const double lambda = toDouble(game.lambda);
  std::vector<double> v(game.states.size(), 0.0), next(v.size());
  while (true) {
    double diff = 0;
    for (std::size_t s = 0; s < game.states.size(); ++s) {
      const auto& st = game.states[s];
      double best = st.maximizer ? -1e300 : 1e300;
      for (const auto& a : st.actions) {
        double val = (1 - lambda) * toDouble(a.reward);
        for (const auto& [t, p] : a.transitions) val += lambda * toDouble(p) * v[t];
        best = st.maximizer ? std::max(best, val) : std::min(best, val);
      }
      next[s] = best;
      diff = std::max(diff, std::abs(best - v[s]));
    }
    v.swap(next);
    // The contraction bound turns the step size into a distance to the fixed point.
    if (diff * lambda / (1 - lambda) <= tol) return v;
  }
}

namespace {

std::vector<Coord> parseKey(const std::string& key) {
  std::vector<Coord> out;
  std::size_t start = 0;
  while (start <= key.size()) {
    const std::size_t comma = key.find(',', start);
    const std::string part = key.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    Coord v = 0;
    try {
      v = std::stoll(part, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("instance table: bad coordinate in key '" + key + "'");
    }
    if (used != part.size()) throw std::invalid_argument("instance table: bad coordinate in key '" + key + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

OraclePtr parseInstance(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("instance document must be an object");
  if (j.contains("gen")) {
    if (j.at("gen") != "surface") throw std::invalid_argument("unknown generator '" + j.at("gen").dump() + "'");
    const auto d = j.at("d").get<std::size_t>();
    const auto n = j.at("n").get<Coord>();
    const auto seed = j.value("seed", std::uint64_t{0});
    return genSurfaceInstance(d, n, seed).oracle;
  }
  if (!j.contains("grid") || !j.at("grid").is_array() || j.at("grid").empty())
    throw std::invalid_argument("instance document needs 'gen' or a non-empty 'grid'");
  std::vector<Coord> hi;
  for (const auto& v : j.at("grid")) {
    const auto n = v.get<Coord>();
    if (n < 1) throw std::invalid_argument("grid extents must be positive");
    hi.push_back(n);
  }
  const std::size_t d = hi.size();
  Grid grid(Point::filled(d, 1), Point(hi));
  auto table = std::make_shared<std::unordered_map<Point, Point, PointHash>>();
  if (j.contains("table")) {
    for (const auto& [key, val] : j.at("table").items()) {
      const Point p(parseKey(key));
      if (p.dim() != d || !grid.contains(p)) throw std::invalid_argument("instance table: point " + key + " outside the grid");
      if (!val.is_array() || val.size() != d) throw std::invalid_argument("instance table: displacement of " + key + " has the wrong length");
      std::vector<Coord> h;
      for (const auto& c : val) h.push_back(c.get<Coord>());
      (*table)[p] = Point(h);
    }
  }
  return DmacOracle::make(grid, [table](const Point& x) {
    auto it = table->find(x);
    return it == table->end() ? x : x + it->second;
  });
}

}  // namespace

OraclePtr oracleFromJson(const nlohmann::json& j) {
  try {
    return parseInstance(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed instance document: ") + e.what());
  }
}

nlohmann::json oracleToJson(DmacOracle& f) {
  const Grid& g = f.grid();
  if (g.lower() != Point::filled(g.dim(), 1, g.scale()))
    throw std::invalid_argument("oracleToJson: grid must start at (1,...,1)");
  nlohmann::json j;
  j["grid"] = g.upper().coords();
  j["table"] = nlohmann::json::object();
  g.forEach([&](const Point& x) {
    const Point h = f.query(x) - x;
    if (h == Point::zeros(g.dim(), g.scale())) return;
    std::string key;
    for (std::size_t i = 0; i < x.dim(); ++i) key += (i ? "," : "") + std::to_string(x[i]);
    j["table"][key] = h.coords();
  });
  return j;
}

nlohmann::json gameToJson(const TurnBasedGame& game) {
  nlohmann::json j;
  j["lambda"] = rationalToString(game.lambda);
  j["states"] = nlohmann::json::array();
  for (const auto& st : game.states) {
    nlohmann::json js;
    js["owner"] = st.maximizer ? "max" : "min";
    js["actions"] = nlohmann::json::array();
    for (const auto& a : st.actions) {
      nlohmann::json ja;
      ja["reward"] = rationalToString(a.reward);
      ja["transitions"] = nlohmann::json::array();
      for (const auto& [t, p] : a.transitions)
        ja["transitions"].push_back(nlohmann::json::array({t, rationalToString(p)}));
      js["actions"].push_back(ja);
    }
    j["states"].push_back(js);
  }
  return j;
}

namespace {

TurnBasedGame parseGame(const nlohmann::json& j) {
  auto rat = [](const nlohmann::json& v) {
    if (v.is_string()) return parseRational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    throw std::invalid_argument("expected a rational string");
  };
  TurnBasedGame g;
  g.lambda = rat(j.at("lambda"));
  for (const auto& js : j.at("states")) {
    TurnBasedGame::State st;
    const std::string owner = js.at("owner").get<std::string>();
    if (owner != "max" && owner != "min") throw std::invalid_argument("owner must be max or min");
    st.maximizer = owner == "max";
    for (const auto& ja : js.at("actions")) {
      TurnBasedGame::Action a;
      a.reward = rat(ja.at("reward"));
      for (const auto& jt : ja.at("transitions"))
        a.transitions.push_back({jt.at(0).get<std::size_t>(), rat(jt.at(1))});
      st.actions.push_back(std::move(a));
    }
    g.states.push_back(std::move(st));
  }
  g.validate();
  return g;
}

}  // namespace

TurnBasedGame gameFromJson(const nlohmann::json& j) {
  try {
    return parseGame(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed game document: ") + e.what());
  }
}

}  // namespace dmac
