#pragma once

/// @file instances.hpp
/// Instance generators: violation-free instances built from random monotone
/// surfaces with gradient at most one, local violation injection, and
/// turn-based discounted games exposed as continuous monotone contractions.

#include <nlohmann/json.hpp>
#include <cstdint>
#include <vector>

#include "dmac/core.hpp"
#include "dmac/reductions.hpp"

namespace dmac {

/// One plateau term of a surface: b + min(c, min_{j in mask} (p_j - a_j)),
/// where p ranges over the coordinates of the full point other than the
/// surface's own dimension. An empty mask gives the constant b + c.
struct PlateauTerm {
  Coord b = 0;
  Coord c = 0;
  std::vector<std::size_t> mask;  ///< indices into the full point
  std::vector<Coord> a;           ///< one offset per mask entry
};

/// Surfaces s_i(p) = clamp(max_k term_k(p), lo_i, hi_i) for every dimension.
/// Each surface is monotone with gradient at most one.
struct SurfaceSpec {
  Grid grid;
  std::vector<std::vector<PlateauTerm>> terms;  ///< per dimension
  std::vector<Coord> clampLo;
  std::vector<Coord> clampHi;

  /// The surface height of dimension i at x (x_i itself is ignored).
  Coord height(std::size_t i, const Point& x) const;
};

/// The oracle f_i(x) = x_i + sign(s_i(x) - x_i).
OraclePtr surfaceOracle(const SurfaceSpec& spec);

/// A surface spec with constant surfaces at the given height.
SurfaceSpec constantSurfaces(std::size_t d, Coord lo, Coord hi, Coord height);

struct SurfaceInstance {
  OraclePtr oracle;
  SurfaceSpec spec;
  /// The least fixed point, from Kleene iteration at generation time.
  Point lfp;
};

/// A random violation-free 1DUnique instance on {1..n}^d whose surfaces stay
/// within {2..n-1}, so boundary points move strictly inward.
SurfaceInstance genSurfaceInstance(std::size_t d, Coord n, std::uint64_t seed);

/// Wrap a spec into an instance and record its least fixed point.
SurfaceInstance makeSurfaceInstance(const SurfaceSpec& spec);

enum class ViolationKind { Mono, NonExp };

struct InjectedInstance {
  OraclePtr oracle;
  /// The pair witnessing the injected violation.
  Solution witness;
  /// The overridden point and dimension.
  Point overridden;
  std::size_t dim = 0;
};

/// Copy f and override a single coordinate at one point, chosen as close to
/// location as possible, so that the recorded pair is a violation of the
/// requested kind. Raises std::invalid_argument if no suitable point exists.
InjectedInstance injectViolation(const OraclePtr& f, ViolationKind kind, const Point& location,
                                 std::uint64_t seed);

/// A turn-based discounted game. Each state is controlled by one player who
/// picks an action; the action yields a reward in [0,1] and a distribution
/// over successor states.
struct TurnBasedGame {
  struct Action {
    Rational reward;
    std::vector<std::pair<std::size_t, Rational>> transitions;
  };
  struct State {
    bool maximizer = true;
    std::vector<Action> actions;
  };
  std::vector<State> states;
  Rational lambda;

  /// Throws std::invalid_argument if distributions or rewards are malformed.
  void validate() const;
};

/// A random game with the given number of states and small denominators.
TurnBasedGame genTurnBasedGame(std::size_t numStates, std::uint64_t seed);

/// g(v)_s = opt_a (1-λ) r(s,a) + λ Σ p(s'|s,a) v_{s'}.
ContinuousOracle shapleyOperator(const TurnBasedGame& game, const Rational& eps);

/// Value iteration in floating point until successive iterates differ by at
/// most tol.
std::vector<double> valueIteration(const TurnBasedGame& game, double tol);

/// Read an instance document: either a generator spec
/// {"gen":"surface","d":3,"n":64,"seed":7} or an explicit displacement table
/// {"grid":[n0,n1,...],"table":{"x0,x1,...":[h0,h1,...],...}} on the grid
/// {1..n0} x {1..n1} x ...; points missing from the table do not move.
/// Raises std::invalid_argument on malformed documents.
OraclePtr oracleFromJson(const nlohmann::json& j);

/// The explicit-table document of an oracle on a grid with lower corner
/// (1,...,1), listing every point with a non-zero displacement.
nlohmann::json oracleToJson(DmacOracle& f);

nlohmann::json gameToJson(const TurnBasedGame& game);
TurnBasedGame gameFromJson(const nlohmann::json& j);

}  // namespace dmac
