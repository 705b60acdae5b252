#pragma once

// Three-player rock-paper-scissors variant with per-player special actions.
//
// Player indices are 0-based throughout (player 0 is "Player 1"). Player k's
// special action is Action(k): R for player 0, P for player 1, S for player 2.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ctxml/rng.hpp"
#include "ctxml/types.hpp"

namespace ctxml {

enum class Action : int { R = 0, P = 1, S = 2 };

using ActionTriple = std::array<Action, 3>;
using PayoffVector = std::array<int, 3>;

/// Row-stochastic 3x3 matrix; row k is (P(R), P(P), P(S)) for player k.
class Strategy {
 public:
  static constexpr double kRowSumTolerance = 1e-12;

  Strategy() = default;
  /// Throws DomainError unless every entry is in [0,1] and every row sums to
  /// 1 within kRowSumTolerance. Rows are never renormalised.
  explicit Strategy(const std::array<std::array<double, 3>, 3>& rows);

  /// Deterministic strategy in which player k plays actions[k].
  static Strategy deterministic(const ActionTriple& actions);
  static Strategy uniform();

  double operator()(std::size_t player, Action a) const {
    return rows_[player][static_cast<int>(a)];
  }
  const std::array<std::array<double, 3>, 3>& rows() const { return rows_; }

 private:
  std::array<std::array<double, 3>, 3> rows_{{{1, 0, 0}, {1, 0, 0}, {1, 0, 0}}};
};

struct Record {
  Strategy strategy;
  PayoffVector payoffs{};
};

struct Dataset {
  std::uint64_t seed = 0;
  std::vector<Record> records;
};

/// Parses "RSS"-style strings. Throws DomainError on anything else.
ActionTriple parse_actions(std::string_view text);
std::string to_string(const ActionTriple& a);

/// The deterministic action triples whose behaviours are v1..v6 of the bias
/// hexagon, in that order: RSS, SRS, RPR, RRP, PPS, SPP.
std::array<ActionTriple, 6> extremal_action_triples();

/// True iff player k playing a_k beats player l playing a_l.
bool beats(Action a_k, Action a_l, int k, int l);

/// Number of players k beat minus number of players that beat k.
std::array<int, 3> net_wins(const ActionTriple& a);

/// Independent +-1 payoffs with E[Y_k] = net_wins(a)_k / 2.
JointLabelDistribution payoff_distribution(const ActionTriple& a);

/// Exact label distribution for a mixed strategy: mixture of
/// payoff_distribution over all 27 action triples.
JointLabelDistribution oracle_distribution(const Strategy& x);

/// Per-task P(+1 | x), the marginals of oracle_distribution.
Behaviour oracle_marginals(const Strategy& x);

/// Each row is (r1, r2, r3) / sum(r) with r_i ~ U[0,1].
Strategy sample_strategy(Rng& rng);

/// Draws actions from x, then payoffs given the actions.
PayoffVector sample_payoffs(Rng& rng, const Strategy& x);

/// n records of (sample_strategy, sample_payoffs). The dataset's seed field
/// is informational; randomness comes from rng only.
Dataset sample_dataset(Rng& rng, std::size_t n, std::uint64_t seed = 0);

/// (pi/2) * [(P(R), P(P)-P(S)); (P(P), P(S)-P(R)); (P(S), P(R)-P(P))].
FeatureMatrix encode_features(const Strategy& x);

}  // namespace ctxml
