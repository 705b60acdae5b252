#include "ctxml/game.hpp"

#include <cmath>
#include <numbers>

#include "ctxml/error.hpp"

namespace ctxml {

Strategy::Strategy(const std::array<std::array<double, 3>, 3>& rows) : rows_(rows) {
  for (std::size_t k = 0; k < 3; ++k) {
    double sum = 0.0;
    for (double v : rows[k]) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError("strategy entry outside [0,1] in row " + std::to_string(k));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw DomainError("strategy row " + std::to_string(k) + " does not sum to 1");
    }
  }
}

Strategy Strategy::deterministic(const ActionTriple& actions) {
  std::array<std::array<double, 3>, 3> rows{};
  for (std::size_t k = 0; k < 3; ++k) rows[k][static_cast<int>(actions[k])] = 1.0;
  return Strategy(rows);
}

Strategy Strategy::uniform() {
  constexpr double third = 1.0 / 3.0;
  Strategy s;
  for (auto& row : s.rows_) row = {third, third, third};
  return s;
}

ActionTriple parse_actions(std::string_view text) {
  if (text.size() != 3) throw DomainError("action triple must have three letters");
  ActionTriple a{};
  for (std::size_t k = 0; k < 3; ++k) {
    switch (text[k]) {
      case 'R': a[k] = Action::R; break;
      case 'P': a[k] = Action::P; break;
      case 'S': a[k] = Action::S; break;
      default: throw DomainError("unknown action '" + std::string(1, text[k]) + "'");
    }
  }
  return a;
}

std::string to_string(const ActionTriple& a) {
  static constexpr char kLetters[] = {'R', 'P', 'S'};
  std::string s;
  for (Action x : a) s.push_back(kLetters[static_cast<int>(x)]);
  return s;
}

std::array<ActionTriple, 6> extremal_action_triples() {
  return {parse_actions("RSS"), parse_actions("SRS"), parse_actions("RPR"),
          parse_actions("RRP"), parse_actions("PPS"), parse_actions("SPP")};
}

bool beats(Action a_k, Action a_l, int k, int l) {
  if (k < 0 || k > 2 || l < 0 || l > 2 || k == l) {
    throw DomainError("beats: player indices must be distinct and in {0,1,2}");
  }
  if (a_k == a_l) return static_cast<int>(a_k) == k;
  // R > S, P > R, S > P: the winner is one step ahead of the loser mod 3.
  return (static_cast<int>(a_k) + 2) % 3 == static_cast<int>(a_l);
}

std::array<int, 3> net_wins(const ActionTriple& a) {
  std::array<int, 3> l{};
  for (int k = 0; k < 3; ++k) {
    for (int m = 0; m < 3; ++m) {
      if (m == k) continue;
      if (beats(a[k], a[m], k, m)) ++l[k];
      if (beats(a[m], a[k], m, k)) --l[k];
    }
  }
  return l;
}

JointLabelDistribution payoff_distribution(const ActionTriple& a) {
  const auto l = net_wins(a);
  Behaviour b;
  for (std::size_t k = 0; k < 3; ++k) b[k] = (1.0 + l[k] / 2.0) / 2.0;
  return JointLabelDistribution::product(b);
}

JointLabelDistribution oracle_distribution(const Strategy& x) {
  JointLabelDistribution out;
  for (int a0 = 0; a0 < 3; ++a0) {
    for (int a1 = 0; a1 < 3; ++a1) {
      for (int a2 = 0; a2 < 3; ++a2) {
        const ActionTriple a{Action(a0), Action(a1), Action(a2)};
        const double w = x(0, a[0]) * x(1, a[1]) * x(2, a[2]);
        if (w == 0.0) continue;
        const auto d = payoff_distribution(a);
        for (std::size_t i = 0; i < 8; ++i) out.probs[i] += w * d.probs[i];
      }
    }
  }
  return out;
}

Behaviour oracle_marginals(const Strategy& x) {
  // Marginals of a mixture are the mixture of marginals; summing per task
  // avoids the 8-entry joint and its rounding.
  Behaviour b;
  for (int a0 = 0; a0 < 3; ++a0) {
    for (int a1 = 0; a1 < 3; ++a1) {
      for (int a2 = 0; a2 < 3; ++a2) {
        const ActionTriple a{Action(a0), Action(a1), Action(a2)};
        const double w = x(0, a[0]) * x(1, a[1]) * x(2, a[2]);
        if (w == 0.0) continue;
        const auto l = net_wins(a);
        for (std::size_t k = 0; k < 3; ++k) b[k] += w * (1.0 + l[k] / 2.0) / 2.0;
      }
    }
  }
  return b;
}

Strategy sample_strategy(Rng& rng) {
  std::array<std::array<double, 3>, 3> rows{};
  for (auto& row : rows) {
    double sum = 0.0;
    for (double& v : row) {
      v = rng.uniform01();
      sum += v;
    }
    if (sum == 0.0) {
      row = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
      continue;
    }
    for (double& v : row) v /= sum;
  }
  return Strategy(rows);
}

PayoffVector sample_payoffs(Rng& rng, const Strategy& x) {
  ActionTriple a{};
  for (std::size_t k = 0; k < 3; ++k) {
    const double u = rng.uniform01();
    const double pr = x(k, Action::R);
    const double pp = x(k, Action::P);
    a[k] = u < pr ? Action::R : (u < pr + pp ? Action::P : Action::S);
    // Guard against u landing in a zero-probability tail through rounding.
    if (x(k, a[k]) == 0.0) {
      for (int c = 2; c >= 0; --c) {
        if (x(k, Action(c)) > 0.0) { a[k] = Action(c); break; }
      }
    }
  }
  const auto l = net_wins(a);
  PayoffVector y{};
  for (std::size_t k = 0; k < 3; ++k) {
    const double p_plus = (1.0 + l[k] / 2.0) / 2.0;
    y[k] = rng.uniform01() < p_plus ? 1 : -1;
  }
  return y;
}

Dataset sample_dataset(Rng& rng, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("sample_dataset: n must be at least 1");
  Dataset ds;
  ds.seed = seed;
  ds.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Record r;
    r.strategy = sample_strategy(rng);
    r.payoffs = sample_payoffs(rng, r.strategy);
    ds.records.push_back(r);
  }
  return ds;
}

FeatureMatrix encode_features(const Strategy& x) {
  constexpr double scale = std::numbers::pi / 2.0;
  const auto& r = x.rows();
  FeatureMatrix f;
  f[0] = scale * r[0][0];
  f[1] = scale * r[1][1];
  f[2] = scale * r[2][2];
  f[3] = scale * (r[0][1] - r[0][2]);
  f[4] = scale * (r[1][2] - r[1][0]);
  f[5] = scale * (r[2][0] - r[2][1]);
  return f;
}

}  // namespace ctxml
