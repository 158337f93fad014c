#include "explore_rl/env_zoo.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace explore_rl {

namespace {

// Fills `row` (length S) with a Dirichlet(1, ..., 1) distribution supported on
// `branching` distinct uniformly chosen entries.
void sparse_dirichlet_row(double* row, std::size_t num_states, std::size_t branching, RandomStream& rng) {
  std::vector<std::size_t> index(num_states);
  std::iota(index.begin(), index.end(), 0);
  for (std::size_t i = 0; i < branching; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(num_states - i));
    std::swap(index[i], index[j]);
  }
  double total = 0.0;
  std::vector<double> weight(branching);
  for (std::size_t i = 0; i < branching; ++i) {
    weight[i] = rng.exponential();
    total += weight[i];
  }
  for (std::size_t n = 0; n < num_states; ++n) row[n] = 0.0;
  for (std::size_t i = 0; i < branching; ++i) row[index[i]] = weight[i] / total;
}

}  // namespace

ValidationReport validate(const FiniteHorizonMdp& fh) {
  ValidationReport report;
  const std::size_t S = fh.num_states, A = fh.num_actions, H = fh.horizon;
  if (S == 0 || A == 0 || H == 0 || fh.reward.size() != H * S * A || fh.transition.size() != H * S * A * S) {
    report.push_back({Violation::Kind::kShape, 0, 0, "finite-horizon table sizes do not match dimensions"});
    return report;
  }
  for (std::size_t h = 0; h < H; ++h) {
    for (State s = 0; s < S; ++s) {
      for (Action a = 0; a < A; ++a) {
        double sum = 0.0;
        bool in_range = true;
        for (State n = 0; n < S; ++n) {
          const double p = fh.p(h, s, a, n);
          in_range = in_range && p >= 0.0 && p <= 1.0;
          sum += p;
        }
        const std::string where = "step " + std::to_string(h + 1) + " (" + std::to_string(s) + ", " +
                                  std::to_string(a) + ")";
        if (!in_range) report.push_back({Violation::Kind::kProbabilityRange, s, a, where + " probability outside [0, 1]"});
        if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
          report.push_back({Violation::Kind::kRowSum, s, a, where + " row does not sum to 1"});
        }
        const double r = fh.r(h, s, a);
        if (!(r >= 0.0 && r <= 1.0)) report.push_back({Violation::Kind::kRewardRange, s, a, where + " reward outside [0, 1]"});
      }
    }
  }
  if (fh.start_state >= S) report.push_back({Violation::Kind::kStartState, fh.start_state, 0, "start_state out of range"});
  return report;
}

TabularMdp hard_instance(double epsilon, double gamma) {
  if (!(epsilon > 0.0 && epsilon < 0.1)) throw UsageError("hard_instance: epsilon must lie in (0, 1/10)");
  if (!(gamma > 0.5 && gamma < 1.0)) throw UsageError("hard_instance: gamma must lie in (1/2, 1)");
  using namespace hard;
  auto mdp = TabularMdp::zeros(3, 2, gamma);
  mdp.p(kA, kX, kB) = 1.0;
  mdp.p(kA, kY, kC) = 10.0 * epsilon;
  mdp.p(kA, kY, kB) = 1.0 - mdp.p(kA, kY, kC);
  for (Action a : {kX, kY}) {
    mdp.p(kB, a, kA) = 1.0;
    mdp.p(kC, a, kA) = 1.0;
    mdp.r(kA, a) = 1.0;
    mdp.r(kB, a) = 1.0;
    mdp.r(kC, a) = 0.0;
  }
  mdp.start_state = kA;
  return mdp;
}

TabularMdp random_mdp(std::size_t num_states, std::size_t num_actions, double gamma, std::size_t branching,
                      Seed seed) {
  if (num_states == 0 || num_actions == 0) throw UsageError("random_mdp: S and A must be >= 1");
  if (branching == 0 || branching > num_states) throw UsageError("random_mdp: branching must lie in [1, S]");
  RandomStream rng(seed.child("random_mdp"));
  auto mdp = TabularMdp::zeros(num_states, num_actions, gamma);
  for (State s = 0; s < num_states; ++s) {
    for (Action a = 0; a < num_actions; ++a) {
      sparse_dirichlet_row(&mdp.p(s, a, 0), num_states, branching, rng);
      mdp.r(s, a) = rng.uniform();
    }
  }
  return mdp;
}

TabularMdp chain_mdp(std::size_t n, double gamma) {
  if (n < 2) throw UsageError("chain_mdp: n must be >= 2");
  auto mdp = TabularMdp::zeros(n, 2, gamma);
  for (State s = 0; s < n; ++s) {
    mdp.p(s, 0, s + 1 < n ? s + 1 : s) = 1.0;
    mdp.p(s, 1, 0) = 1.0;
  }
  mdp.r(n - 1, 0) = 1.0;
  return mdp;
}

FiniteHorizonMdp random_finite_horizon(std::size_t num_states, std::size_t num_actions, std::size_t horizon,
                                       std::size_t branching, Seed seed) {
  if (num_states == 0 || num_actions == 0 || horizon == 0) {
    throw UsageError("random_finite_horizon: S, A and H must be >= 1");
  }
  if (branching == 0 || branching > num_states) throw UsageError("random_finite_horizon: branching must lie in [1, S]");
  RandomStream rng(seed.child("random_finite_horizon"));
  FiniteHorizonMdp fh;
  fh.num_states = num_states;
  fh.num_actions = num_actions;
  fh.horizon = horizon;
  fh.reward.assign(horizon * num_states * num_actions, 0.0);
  fh.transition.assign(horizon * num_states * num_actions * num_states, 0.0);
  for (std::size_t h = 0; h < horizon; ++h) {
    for (State s = 0; s < num_states; ++s) {
      for (Action a = 0; a < num_actions; ++a) {
        sparse_dirichlet_row(&fh.p(h, s, a, 0), num_states, branching, rng);
        fh.r(h, s, a) = rng.uniform();
      }
    }
  }
  fh.start_state = 0;
  return fh;
}

TabularMdp lift_finite_horizon(const FiniteHorizonMdp& fh) {
  const auto report = validate(fh);
  if (!report.empty()) throw InvalidMdpError("lift_finite_horizon: " + report.front().message);
  const std::size_t S = fh.num_states, A = fh.num_actions, H = fh.horizon;
  const double gamma = 1.0 - 1.0 / static_cast<double>(H);
  auto mdp = TabularMdp::zeros(S * H, A, gamma);
  for (std::size_t h = 1; h <= H; ++h) {
    const double scale = std::pow(gamma, static_cast<double>(H - h + 1));
    for (State s = 0; s < S; ++s) {
      const State from = lifted_index(S, s, h);
      for (Action a = 0; a < A; ++a) {
        if (h == H) {
          mdp.r(from, a) = 0.0;
          mdp.p(from, a, lifted_index(S, fh.start_state, 1)) = 1.0;
          continue;
        }
        mdp.r(from, a) = scale * fh.r(h - 1, s, a);
        for (State n = 0; n < S; ++n) mdp.p(from, a, lifted_index(S, n, h + 1)) = fh.p(h - 1, s, a, n);
      }
    }
  }
  mdp.start_state = lifted_index(S, fh.start_state, 1);
  return mdp;
}

StepPolicy project_policy(const Policy& bar_policy, std::size_t num_states, std::size_t horizon) {
  if (bar_policy.action.size() != num_states * horizon) {
    throw UsageError("project_policy: policy size must equal S * H");
  }
  return StepPolicy{num_states, horizon, bar_policy.action};
}

Policy lift_policy(const StepPolicy& policy) {
  if (policy.action.size() != policy.num_states * policy.horizon) {
    throw UsageError("lift_policy: policy size must equal S * H");
  }
  return Policy{policy.action};
}

}  // namespace explore_rl
