#include "explore_rl/mdp.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace explore_rl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string cell_name(std::size_t s, std::size_t a) {
  return "(" + std::to_string(s) + ", " + std::to_string(a) + ")";
}

}  // namespace

Action QTable::argmax(State s) const {
  Action best = 0;
  double best_value = (*this)(s, 0);
  for (Action a = 1; a < actions_; ++a) {
    if ((*this)(s, a) > best_value) {
      best_value = (*this)(s, a);
      best = a;
    }
  }
  return best;
}

TabularMdp TabularMdp::zeros(std::size_t num_states, std::size_t num_actions, double discount) {
  TabularMdp mdp;
  mdp.num_states = num_states;
  mdp.num_actions = num_actions;
  mdp.discount = discount;
  mdp.transition.assign(num_states * num_actions * num_states, 0.0);
  mdp.reward.assign(num_states * num_actions, 0.0);
  return mdp;
}

ValidationReport validate(const TabularMdp& mdp) {
  ValidationReport report;
  const std::size_t S = mdp.num_states;
  const std::size_t A = mdp.num_actions;
  if (S == 0 || A == 0 || mdp.transition.size() != S * A * S || mdp.reward.size() != S * A) {
    report.push_back({Violation::Kind::kShape, 0, 0,
                      "table sizes do not match num_states=" + std::to_string(S) +
                          ", num_actions=" + std::to_string(A)});
    return report;
  }
  for (State s = 0; s < S; ++s) {
    for (Action a = 0; a < A; ++a) {
      double sum = 0.0;
      bool in_range = true;
      for (State n = 0; n < S; ++n) {
        const double p = mdp.p(s, a, n);
        in_range = in_range && p >= 0.0 && p <= 1.0;
        sum += p;
      }
      if (!in_range) {
        report.push_back({Violation::Kind::kProbabilityRange, s, a,
                          "transition row " + cell_name(s, a) + " has an entry outside [0, 1]"});
      }
      if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", sum);
        report.push_back({Violation::Kind::kRowSum, s, a,
                          "transition row " + cell_name(s, a) + " sums to " + buf});
      }
      const double r = mdp.r(s, a);
      if (!(r >= 0.0 && r <= 1.0)) {
        report.push_back({Violation::Kind::kRewardRange, s, a, "reward " + cell_name(s, a) + " outside [0, 1]"});
      }
    }
  }
  if (!(mdp.discount >= 0.0 && mdp.discount < 1.0)) {
    report.push_back({Violation::Kind::kDiscount, 0, 0, "discount must lie in [0, 1)"});
  }
  if (mdp.start_state >= S) {
    report.push_back({Violation::Kind::kStartState, mdp.start_state, 0, "start_state out of range"});
  }
  return report;
}

void require_valid(const TabularMdp& mdp) {
  const auto report = validate(mdp);
  if (report.empty()) return;
  std::ostringstream msg;
  msg << "invalid MDP:";
  for (const auto& v : report) msg << "\n  " << v.message;
  throw InvalidMdpError(msg.str());
}

Seed Seed::child(std::string_view label) const { return Seed{splitmix64(value ^ splitmix64(fnv1a(label)))}; }

Seed Seed::child(std::uint64_t index) const { return child(std::to_string(index)); }

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n == 0) throw UsageError("RandomStream::below requires n > 0");
  // Rejection sampling keeps the draw unbiased and portable.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double RandomStream::exponential() {
  // 1 - u lies in (0, 1], so the log is finite.
  return -std::log(1.0 - uniform());
}

Transition sample_transition(const TabularMdp& mdp, State s, Action a, RandomStream& rng) {
  if (s >= mdp.num_states || a >= mdp.num_actions) {
    throw UsageError("sample_transition: (s, a) = " + cell_name(s, a) + " out of range");
  }
  const double u = rng.uniform();
  double cumulative = 0.0;
  State last_supported = 0;
  for (State n = 0; n < mdp.num_states; ++n) {
    const double p = mdp.p(s, a, n);
    if (p <= 0.0) continue;
    last_supported = n;
    cumulative += p;
    if (u < cumulative) return {n, mdp.r(s, a)};
  }
  // Row sums can fall short of 1 by rounding.
  return {last_supported, mdp.r(s, a)};
}

}  // namespace explore_rl
