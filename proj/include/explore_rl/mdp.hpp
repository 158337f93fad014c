#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "explore_rl/errors.hpp"

namespace explore_rl {

using State = std::size_t;
using Action = std::size_t;

constexpr double kRowSumTolerance = 1e-12;

// Dense (state, action) table stored row-major.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t num_states, std::size_t num_actions, double fill = 0.0)
      : states_(num_states), actions_(num_actions), data_(num_states * num_actions, fill) {}

  std::size_t num_states() const noexcept { return states_; }
  std::size_t num_actions() const noexcept { return actions_; }

  double& operator()(State s, Action a) { return data_[s * actions_ + a]; }
  double operator()(State s, Action a) const { return data_[s * actions_ + a]; }

  const std::vector<double>& values() const noexcept { return data_; }
  std::vector<double>& values() noexcept { return data_; }

  // Largest entry of row s and the lowest action index attaining it.
  Action argmax(State s) const;
  double row_max(State s) const { return (*this)(s, argmax(s)); }

  bool operator==(const QTable&) const = default;

 private:
  std::size_t states_ = 0;
  std::size_t actions_ = 0;
  std::vector<double> data_;
};

// Finite discounted MDP with deterministic rewards.
struct TabularMdp {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<double> transition;  // (s, a, s') row-major, S*A*S entries
  std::vector<double> reward;      // (s, a) row-major, S*A entries
  double discount = 0.0;
  State start_state = 0;

  double p(State s, Action a, State next) const {
    return transition[(s * num_actions + a) * num_states + next];
  }
  double& p(State s, Action a, State next) {
    return transition[(s * num_actions + a) * num_states + next];
  }
  double r(State s, Action a) const { return reward[s * num_actions + a]; }
  double& r(State s, Action a) { return reward[s * num_actions + a]; }

  // Zero-filled MDP of the given shape; rows must be filled before use.
  static TabularMdp zeros(std::size_t num_states, std::size_t num_actions, double discount);
};

struct Violation {
  enum class Kind { kShape, kRowSum, kProbabilityRange, kRewardRange, kDiscount, kStartState };
  Kind kind;
  std::size_t state = 0;
  std::size_t action = 0;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate(const TabularMdp& mdp);

// Throws InvalidMdpError listing every violation when the report is non-empty.
void require_valid(const TabularMdp& mdp);

// 64-bit seed with labelled child streams. A child depends only on the
// parent value and the label.
struct Seed {
  std::uint64_t value = 0;

  Seed child(std::string_view label) const;
  Seed child(std::uint64_t index) const;

  bool operator==(const Seed&) const = default;
};

// Deterministic random stream. Uniforms are built from raw mt19937_64 output
// so draws are identical across standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(Seed seed) : engine_(seed.value) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  // Exponential(1) draw.
  double exponential();

 private:
  std::mt19937_64 engine_;
};

struct Transition {
  State next_state;
  double reward;
};

Transition sample_transition(const TabularMdp& mdp, State s, Action a, RandomStream& rng);

}  // namespace explore_rl
