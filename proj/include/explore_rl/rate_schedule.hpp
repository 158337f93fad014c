#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace explore_rl {

// Constants in the bonus and in the optimism width.
inline constexpr double kBonusConstant = 5.656854249492380195;   // 4 * sqrt(2)
inline constexpr double kWidthConstant = 16.970562748477140585;  // 12 * sqrt(2)

// Parameter chain of the UCB learner, derived from the target accuracy.
struct DerivedParams {
  double epsilon = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double epsilon2 = 0.0;            // epsilon / 3
  std::uint64_t r_horizon = 0;      // R
  std::uint64_t l_levels = 0;       // floor(log2 R)
  double xi_l = 0.0;                // xi at level L
  std::uint64_t m_segments = 0;     // M
  double epsilon1 = 0.0;
  double h_rate = 0.0;              // real-valued H in alpha_k = (H+1)/(H+k)
  double c2 = kBonusConstant;
  double c3 = kWidthConstant;
};

// Requires epsilon > 0, 1/2 < gamma < 1 and 0 < delta < 1.
DerivedParams derive_params(double epsilon, double gamma, double delta);

// alpha_k = (h + 1) / (h + k), k >= 1.
double alpha(std::uint64_t k, double h);

// Weights alpha_t^0 .. alpha_t^t of the first t learning-rate steps.
std::vector<double> alpha_weights(std::uint64_t t, double h);

// iota(k) = ln(S * A * (k + 1)(k + 2) / delta).
double iota(std::uint64_t k, std::size_t num_states, std::size_t num_actions, double delta);

// b_k = c2 / (1 - gamma) * sqrt(h * iota(k) / k).
double bonus(std::uint64_t k, double h, std::size_t num_states, std::size_t num_actions, double delta,
             double gamma);

// beta_t = c3 / (1 - gamma) * sqrt(h * iota(t) / t); equals 3 * bonus(t, ...).
double beta(std::uint64_t t, double h, std::size_t num_states, std::size_t num_actions, double delta,
            double gamma);

}  // namespace explore_rl

namespace explore_rl {

// Incremental alpha_t^i weights via alpha_t^i = (1 - alpha_t) alpha_{t-1}^i.
class AlphaWeights {
 public:
  explicit AlphaWeights(double h);

  // Moves from t to t + 1.
  void advance();

  std::uint64_t t() const noexcept { return weights_.size() - 1; }
  double h() const noexcept { return h_; }
  // weights()[i] = alpha_t^i for i = 0..t.
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  double h_;
  std::vector<double> weights_;
};

// sum_{t=i}^{last} alpha_t^i.
double alpha_column_sum(std::uint64_t i, double h, std::uint64_t last);

}  // namespace explore_rl
