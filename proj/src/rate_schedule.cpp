#include "explore_rl/rate_schedule.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "explore_rl/errors.hpp"

namespace explore_rl {

DerivedParams derive_params(double epsilon, double gamma, double delta) {
  if (!(epsilon > 0.0)) throw UsageError("derive_params: epsilon must be positive");
  if (!(gamma > 0.5 && gamma < 1.0)) throw UsageError("derive_params: gamma must lie in (1/2, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw UsageError("derive_params: delta must lie in (0, 1)");

  DerivedParams p;
  p.epsilon = epsilon;
  p.gamma = gamma;
  p.delta = delta;
  p.epsilon2 = epsilon / 3.0;

  const double one_minus = 1.0 - gamma;
  const double log_horizon = std::log(1.0 / one_minus);
  const double r = std::ceil(std::log(1.0 / (p.epsilon2 * one_minus)) / one_minus);
  p.r_horizon = r < 1.0 ? 1 : static_cast<std::uint64_t>(r);
  p.l_levels = static_cast<std::uint64_t>(std::bit_width(p.r_horizon)) - 1;
  p.xi_l = p.epsilon2 / (std::ldexp(1.0, static_cast<int>(p.l_levels) + 2) * log_horizon);
  const double m = std::ceil(2.0 * std::log2(1.0 / (p.xi_l * one_minus)));
  p.m_segments = m > 10.0 ? static_cast<std::uint64_t>(m) : 10;
  p.epsilon1 = epsilon / (24.0 * static_cast<double>(p.r_horizon) * static_cast<double>(p.m_segments) * log_horizon);
  p.h_rate = std::log(1.0 / (one_minus * p.epsilon1)) / std::log(1.0 / gamma);
  return p;
}

double alpha(std::uint64_t k, double h) {
  if (k == 0) throw UsageError("alpha: k must be >= 1");
  if (!(h > 0.0)) throw UsageError("alpha: h must be positive");
  return (h + 1.0) / (h + static_cast<double>(k));
}

AlphaWeights::AlphaWeights(double h) : h_(h), weights_{1.0} {
  if (!(h > 0.0)) throw UsageError("AlphaWeights: h must be positive");
}

void AlphaWeights::advance() {
  const std::uint64_t next = t() + 1;
  const double a = alpha(next, h_);
  for (double& w : weights_) w *= (1.0 - a);
  weights_.push_back(a);
}

std::vector<double> alpha_weights(std::uint64_t t, double h) {
  AlphaWeights w(h);
  for (std::uint64_t k = 0; k < t; ++k) w.advance();
  return w.weights();
}

double alpha_column_sum(std::uint64_t i, double h, std::uint64_t last) {
  if (i == 0) throw UsageError("alpha_column_sum: i must be >= 1");
  double term = alpha(i, h);
  double sum = 0.0;
  for (std::uint64_t t = i; t <= last; ++t) {
    if (t > i) term *= 1.0 - alpha(t, h);
    sum += term;
  }
  return sum;
}

double iota(std::uint64_t k, std::size_t num_states, std::size_t num_actions, double delta) {
  const double kk = static_cast<double>(k);
  return std::log(static_cast<double>(num_states) * static_cast<double>(num_actions) * (kk + 1.0) * (kk + 2.0) /
                  delta);
}

double bonus(std::uint64_t k, double h, std::size_t num_states, std::size_t num_actions, double delta,
             double gamma) {
  if (k == 0) throw UsageError("bonus: k must be >= 1");
  return kBonusConstant / (1.0 - gamma) *
         std::sqrt(h * iota(k, num_states, num_actions, delta) / static_cast<double>(k));
}

double beta(std::uint64_t t, double h, std::size_t num_states, std::size_t num_actions, double delta,
            double gamma) {
  if (t == 0) throw UsageError("beta: t must be >= 1");
  return kWidthConstant / (1.0 - gamma) *
         std::sqrt(h * iota(t, num_states, num_actions, delta) / static_cast<double>(t));
}

}  // namespace explore_rl
