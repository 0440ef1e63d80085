#include "oowm/grpo.hpp"

#include <algorithm>
#include <cmath>

#include "oowm/error.hpp"

namespace oowm {

AdvantageBatch group_advantages(std::span<const double> rewards, double epsilon) {
  if (rewards.size() < 2)
    throw Error(ErrorKind::group_too_small,
                "a reward group needs at least 2 members, got " + std::to_string(rewards.size()));
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw Error(ErrorKind::config_error, "advantage epsilon must be a positive finite number");
  const Eigen::Map<const Eigen::ArrayXd> r(rewards.data(), static_cast<Eigen::Index>(rewards.size()));
  if (!r.isFinite().all()) throw Error(ErrorKind::non_finite_reward, "reward group contains NaN or inf");

  AdvantageBatch out;
  if (r.maxCoeff() == r.minCoeff()) {
    // A constant group carries no signal; keep it exactly zero.
    out.mu = r[0];
    out.advantages = Eigen::VectorXd::Zero(r.size());
    return out;
  }
  out.mu = r.mean();
  const Eigen::ArrayXd centered = r - out.mu;
  out.sigma = std::sqrt(centered.square().mean());
  out.advantages = (centered / (out.sigma + epsilon)).matrix();
  return out;
}

PolicyRatioSample PolicyRatioSample::from_log_probs(double log_prob, double old_log_prob,
                                                    double advantage) {
  return {std::exp(log_prob - old_log_prob), advantage};
}

double clipped_surrogate(const PolicyRatioSample& s, double clip_eps) {
  const double clipped = std::clamp(s.ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(s.ratio * s.advantage, clipped * s.advantage);
}

double grpo_loss(std::span<const PolicyRatioSample> samples, double clip_eps) {
  if (samples.empty()) throw Error(ErrorKind::empty_samples, "grpo_loss needs at least one sample");
  if (!(clip_eps > 0.0 && clip_eps < 1.0))
    throw Error(ErrorKind::invalid_clip, "clip epsilon must lie in (0, 1)");
  double sum = 0.0;
  for (const auto& s : samples) {
    if (!(s.ratio > 0.0) || !std::isfinite(s.ratio))
      throw Error(ErrorKind::invalid_ratio, "policy ratio must be positive and finite");
    if (!std::isfinite(s.advantage))
      throw Error(ErrorKind::invalid_ratio, "advantage must be finite");
    sum += clipped_surrogate(s, clip_eps);
  }
  if (sum == 0.0) return 0.0;
  return -sum / static_cast<double>(samples.size());
}

}  // namespace oowm
