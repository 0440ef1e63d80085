#pragma once

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

namespace oowm {

inline constexpr double kDefaultAdvantageEpsilon = 1e-4;
inline constexpr double kDefaultClipEpsilon = 0.2;

struct RewardGroup {
  std::string group_id;
  std::vector<double> rewards;
  double epsilon = kDefaultAdvantageEpsilon;
};

struct AdvantageBatch {
  Eigen::VectorXd advantages;
  double mu = 0.0;
  double sigma = 0.0;  // population standard deviation
};

/// A_i = (r_i - mu) / (sigma + epsilon) with the population standard deviation.
/// Throws group_too_small for fewer than two rewards and non_finite_reward
/// for NaN/inf entries.
AdvantageBatch group_advantages(std::span<const double> rewards,
                                double epsilon = kDefaultAdvantageEpsilon);

inline AdvantageBatch group_advantages(const RewardGroup& group) {
  return group_advantages(group.rewards, group.epsilon);
}

struct PolicyRatioSample {
  double ratio = 1.0;  // pi_theta(y|x) / pi_theta_old(y|x)
  double advantage = 0.0;

  static PolicyRatioSample from_log_probs(double log_prob, double old_log_prob, double advantage);
};

/// Clipped surrogate for one sample: min(ratio A, clip(ratio, 1-eps, 1+eps) A).
double clipped_surrogate(const PolicyRatioSample& sample, double clip_eps = kDefaultClipEpsilon);

/// -(1/G) * sum of clipped surrogates. Throws empty_samples, invalid_clip
/// (clip_eps outside (0, 1)) or invalid_ratio (non-positive or non-finite).
double grpo_loss(std::span<const PolicyRatioSample> samples, double clip_eps = kDefaultClipEpsilon);

}  // namespace oowm
