#include "camset/ransac.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace camset {

namespace {

constexpr int kSampleSize = kMinDltCorrespondences;

// Draws `count` distinct indices in [0, n) from the given stream state.
std::vector<int> sample_indices(std::uint64_t& state, int n, int count) {
  std::vector<int> picked;
  picked.reserve(count);
  while (static_cast<int>(picked.size()) < count) {
    const int candidate = static_cast<int>(splitmix64(state) % static_cast<std::uint64_t>(n));
    if (std::find(picked.begin(), picked.end(), candidate) == picked.end()) {
      picked.push_back(candidate);
    }
  }
  return picked;
}

template <typename Model>
int score_model(std::span<const RayPointCorrespondence> correspondences,
                const Model& model, double threshold,
                std::vector<bool>* mask) {
  int count = 0;
  mask->assign(correspondences.size(), false);
  for (std::size_t i = 0; i < correspondences.size(); ++i) {
    if (prediction_angle(correspondences[i], model) < threshold) {
      (*mask)[i] = true;
      ++count;
    }
  }
  return count;
}

std::vector<RayPointCorrespondence> select(
    std::span<const RayPointCorrespondence> correspondences,
    const std::vector<bool>& mask) {
  std::vector<RayPointCorrespondence> subset;
  for (std::size_t i = 0; i < correspondences.size(); ++i) {
    if (mask[i]) {
      subset.push_back(correspondences[i]);
    }
  }
  return subset;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  // Fixed-increment mix; identical sequences on every platform, which keeps
  // estimates reproducible from a seed alone.
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void RansacConfig::validate() const {
  if (max_iterations < 1) {
    throw InvalidConfig("ransac max_iterations must be positive");
  }
  if (!(inlier_angle_threshold > 0.0) || !(inlier_angle_threshold < M_PI / 2.0)) {
    throw InvalidConfig("ransac inlier_angle_threshold must lie in (0, pi/2)");
  }
  if (min_inliers < kSampleSize) {
    throw InvalidConfig("ransac min_inliers must be at least the sample size");
  }
}

RansacResult ransac_estimate(std::span<const RayPointCorrespondence> correspondences,
                             const RansacConfig& config) {
  config.validate();
  const int n = static_cast<int>(correspondences.size());
  if (n < config.min_inliers) {
    throw NoConsensus("only " + std::to_string(n) +
                      " correspondences available, below the inlier minimum");
  }

  std::optional<Sim3Transform> best;
  std::vector<bool> best_mask;
  int best_count = 0;
  std::vector<bool> mask;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    std::uint64_t state = config.rng_seed + static_cast<std::uint64_t>(iter);
    const std::vector<int> idx = sample_indices(state, n, kSampleSize);
    std::vector<RayPointCorrespondence> sample;
    sample.reserve(kSampleSize);
    for (int i : idx) {
      sample.push_back(correspondences[i]);
    }
    Sim3Transform model;
    try {
      model = estimate_pose_dlt(sample).first;
    } catch (const Error&) {
      continue;
    }
    const int count = score_model(correspondences, model,
                                  config.inlier_angle_threshold, &mask);
    if (count > best_count) {
      best_count = count;
      best = model;
      best_mask = mask;
    }
  }
  if (!best || best_count < config.min_inliers) {
    throw NoConsensus("best consensus of " + std::to_string(best_count) +
                      " inliers is below the minimum of " +
                      std::to_string(config.min_inliers));
  }

  RansacResult result;
  result.transform = *best;
  result.inlier_mask = best_mask;
  result.inlier_count = best_count;
  // Refit on the consensus set; keep the sample model if the refit collapses.
  try {
    auto [refit, diag] = estimate_pose_dlt(select(correspondences, best_mask));
    std::vector<bool> refit_mask;
    const int refit_count = score_model(correspondences, refit,
                                        config.inlier_angle_threshold, &refit_mask);
    if (refit_count >= config.min_inliers) {
      result.transform = refit;
      result.inlier_mask = std::move(refit_mask);
      result.inlier_count = refit_count;
      result.diagnostics = diag;
    }
  } catch (const Error&) {
  }
  return result;
}

SingleCameraRansacResult ransac_estimate_single_camera(
    std::span<const RayPointCorrespondence> correspondences,
    const RansacConfig& config) {
  config.validate();
  const int n = static_cast<int>(correspondences.size());
  if (n < config.min_inliers) {
    throw NoConsensus("only " + std::to_string(n) +
                      " correspondences available, below the inlier minimum");
  }

  std::optional<CameraPose> best;
  std::vector<bool> best_mask;
  int best_count = 0;
  std::vector<bool> mask;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    std::uint64_t state = config.rng_seed + static_cast<std::uint64_t>(iter);
    const std::vector<int> idx = sample_indices(state, n, kSampleSize);
    std::vector<RayPointCorrespondence> sample;
    sample.reserve(kSampleSize);
    for (int i : idx) {
      sample.push_back(correspondences[i]);
    }
    CameraPose model;
    try {
      model = estimate_single_camera_pose(sample);
    } catch (const Error&) {
      continue;
    } catch (const std::invalid_argument&) {
      continue;
    }
    const int count = score_model(correspondences, model,
                                  config.inlier_angle_threshold, &mask);
    if (count > best_count) {
      best_count = count;
      best = model;
      best_mask = mask;
    }
  }
  if (!best || best_count < config.min_inliers) {
    throw NoConsensus("best consensus of " + std::to_string(best_count) +
                      " inliers is below the minimum of " +
                      std::to_string(config.min_inliers));
  }

  SingleCameraRansacResult result;
  result.pose = *best;
  result.inlier_mask = best_mask;
  result.inlier_count = best_count;
  try {
    const CameraPose refit =
        estimate_single_camera_pose(select(correspondences, best_mask));
    std::vector<bool> refit_mask;
    const int refit_count = score_model(correspondences, refit,
                                        config.inlier_angle_threshold, &refit_mask);
    if (refit_count >= config.min_inliers) {
      result.pose = refit;
      result.inlier_mask = std::move(refit_mask);
      result.inlier_count = refit_count;
    }
  } catch (const Error&) {
  } catch (const std::invalid_argument&) {
  }
  return result;
}

}  // namespace camset
