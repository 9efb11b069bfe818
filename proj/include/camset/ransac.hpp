#pragma once

#include "camset/dlt.hpp"
#include "camset/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace camset {

struct RansacConfig {
  int max_iterations = 256;
  double inlier_angle_threshold = 0.01;  // radians
  int min_inliers = 12;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct RansacResult {
  Sim3Transform transform;
  std::vector<bool> inlier_mask;
  int inlier_count = 0;
  DltDiagnostics diagnostics;  // of the final refit
};

struct SingleCameraRansacResult {
  CameraPose pose;
  std::vector<bool> inlier_mask;
  int inlier_count = 0;
};

// Robust camera set pose estimation: repeatedly fit the DLT on a minimal
// 6-sample, score by angular ray error, keep the best consensus and refit on
// its inliers. Deterministic for a fixed rng_seed: every iteration draws from
// its own generator derived from the seed, so the schedule cannot change the
// result. Throws NoConsensus when no model reaches min_inliers.
RansacResult ransac_estimate(std::span<const RayPointCorrespondence> correspondences,
                             const RansacConfig& config);

// Same loop around estimate_single_camera_pose for rays with a common center.
SingleCameraRansacResult ransac_estimate_single_camera(
    std::span<const RayPointCorrespondence> correspondences,
    const RansacConfig& config);

// SplitMix64 stream; used to derive per-iteration RANSAC seeds.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace camset
