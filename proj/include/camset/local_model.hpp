#pragma once

#include "camset/match.hpp"
#include "camset/optim.hpp"
#include "camset/types.hpp"

#include <span>
#include <vector>

namespace camset {

// A locally reconstructed camera set: cameras with intrinsics and poses in
// the set frame, reconstructed 3D points, and pixel observations. Each
// observation may carry the descriptor extracted at that pixel; descriptors
// are what the localization pipeline matches against the scene.
struct CameraSetModel {
  struct Camera {
    CameraIntrinsics intrinsics;
    CameraPose pose;
  };
  struct Observation {
    int camera = 0;
    int point = 0;
    Vec2 pixel = Vec2::Zero();
    Descriptor descriptor;  // may be empty
  };

  std::vector<Camera> cameras;
  std::vector<Vec3> points;
  std::vector<Observation> observations;
  int target_camera = 0;

  // Checks index ranges, the two-observation minimum per point, and the
  // target camera index.
  void validate() const;
};

struct TriangulationResult {
  Vec3 point = Vec3::Zero();
  // Set when the point projects behind any of the rays.
  bool behind_ray = false;
};

inline constexpr double kDefaultTriangulationMinAngle = 1e-3;  // radians

// The point minimizing the summed squared orthogonal distance to all rays
// (closed-form 3x3 solve); for two rays this is the midpoint of the common
// perpendicular. Throws DegenerateRays when the widest pairwise angle between
// directions stays below min_angle.
TriangulationResult triangulate(std::span<const Ray> rays,
                                double min_angle = kDefaultTriangulationMinAngle);

struct BundleAdjustSummary {
  CameraSetModel model;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
};

// Ray-error bundle adjustment: minimizes the summed squared ray reprojection
// error over camera poses and points, intrinsics fixed. Camera 0 is the
// gauge anchor and the distance between cameras 0 and 1 pins the scale: the
// adjusted model is rescaled about camera 0 so that distance is restored.
BundleAdjustSummary bundle_adjust(const CameraSetModel& model, const LmConfig& config);

// The bundle problem behind bundle_adjust, exposed for diagnostics.
RayBundleProblem make_bundle_problem(const CameraSetModel& model);

}  // namespace camset
