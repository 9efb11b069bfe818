#pragma once

#include "camset/types.hpp"

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

namespace camset {

// One ray <-> global point correspondence for the camera set solver. The ray
// lives in the camera set frame; the point in the global scene frame.
struct RayPointCorrespondence {
  Ray ray;
  Vec3 global_point = Vec3::Zero();
};

struct DltDiagnostics {
  double condition_number = 0.0;
  double residual_rms = 0.0;  // ray units
  int num_correspondences = 0;
};

// Minimum number of correspondences for the 12-unknown DLT system.
inline constexpr int kMinDltCorrespondences = 6;
// Conditioning limit beyond which the system counts as degenerate.
inline constexpr double kDltDegenerateCondition = 1e12;
// Above this condition number the least squares solve falls back to SVD.
inline constexpr double kDltSvdFallbackCondition = 1e10;

// Stacks the constraint [r_i]x T X~_i = [r_i]x C_i into A vec(T) = b.
// Row block i of A is X~_i^T (x) [r_i]x; vec is column-major over the 3x4 T.
// Throws TooFewCorrespondences when fewer than 6 correspondences are given.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_dlt_system(
    std::span<const RayPointCorrespondence> correspondences);

// Least squares solution of the DLT system via column-pivoting QR, with an
// SVD fallback on poor conditioning. Throws DegenerateConfiguration when the
// condition number of A exceeds 1e12.
std::pair<Mat34, DltDiagnostics> solve_dlt(
    std::span<const RayPointCorrespondence> correspondences);

// Projects a raw 3x4 transform onto the valid 7-DOF similarity space:
// RQ-decompose the left 3x3 block as K (upper triangular, positive diagonal)
// times a proper rotation, take s = trace(K) / 3 and t = K^-1 m where m is
// the fourth column, and return the similarity with matrix s [R | t].
Sim3Transform project_to_sim3(const Mat34& t_raw);

// solve_dlt followed by project_to_sim3.
std::pair<Sim3Transform, DltDiagnostics> estimate_pose_dlt(
    std::span<const RayPointCorrespondence> correspondences);

// Special case with all ray centers identical: the system becomes homogeneous
// and is solved by the smallest singular vector; scale is unobservable and
// fixed to 1. The returned pose satisfies r_i ~ R X_i + t - C for the common
// center C, so with centers at the origin it is the standard camera pose.
CameraPose estimate_single_camera_pose(
    std::span<const RayPointCorrespondence> correspondences);

// Angle in radians between an observed ray and the direction predicted by a
// transform. Returns pi when the predicted point sits on the ray center.
double prediction_angle(const RayPointCorrespondence& c, const Sim3Transform& t);
double prediction_angle(const RayPointCorrespondence& c, const CameraPose& pose);

}  // namespace camset
