#pragma once

#include "camset/types.hpp"

namespace camset {

// Calibration kappa(u, K): pixel to unit ray in the camera frame.
// Panoramic: p = (u - u_c) / f, t = (v - v_c) / f.
// The ray is (cos t sin p, sin t, cos t cos p); p pans about the y axis and
// t tilts about the x axis.
Vec3 calibrate_panoramic(const Vec2& pixel, const CameraIntrinsics& intrinsics);

// Rectilinear: p = arctan((u - u_c) / f), t = arctan((v - v_c) / f), with the
// same trigonometric ray mapping.
Vec3 calibrate_rectilinear(const Vec2& pixel, const CameraIntrinsics& intrinsics);

// Dispatches on intrinsics.model.
Vec3 calibrate(const Vec2& pixel, const CameraIntrinsics& intrinsics);

// Inverse mapping kappa^-1(x, K): unit ray to pixel. For rectilinear cameras
// the ray must point in front of the camera (z > 0); throws BehindCamera
// otherwise.
Vec2 uncalibrate(const Vec3& direction, const CameraIntrinsics& intrinsics);

// Ray reprojection residual: observed - P X~ / ||P X~||. The scalar ray error
// is the Euclidean norm of this vector. Throws DegeneratePoint when the point
// coincides with the camera center (||P X~|| <= 1e-12).
Vec3 ray_residual(const Vec3& observed, const CameraPose& camera,
                  const HomogeneousPoint& point);

}  // namespace camset
