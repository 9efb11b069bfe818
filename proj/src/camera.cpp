#include "camset/camera.hpp"

#include <cmath>

namespace camset {

namespace {

Vec3 angles_to_ray(double pan, double tilt) {
  return Vec3(std::cos(tilt) * std::sin(pan), std::sin(tilt),
              std::cos(tilt) * std::cos(pan));
}

}  // namespace

Vec3 calibrate_panoramic(const Vec2& pixel, const CameraIntrinsics& intrinsics) {
  const double pan = (pixel.x() - intrinsics.principal_point.x()) / intrinsics.focal;
  const double tilt = (pixel.y() - intrinsics.principal_point.y()) / intrinsics.focal;
  return angles_to_ray(pan, tilt);
}

Vec3 calibrate_rectilinear(const Vec2& pixel, const CameraIntrinsics& intrinsics) {
  const double pan =
      std::atan((pixel.x() - intrinsics.principal_point.x()) / intrinsics.focal);
  const double tilt =
      std::atan((pixel.y() - intrinsics.principal_point.y()) / intrinsics.focal);
  return angles_to_ray(pan, tilt);
}

Vec3 calibrate(const Vec2& pixel, const CameraIntrinsics& intrinsics) {
  return intrinsics.model == CameraModel::Panoramic
             ? calibrate_panoramic(pixel, intrinsics)
             : calibrate_rectilinear(pixel, intrinsics);
}

Vec2 uncalibrate(const Vec3& direction, const CameraIntrinsics& intrinsics) {
  const Vec3 d = direction.normalized();
  const double tilt = std::asin(std::clamp(d.y(), -1.0, 1.0));
  const double pan = std::atan2(d.x(), d.z());
  if (intrinsics.model == CameraModel::Panoramic) {
    return intrinsics.principal_point +
           intrinsics.focal * Vec2(pan, tilt);
  }
  if (d.z() <= 0.0) {
    throw BehindCamera("ray points behind a rectilinear camera");
  }
  return intrinsics.principal_point +
         intrinsics.focal * Vec2(std::tan(pan), std::tan(tilt));
}

Vec3 ray_residual(const Vec3& observed, const CameraPose& camera,
                  const HomogeneousPoint& point) {
  const Vec3 projected = camera.rotation * point.xyz() + camera.translation;
  const double norm = projected.norm();
  if (norm <= 1e-12) {
    throw DegeneratePoint("point coincides with the camera center");
  }
  return observed - projected / norm;
}

}  // namespace camset
