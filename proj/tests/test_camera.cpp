#include "camset/camera.hpp"

#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace camset;

namespace {

CameraIntrinsics pano100() {
  CameraIntrinsics k;
  k.model = CameraModel::Panoramic;
  k.focal = 100.0;
  k.principal_point = Vec2(320.0, 240.0);
  k.image_size = Eigen::Vector2i(640, 480);
  return k;
}

}  // namespace

TEST_CASE("principal point maps to the optical axis") {
  const CameraIntrinsics pano = CameraIntrinsics::panoramic(2048, 1024);
  const CameraIntrinsics rect = CameraIntrinsics::rectilinear(800.0, 1600, 1200);
  CHECK((calibrate(pano.principal_point, pano) - Vec3::UnitZ()).norm() < 1e-15);
  CHECK((calibrate(rect.principal_point, rect) - Vec3::UnitZ()).norm() < 1e-15);
  CHECK((uncalibrate(Vec3::UnitZ(), pano) - pano.principal_point).norm() < 1e-12);
  CHECK((uncalibrate(Vec3::UnitZ(), rect) - rect.principal_point).norm() < 1e-12);
}

TEST_CASE("panoramic pan and tilt angles are linear in pixels") {
  const CameraIntrinsics k = pano100();
  // A quarter turn of pan lands on the +x axis.
  const Vec2 quarter(k.principal_point.x() + k.focal * M_PI / 2.0,
                     k.principal_point.y());
  CHECK((calibrate(quarter, k) - Vec3::UnitX()).norm() < 1e-12);
  // Tilt moves along the y axis.
  const Vec2 tilted(k.principal_point.x(),
                    k.principal_point.y() + k.focal * M_PI / 4.0);
  const Vec3 expected(0.0, std::sqrt(0.5), std::sqrt(0.5));
  CHECK((calibrate(tilted, k) - expected).norm() < 1e-12);
}

TEST_CASE("rectilinear one focal length off axis gives 45 degrees") {
  const CameraIntrinsics k = CameraIntrinsics::rectilinear(800.0, 1600, 1200);
  const Vec2 pixel(k.principal_point.x() + k.focal, k.principal_point.y());
  const Vec3 expected(std::sqrt(0.5), 0.0, std::sqrt(0.5));
  CHECK((calibrate(pixel, k) - expected).norm() < 1e-12);
}

TEST_CASE("calibrate and uncalibrate round trip") {
  test::Rng rng(21);
  const CameraIntrinsics models[2] = {CameraIntrinsics::panoramic(2048, 1024),
                                      CameraIntrinsics::rectilinear(800.0, 1600, 1200)};
  for (const CameraIntrinsics& k : models) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Vec2 pixel(rng.uniform(1.0, k.image_size.x() - 1.0),
                       rng.uniform(1.0, k.image_size.y() - 1.0));
      const Vec3 ray = calibrate(pixel, k);
      CHECK(std::abs(ray.norm() - 1.0) < 1e-14);
      const Vec2 back = uncalibrate(ray, k);
      worst = std::max(worst, (back - pixel).norm());
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("rectilinear uncalibrate rejects rays behind the camera") {
  const CameraIntrinsics k = CameraIntrinsics::rectilinear(800.0, 1600, 1200);
  CHECK_THROWS_AS(uncalibrate(Vec3(0.0, 0.0, -1.0), k), BehindCamera);
  CHECK_THROWS_AS(uncalibrate(Vec3(1.0, 0.0, 0.0), k), BehindCamera);
  // Panoramic cameras see the back hemisphere.
  const CameraIntrinsics pano = CameraIntrinsics::panoramic(2048, 1024);
  const Vec2 behind = uncalibrate(Vec3(0.0, 0.0, -1.0).normalized(), pano);
  CHECK((calibrate(behind, pano) - Vec3(0.0, 0.0, -1.0)).norm() < 1e-12);
}

TEST_CASE("ray residual vanishes exactly on the observed ray") {
  test::Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    CameraPose pose;
    pose.rotation = rng.rotation();
    pose.translation = rng.vec3(-2.0, 2.0);
    const Vec3 x = rng.vec3(-10.0, 10.0);
    const Vec3 in_camera = pose.apply(x);
    if (in_camera.norm() < 1e-3) {
      continue;
    }
    const Vec3 observed = in_camera.normalized();
    CHECK(ray_residual(observed, pose, HomogeneousPoint(x)).norm() < 1e-14);
    // The antipodal observation is as wrong as a unit vector can be.
    CHECK(ray_residual(Vec3(-observed), pose, HomogeneousPoint(x)).norm() ==
          doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("ray residual matches a scalar recomputation") {
  test::Rng rng(37);
  for (int i = 0; i < 50; ++i) {
    CameraPose pose;
    pose.rotation = rng.rotation();
    pose.translation = rng.vec3(-2.0, 2.0);
    const Vec3 x = rng.vec3(-10.0, 10.0);
    const Vec3 observed = rng.unit_vec3();
    const Vec3 z = pose.rotation * x + pose.translation;
    if (z.norm() < 1e-3) {
      continue;
    }
    // Plain scalar arithmetic, no Eigen, as an independent oracle.
    const double zn = std::sqrt(z.x() * z.x() + z.y() * z.y() + z.z() * z.z());
    double sq = 0.0;
    for (int d = 0; d < 3; ++d) {
      const double diff = observed(d) - z(d) / zn;
      sq += diff * diff;
    }
    const double expected = std::sqrt(sq);
    const double got = ray_residual(observed, pose, HomogeneousPoint(x)).norm();
    CHECK(std::abs(got - expected) < 1e-12);
  }
}

TEST_CASE("ray residual throws when the point sits on the center") {
  CameraPose pose;
  pose.translation = Vec3(0.0, 0.0, -4.0);
  // Camera center is (0, 0, 4).
  CHECK_THROWS_AS(
      ray_residual(Vec3::UnitZ(), pose, HomogeneousPoint(Vec3(0.0, 0.0, 4.0))),
      DegeneratePoint);
}
