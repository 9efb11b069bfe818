#include "camset/types.hpp"

#include <doctest.h>

#include "support.hpp"

using namespace camset;

TEST_CASE("skew matches the cross product") {
  CHECK(skew(Vec3::Zero()).isZero(0.0));
  CHECK((skew(Vec3::UnitX()) * Vec3::UnitY() - Vec3::UnitZ()).norm() == 0.0);
  test::Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const Vec3 v = rng.vec3(-5.0, 5.0);
    const Vec3 w = rng.vec3(-5.0, 5.0);
    CHECK((skew(v) * w - v.cross(w)).norm() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK((skew(v) * v).norm() == doctest::Approx(0.0).epsilon(1e-14));
    // Antisymmetry is exact, not approximate.
    CHECK((skew(v).transpose() + skew(v)).norm() == 0.0);
  }
}

TEST_CASE("ray normalizes its direction") {
  const Ray ray(Vec3(0.0, 0.0, 2.5), Vec3(1.0, 2.0, 3.0));
  CHECK(ray.direction.isApprox(Vec3::UnitZ()));
  CHECK(ray.center == Vec3(1.0, 2.0, 3.0));
  CHECK_THROWS_AS(Ray(Vec3::Zero(), Vec3::Zero()), std::invalid_argument);
  const Ray through = Ray::through(Vec3(1.0, 0.0, 0.0), Vec3(1.0, 0.0, 5.0));
  CHECK(through.direction.isApprox(Vec3::UnitZ()));
}

TEST_CASE("homogeneous point keeps the last component 1") {
  const HomogeneousPoint p(Vec3(1.0, 2.0, 3.0));
  CHECK(p.coords(3) == 1.0);
  const HomogeneousPoint q(Vec4(2.0, 4.0, 6.0, 2.0));
  CHECK(q.xyz().isApprox(Vec3(1.0, 2.0, 3.0)));
  CHECK(q.coords(3) == 1.0);
  CHECK_THROWS_AS(HomogeneousPoint(Vec4(1.0, 1.0, 1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("camera pose center and matrix") {
  test::Rng rng(7);
  CameraPose pose;
  pose.rotation = rng.rotation();
  pose.translation = rng.vec3(-3.0, 3.0);
  CHECK((pose.rotation * pose.center() + pose.translation).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
  const Mat34 m = pose.matrix();
  CHECK(m.leftCols<3>().isApprox(pose.rotation));
  CHECK(m.col(3).isApprox(pose.translation));
}

TEST_CASE("is_rotation rejects reflections and scalings") {
  CHECK(is_rotation(Mat3::Identity()));
  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1.0;
  CHECK_FALSE(is_rotation(reflection));
  CHECK_FALSE(is_rotation(2.0 * Mat3::Identity()));
}

TEST_CASE("sim3 construction enforces the invariants") {
  test::Rng rng(3);
  const Mat3 r = rng.rotation();
  CHECK_THROWS_AS(Sim3Transform(0.0, r, Vec3::Zero()), std::invalid_argument);
  CHECK_THROWS_AS(Sim3Transform(-1.0, r, Vec3::Zero()), std::invalid_argument);
  CHECK_THROWS_AS(Sim3Transform(1.0, 2.0 * Mat3::Identity(), Vec3::Zero()),
                  std::invalid_argument);
}

TEST_CASE("sim3 matrix form matches apply") {
  test::Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const Sim3Transform t = rng.sim3();
    const Vec3 x = rng.vec3(-10.0, 10.0);
    const Mat34 m = t.as_matrix();
    const Vec3 via_matrix = m * HomogeneousPoint(x).coords;
    CHECK((via_matrix - t.apply(x)).norm() == doctest::Approx(0.0).epsilon(1e-10));
    // s R [I | -C] spelled out.
    CHECK(m.leftCols<3>().isApprox(t.scale() * t.rotation(), 1e-12));
    CHECK(m.col(3).isApprox(-t.scale() * t.rotation() * t.center(), 1e-12));
  }
}

TEST_CASE("sim3 inverse and composition") {
  test::Rng rng(9);
  for (int i = 0; i < 10; ++i) {
    const Sim3Transform t = rng.sim3();
    const Vec3 x = rng.vec3(-10.0, 10.0);
    CHECK((t.inverse().apply(t.apply(x)) - x).norm() ==
          doctest::Approx(0.0).epsilon(1e-9));
    const Sim3Transform u = rng.sim3();
    CHECK((t.compose(u).apply(x) - t.apply(u.apply(x))).norm() ==
          doctest::Approx(0.0).epsilon(1e-9));
  }
  // Associativity of composition.
  const Sim3Transform a = rng.sim3();
  const Sim3Transform b = rng.sim3();
  const Sim3Transform c = rng.sim3();
  const Sim3Transform left = a.compose(b).compose(c);
  const Sim3Transform right = a.compose(b.compose(c));
  CHECK(left.scale() == doctest::Approx(right.scale()).epsilon(1e-10));
  CHECK((left.rotation() - right.rotation()).norm() ==
        doctest::Approx(0.0).epsilon(1e-10));
  CHECK((left.center() - right.center()).norm() ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("sim3 apply preserves angles") {
  test::Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    const Sim3Transform t = rng.sim3();
    const Vec3 a = rng.vec3(-5.0, 5.0);
    const Vec3 b = rng.vec3(-5.0, 5.0);
    const Vec3 c = rng.vec3(-5.0, 5.0);
    if ((a - b).norm() < 1e-3 || (c - b).norm() < 1e-3) {
      continue;
    }
    const auto angle_at = [](const Vec3& u, const Vec3& v, const Vec3& w) {
      return std::acos(std::clamp(
          (u - v).normalized().dot((w - v).normalized()), -1.0, 1.0));
    };
    const double before = angle_at(a, b, c);
    const double after = angle_at(t.apply(a), t.apply(b), t.apply(c));
    CHECK(std::abs(before - after) < 1e-9);
  }
}

TEST_CASE("rotation exp and log round trip") {
  test::Rng rng(17);
  for (int i = 0; i < 20; ++i) {
    const Vec3 w = rng.unit_vec3() * rng.uniform(0.0, 3.0);
    const Mat3 r = rotation_exp(w);
    CHECK(is_rotation(r, 1e-9));
    CHECK((rotation_log(r) - w).norm() < 1e-9);
  }
  // Small angles stay accurate through the series branch.
  const Vec3 tiny(1e-14, -2e-14, 5e-15);
  CHECK((rotation_exp(tiny) - Mat3::Identity()).norm() < 1e-12);
  CHECK(rotation_angle_deg(rotation_exp(Vec3(0.0, 0.0, M_PI / 6.0)),
                           Mat3::Identity()) == doctest::Approx(30.0).epsilon(1e-10));
}
