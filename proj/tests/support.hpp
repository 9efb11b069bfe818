#pragma once

#include "camset/dlt.hpp"
#include "camset/optim.hpp"
#include "camset/ransac.hpp"
#include "camset/types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

namespace camset::test {

// Deterministic scalar stream for test data, independent of the library's
// sampling helpers beyond the splitmix64 primitive itself.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  double gaussian() {
    const double u1 = 1.0 - uniform(0.0, 1.0);
    const double u2 = uniform(0.0, 1.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(splitmix64(state_) %
                                 static_cast<std::uint64_t>(hi - lo + 1));
  }

  Vec3 vec3(double lo, double hi) {
    const double x = uniform(lo, hi);
    const double y = uniform(lo, hi);
    const double z = uniform(lo, hi);
    return Vec3(x, y, z);
  }

  Vec3 unit_vec3() {
    while (true) {
      const double x = gaussian();
      const double y = gaussian();
      const double z = gaussian();
      const Vec3 v(x, y, z);
      if (v.norm() > 1e-6) {
        return v.normalized();
      }
    }
  }

  Mat3 rotation() { return rotation_exp(unit_vec3() * uniform(0.0, M_PI)); }

  Sim3Transform sim3(double scale_lo = 0.5, double scale_hi = 2.0) {
    return Sim3Transform(uniform(scale_lo, scale_hi), rotation(),
                         vec3(-10.0, 10.0));
  }

 private:
  std::uint64_t state_;
};

// Noise-free correspondences consistent with the given transform: global
// points in a box, ray centers near the set-frame origin, directions through
// the transformed points.
inline std::vector<RayPointCorrespondence> make_correspondences(
    const Sim3Transform& truth, int count, Rng& rng, double direction_noise = 0.0) {
  std::vector<RayPointCorrespondence> correspondences;
  correspondences.reserve(count);
  while (static_cast<int>(correspondences.size()) < count) {
    const Vec3 global = rng.vec3(-20.0, 20.0);
    const Vec3 center = rng.vec3(-1.0, 1.0);
    const Vec3 offset = truth.apply(global) - center;
    if (offset.norm() < 1e-3) {
      continue;
    }
    Vec3 direction = offset.normalized();
    if (direction_noise > 0.0) {
      const Vec3 helper =
          std::abs(direction.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
      const Vec3 e1 = direction.cross(helper).normalized();
      const Vec3 e2 = direction.cross(e1).normalized();
      direction = (direction + direction_noise * rng.gaussian() * e1 +
                   direction_noise * rng.gaussian() * e2)
                      .normalized();
    }
    correspondences.push_back({Ray(direction, center), global});
  }
  return correspondences;
}

inline double rotation_error_deg(const Mat3& a, const Mat3& b) {
  return rotation_angle_deg(a, b);
}

// Central-difference Jacobian of the stacked residuals through the problem's
// own retraction; the oracle the analytic Jacobian is checked against.
inline Eigen::MatrixXd finite_difference_jacobian(const RayBundleProblem& problem,
                                                  double h = 1e-6) {
  const int n = problem.num_parameters();
  Eigen::MatrixXd jac(problem.num_residuals(), n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
    delta(k) = h;
    const Eigen::VectorXd forward = evaluate_residuals(apply_step(problem, delta));
    delta(k) = -h;
    const Eigen::VectorXd backward = evaluate_residuals(apply_step(problem, delta));
    jac.col(k) = (forward - backward) / (2.0 * h);
  }
  return jac;
}

// Largest elementwise deviation, relative for large entries and absolute for
// small ones.
inline double max_relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) {
      const double scale = std::max({1.0, std::abs(a(r, c)), std::abs(b(r, c))});
      worst = std::max(worst, std::abs(a(r, c) - b(r, c)) / scale);
    }
  }
  return worst;
}

}  // namespace camset::test
