#include "camset/local_model.hpp"

#include "camset/camera.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <vector>

namespace camset {

void CameraSetModel::validate() const {
  if (cameras.empty()) {
    throw InvalidConfig("camera set model has no cameras");
  }
  for (const auto& camera : cameras) {
    camera.intrinsics.validate();
    camera.pose.validate();
  }
  if (target_camera < 0 || target_camera >= static_cast<int>(cameras.size())) {
    throw InvalidConfig("target camera index " + std::to_string(target_camera) +
                        " is out of range");
  }
  std::vector<int> seen(points.size(), 0);
  for (const auto& obs : observations) {
    if (obs.camera < 0 || obs.camera >= static_cast<int>(cameras.size())) {
      throw InvalidConfig("observation references camera " +
                          std::to_string(obs.camera));
    }
    if (obs.point < 0 || obs.point >= static_cast<int>(points.size())) {
      throw InvalidConfig("observation references point " +
                          std::to_string(obs.point));
    }
    if (!obs.pixel.allFinite()) {
      throw InvalidConfig("observation pixel is not finite");
    }
    ++seen[obs.point];
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] < 2) {
      throw InvalidConfig("point " + std::to_string(i) +
                          " has fewer than two observations");
    }
  }
}

TriangulationResult triangulate(std::span<const Ray> rays, double min_angle) {
  if (rays.size() < 2) {
    throw DegenerateRays("triangulation needs at least two rays");
  }
  double widest = 0.0;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    for (std::size_t j = i + 1; j < rays.size(); ++j) {
      const double d = std::clamp(rays[i].direction.dot(rays[j].direction), -1.0, 1.0);
      widest = std::max(widest, std::acos(d));
    }
  }
  if (widest < min_angle) {
    throw DegenerateRays("ray directions are within " + std::to_string(widest) +
                         " rad of parallel");
  }
  // Least squares point: sum_i (I - d_i d_i^T)(x - c_i) = 0.
  Mat3 a = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  for (const auto& ray : rays) {
    const Mat3 p = Mat3::Identity() - ray.direction * ray.direction.transpose();
    a += p;
    b += p * ray.center;
  }
  const Eigen::LDLT<Mat3> ldlt(a);
  if (ldlt.info() != Eigen::Success) {
    throw DegenerateRays("triangulation normal equations are singular");
  }
  TriangulationResult result;
  result.point = ldlt.solve(b);
  for (const auto& ray : rays) {
    if (ray.direction.dot(result.point - ray.center) <= 0.0) {
      result.behind_ray = true;
      break;
    }
  }
  return result;
}

RayBundleProblem make_bundle_problem(const CameraSetModel& model) {
  RayBundleProblem problem;
  problem.cameras.reserve(model.cameras.size());
  for (const auto& camera : model.cameras) {
    problem.cameras.push_back(camera.pose);
  }
  problem.local_points = model.points;
  problem.local_terms.reserve(model.observations.size());
  for (const auto& obs : model.observations) {
    const Vec3 ray = calibrate(obs.pixel, model.cameras[obs.camera].intrinsics);
    problem.local_terms.push_back({obs.camera, ray, obs.point});
  }
  problem.vary.cameras = true;
  problem.vary.points = true;
  return problem;
}

BundleAdjustSummary bundle_adjust(const CameraSetModel& model, const LmConfig& config) {
  model.validate();
  if (model.cameras.size() < 2) {
    throw GaugeUnderconstrained("bundle adjustment needs at least two cameras");
  }
  const double baseline =
      (model.cameras[1].pose.center() - model.cameras[0].pose.center()).norm();

  RayBundleProblem problem = make_bundle_problem(model);
  const LmSummary lm = solve_lm(problem, config);

  BundleAdjustSummary summary;
  summary.model = model;
  for (std::size_t i = 0; i < model.cameras.size(); ++i) {
    summary.model.cameras[i].pose = problem.cameras[i];
  }
  summary.model.points = problem.local_points;
  summary.initial_cost = lm.initial_cost;
  summary.final_cost = lm.final_cost;
  summary.iterations = lm.iterations;

  // Scaling every center and point about camera 0 leaves all ray residuals
  // unchanged, so restoring the camera 0 to camera 1 distance fixes the scale
  // gauge without touching the cost.
  const Vec3 anchor = summary.model.cameras[0].pose.center();
  const double adjusted =
      (summary.model.cameras[1].pose.center() - anchor).norm();
  if (baseline > 0.0 && adjusted > 1e-12) {
    const double factor = baseline / adjusted;
    for (auto& camera : summary.model.cameras) {
      const Vec3 center = anchor + factor * (camera.pose.center() - anchor);
      camera.pose.translation = -camera.pose.rotation * center;
    }
    for (auto& point : summary.model.points) {
      point = anchor + factor * (point - anchor);
    }
  }
  return summary;
}

}  // namespace camset
