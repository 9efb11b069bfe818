#include "camset/refine.hpp"

#include "camset/dlt.hpp"

#include <cmath>

namespace camset {

namespace {

void check_observation(int camera, int point, const Vec3& ray, int num_cameras,
                       int num_points, const char* kind) {
  if (camera < 0 || camera >= num_cameras) {
    throw InvalidConfig(std::string(kind) + " observation references camera " +
                        std::to_string(camera));
  }
  if (point < 0 || point >= num_points) {
    throw InvalidConfig(std::string(kind) + " observation references point " +
                        std::to_string(point));
  }
  if (std::abs(ray.norm() - 1.0) > 1e-6) {
    throw InvalidConfig(std::string(kind) + " observation ray is not unit length");
  }
}

}  // namespace

void JointProblem::validate() const {
  if (cameras.empty()) {
    throw InvalidConfig("joint problem has no cameras");
  }
  for (const auto& pose : cameras) {
    pose.validate();
  }
  const int nc = static_cast<int>(cameras.size());
  for (const auto& o : global_obs) {
    check_observation(o.camera, o.point, o.ray, nc,
                      static_cast<int>(global_points.size()), "global");
  }
  for (const auto& o : local_obs) {
    check_observation(o.camera, o.point, o.ray, nc,
                      static_cast<int>(local_points.size()), "local");
  }
}

RayBundleProblem make_transform_problem(const Sim3Transform& t_init,
                                        std::span<const GlobalObservation> observations,
                                        std::span<const Vec3> global_points,
                                        std::span<const CameraPose> cameras) {
  RayBundleProblem problem;
  problem.transform = t_init;
  problem.cameras.assign(cameras.begin(), cameras.end());
  problem.global_points.assign(global_points.begin(), global_points.end());
  problem.global_terms.reserve(observations.size());
  for (const auto& o : observations) {
    problem.global_terms.push_back({o.camera, o.ray, o.point});
  }
  problem.vary.transform = true;
  problem.vary.transform_scale = true;
  return problem;
}

RefineSummary refine_transform_lm(const Sim3Transform& t_init,
                                  std::span<const GlobalObservation> observations,
                                  std::span<const Vec3> global_points,
                                  std::span<const CameraPose> cameras,
                                  const LmConfig& config) {
  if (static_cast<int>(observations.size()) < kMinDltCorrespondences) {
    throw TooFewCorrespondences(
        "transform refinement needs at least 6 observations, got " +
        std::to_string(observations.size()));
  }
  RayBundleProblem problem =
      make_transform_problem(t_init, observations, global_points, cameras);
  const LmSummary lm = solve_lm(problem, config);
  RefineSummary summary;
  summary.transform = problem.transform;
  summary.initial_cost = lm.initial_cost;
  summary.final_cost = lm.final_cost;
  summary.final_norm_sum = lm.final_norm_sum;
  summary.iterations = lm.iterations;
  return summary;
}

RayBundleProblem make_joint_problem(const JointProblem& problem,
                                    bool refine_cameras, bool refine_points) {
  RayBundleProblem bundle;
  bundle.transform = problem.transform;
  bundle.cameras = problem.cameras;
  bundle.local_points = problem.local_points;
  bundle.global_points = problem.global_points;
  bundle.global_terms.reserve(problem.global_obs.size());
  for (const auto& o : problem.global_obs) {
    bundle.global_terms.push_back({o.camera, o.ray, o.point});
  }
  bundle.local_terms.reserve(problem.local_obs.size());
  for (const auto& o : problem.local_obs) {
    bundle.local_terms.push_back({o.camera, o.ray, o.point});
  }
  bundle.vary.transform = true;
  bundle.vary.transform_scale = true;
  // Without local observations nothing anchors the set structure, so the
  // extra blocks stay frozen and the solve reduces to transform-only
  // refinement.
  const bool has_local = !problem.local_obs.empty();
  bundle.vary.cameras = refine_cameras && has_local;
  bundle.vary.points = refine_points && has_local;
  return bundle;
}

JointRefineSummary refine_joint(const JointProblem& problem, const LmConfig& config,
                                bool refine_cameras, bool refine_points) {
  problem.validate();
  if (problem.cameras.size() < 2) {
    throw GaugeUnderconstrained("joint refinement needs at least two cameras");
  }
  if (problem.global_obs.empty()) {
    throw GaugeUnderconstrained(
        "joint refinement needs global observations to anchor the transform");
  }
  RayBundleProblem bundle = make_joint_problem(problem, refine_cameras, refine_points);
  const LmSummary lm = solve_lm(bundle, config);
  JointRefineSummary summary;
  summary.problem = problem;
  summary.problem.transform = bundle.transform;
  summary.problem.cameras = bundle.cameras;
  summary.problem.local_points = bundle.local_points;
  summary.initial_cost = lm.initial_cost;
  summary.final_cost = lm.final_cost;
  summary.final_norm_sum = lm.final_norm_sum;
  summary.iterations = lm.iterations;
  return summary;
}

}  // namespace camset
