#include "camset/camera.hpp"
#include "camset/pipeline.hpp"
#include "camset/refine.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace camset {

CameraPose camera_pose_in_global(const CameraPose& set_pose, const Sim3Transform& t) {
  CameraPose global;
  global.rotation = set_pose.rotation * t.rotation();
  const Vec3 center = t.inverse().apply(set_pose.center());
  global.translation = -global.rotation * center;
  return global;
}

namespace {

// Pixel observation matching for the target camera alone: every observation
// acts as its own matchable unit, so a camera with corrupted descriptors
// fails here even when the rest of the set could localize.
LocalizationResult try_single_image(const ScenePointCloud& scene,
                                    const DescriptorIndex& scene_index,
                                    const CameraSetModel& query,
                                    const PipelineConfig& config,
                                    std::string* reason) {
  LocalizationResult failed;
  std::vector<const CameraSetModel::Observation*> target_obs;
  for (const auto& obs : query.observations) {
    if (obs.camera == query.target_camera && !obs.descriptor.empty()) {
      target_obs.push_back(&obs);
    }
  }
  if (static_cast<int>(target_obs.size()) < config.single_image_min_inliers) {
    *reason = "target camera has too few described observations";
    return failed;
  }

  std::vector<std::pair<Vec3, std::vector<Descriptor>>> units;
  units.reserve(target_obs.size());
  for (const auto* obs : target_obs) {
    units.emplace_back(query.points[obs->point],
                       std::vector<Descriptor>{obs->descriptor});
  }
  const std::vector<PointMatch> matches =
      match_bidirectional(units, scene_index, config.ratio_threshold);

  const CameraIntrinsics& intrinsics = query.cameras[query.target_camera].intrinsics;
  std::vector<RayPointCorrespondence> correspondences;
  correspondences.reserve(matches.size());
  for (const auto& m : matches) {
    const auto* obs = target_obs[m.local_index];
    correspondences.push_back({Ray(calibrate(obs->pixel, intrinsics), Vec3::Zero()),
                               scene.points[m.scene_index]});
  }
  if (static_cast<int>(correspondences.size()) < config.single_image_min_inliers) {
    *reason = "only " + std::to_string(correspondences.size()) +
              " target matches survived the ratio tests";
    return failed;
  }

  RansacConfig ransac = config.ransac;
  ransac.min_inliers = config.single_image_min_inliers;
  try {
    const SingleCameraRansacResult estimate =
        ransac_estimate_single_camera(correspondences, ransac);
    LocalizationResult result;
    result.status = LocalizationResult::Status::SingleImageSuccess;
    result.target_pose_global = estimate.pose;
    result.inlier_count = estimate.inlier_count;
    return result;
  } catch (const Error& e) {
    *reason = e.what();
    return failed;
  }
}

}  // namespace

LocalizationResult localize(const ScenePointCloud& scene, const DescriptorIndex& scene_index,
                            const CameraSetModel& query, const PipelineConfig& config) {
  query.validate();
  config.ransac.validate();
  config.lm.validate();
  if (config.single_image_min_inliers < kMinDltCorrespondences) {
    throw InvalidConfig("single_image_min_inliers must cover the DLT sample size");
  }

  std::string single_reason;
  LocalizationResult single =
      try_single_image(scene, scene_index, query, config, &single_reason);
  if (single.registered()) {
    return single;
  }

  // Image set fallback: pool every camera's descriptors per local point and
  // match in 3D.
  std::vector<std::pair<Vec3, std::vector<Descriptor>>> units(query.points.size());
  for (std::size_t j = 0; j < query.points.size(); ++j) {
    units[j].first = query.points[j];
  }
  for (const auto& obs : query.observations) {
    if (!obs.descriptor.empty()) {
      units[obs.point].second.push_back(obs.descriptor);
    }
  }
  const std::vector<PointMatch> matches =
      match_bidirectional(units, scene_index, config.ratio_threshold);

  // Every observation of a matched local point becomes one ray
  // correspondence; the DLT consumes set-frame rays while the refinement
  // keeps the camera-frame ray with its camera index.
  std::vector<int> scene_of_local(query.points.size(), -1);
  for (const auto& m : matches) {
    scene_of_local[m.local_index] = m.scene_index;
  }
  std::vector<Vec3> matched_points;
  std::map<int, int> compact;
  std::vector<RayPointCorrespondence> correspondences;
  std::vector<GlobalObservation> observations;
  for (const auto& obs : query.observations) {
    const int g = scene_of_local[obs.point];
    if (g < 0) {
      continue;
    }
    const CameraSetModel::Camera& camera = query.cameras[obs.camera];
    const Vec3 camera_ray = calibrate(obs.pixel, camera.intrinsics);
    const Vec3 set_direction = camera.pose.rotation.transpose() * camera_ray;
    auto [it, inserted] = compact.try_emplace(g, static_cast<int>(matched_points.size()));
    if (inserted) {
      matched_points.push_back(scene.points[g]);
    }
    correspondences.push_back(
        {Ray(set_direction, camera.pose.center()), scene.points[g]});
    observations.push_back({obs.camera, camera_ray, it->second});
  }

  LocalizationResult result;
  if (static_cast<int>(correspondences.size()) < config.ransac.min_inliers) {
    result.failure_reason = "single image: " + single_reason + "; image set: only " +
                            std::to_string(correspondences.size()) +
                            " ray correspondences from point matches";
    return result;
  }

  try {
    const RansacResult consensus = ransac_estimate(correspondences, config.ransac);

    std::vector<GlobalObservation> inlier_obs;
    for (std::size_t k = 0; k < observations.size(); ++k) {
      if (consensus.inlier_mask[k]) {
        inlier_obs.push_back(observations[k]);
      }
    }
    std::vector<CameraPose> poses;
    poses.reserve(query.cameras.size());
    for (const auto& camera : query.cameras) {
      poses.push_back(camera.pose);
    }
    const RefineSummary refined = refine_transform_lm(
        consensus.transform, inlier_obs, matched_points, poses, config.lm);

    Sim3Transform transform = refined.transform;
    if (config.joint_refinement && query.cameras.size() >= 2) {
      JointProblem joint;
      joint.transform = transform;
      joint.cameras = poses;
      joint.local_points = query.points;
      joint.global_points = matched_points;
      joint.global_obs = inlier_obs;
      joint.local_obs.reserve(query.observations.size());
      for (const auto& obs : query.observations) {
        const Vec3 camera_ray =
            calibrate(obs.pixel, query.cameras[obs.camera].intrinsics);
        joint.local_obs.push_back({obs.camera, camera_ray, obs.point});
      }
      const JointRefineSummary joint_result = refine_joint(joint, config.lm);
      transform = joint_result.problem.transform;
      poses = joint_result.problem.cameras;
    }

    result.status = LocalizationResult::Status::ImageSetSuccess;
    result.transform = transform;
    result.inlier_count = consensus.inlier_count;
    result.per_camera_poses_global.reserve(poses.size());
    for (const auto& pose : poses) {
      result.per_camera_poses_global.push_back(camera_pose_in_global(pose, transform));
    }
    result.target_pose_global = result.per_camera_poses_global[query.target_camera];
  } catch (const Error& e) {
    result.status = LocalizationResult::Status::Failed;
    result.failure_reason = "single image: " + single_reason +
                            "; image set: " + std::string(e.what());
    result.transform.reset();
    result.target_pose_global.reset();
    result.per_camera_poses_global.clear();
  }
  return result;
}

}  // namespace camset
