#pragma once

#include "camset/local_model.hpp"
#include "camset/match.hpp"
#include "camset/optim.hpp"
#include "camset/ransac.hpp"
#include "camset/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace camset {

struct PipelineConfig {
  double ratio_threshold = kDefaultRatioThreshold;
  // Single-image localization counts as failed below this many inliers.
  int single_image_min_inliers = 12;
  RansacConfig ransac;
  LmConfig lm;
  bool joint_refinement = true;
};

struct LocalizationResult {
  enum class Status { SingleImageSuccess, ImageSetSuccess, Failed };

  Status status = Status::Failed;
  std::optional<CameraPose> target_pose_global;
  std::optional<Sim3Transform> transform;  // set path only
  int inlier_count = 0;
  // Global pose per query camera; filled on the image-set path.
  std::vector<CameraPose> per_camera_poses_global;
  std::string failure_reason;

  bool registered() const { return status != Status::Failed; }
};

// Two-stage flow: attempt single-image localization of the target camera first;
// fall back to the image-set path (3D-3D matching, RANSAC DLT, LM refinement,
// optional joint refinement) when the inlier count stays below the single
// image threshold. Matching or consensus failures surface as status Failed.
LocalizationResult localize(const ScenePointCloud& scene, const DescriptorIndex& scene_index,
                            const CameraSetModel& query, const PipelineConfig& config);

struct SyntheticConfig {
  double scene_extent = 100.0;  // box edge, meters
  int num_scene_cameras = 8;    // panoramic cameras on a line
  int num_query_cameras = 4;    // rectilinear query set
  int num_query_points = 80;    // points covisible with the scene
  int num_distractor_points = 400;
  int descriptor_dim = 128;
  double descriptor_noise = 0.0;    // per-component sigma before renormalizing
  double ray_noise = 0.0;           // angular sigma, radians
  double pose_rotation_noise_deg = 0.0;
  double pose_translation_noise_frac = 0.0;  // fraction of the mean baseline
  double outlier_fraction = 0.0;    // local points given random descriptors
  bool corrupt_target_descriptors = false;
  double scale_min = 0.5;
  double scale_max = 2.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticDataset {
  ScenePointCloud scene;
  CameraSetModel query;  // poses carry the configured perturbation
  Sim3Transform true_transform;
  std::vector<CameraPose> true_poses_set;     // set frame, unperturbed
  std::vector<CameraPose> true_poses_global;  // global frame
  // Scene point index backing each query point, -1 for outlier-descriptor
  // points.
  std::vector<int> true_scene_index;
};

// Deterministic synthetic scene + query pair with controllable noise. The
// query set is laid out in its own frame, mapped into the global box by the
// inverse of a random similarity, and surrounded by distractor points.
SyntheticDataset generate_synthetic(const SyntheticConfig& config);

struct LabeledResult {
  std::string id;
  LocalizationResult result;
};
struct LabeledTruth {
  std::string id;
  CameraPose target_pose_global;
};

struct SummaryStats {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct EvalReport {
  struct Entry {
    std::string id;
    bool registered = false;
    double location_error_m = 0.0;
    double orientation_error_deg = 0.0;
  };
  std::vector<Entry> entries;
  int registered_count = 0;
  int total_count = 0;
  double registration_rate = 0.0;
  // Statistics over registered entries only.
  SummaryStats location;
  SummaryStats orientation;
};

// Location error is the distance between camera centers in meters;
// orientation error the angle of the relative rotation in degrees. Results
// and truth are aligned by id; a mismatch throws MismatchedIds.
EvalReport evaluate(const std::vector<LabeledResult>& results,
                    const std::vector<LabeledTruth>& truth);

SummaryStats summarize(std::vector<double> values);

// Global pose of one camera of the set under transform t: the composition of
// the camera's set-frame pose with t.
CameraPose camera_pose_in_global(const CameraPose& set_pose, const Sim3Transform& t);

}  // namespace camset
