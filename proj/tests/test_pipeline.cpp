#include "camset/pipeline.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "camset/camera.hpp"
#include "camset/refine.hpp"
#include "support.hpp"

using namespace camset;

namespace {

SyntheticConfig easy_config(std::uint64_t seed) {
  SyntheticConfig config;
  config.num_scene_cameras = 6;
  config.num_query_cameras = 4;
  config.num_query_points = 60;
  config.num_distractor_points = 200;
  config.descriptor_dim = 32;
  config.seed = seed;
  return config;
}

double pose_distance(const CameraPose& a, const CameraPose& b) {
  return (a.center() - b.center()).norm();
}

}  // namespace

TEST_CASE("synthetic generation is deterministic and self consistent") {
  const SyntheticConfig config = easy_config(5);
  const SyntheticDataset a = generate_synthetic(config);
  const SyntheticDataset b = generate_synthetic(config);
  REQUIRE(a.scene.points.size() == b.scene.points.size());
  for (std::size_t i = 0; i < a.scene.points.size(); ++i) {
    CHECK(a.scene.points[i] == b.scene.points[i]);
  }
  REQUIRE(a.scene.descriptors.size() == b.scene.descriptors.size());
  for (std::size_t i = 0; i < a.scene.descriptors.size(); ++i) {
    CHECK(a.scene.descriptors[i].descriptor.values ==
          b.scene.descriptors[i].descriptor.values);
  }
  CHECK(a.true_transform.scale() == b.true_transform.scale());
  CHECK(a.true_transform.rotation() == b.true_transform.rotation());
  REQUIRE(a.query.observations.size() == b.query.observations.size());
  for (std::size_t i = 0; i < a.query.observations.size(); ++i) {
    CHECK(a.query.observations[i].pixel == b.query.observations[i].pixel);
  }
  // A different seed produces different data.
  const SyntheticDataset c = generate_synthetic(easy_config(6));
  CHECK(c.true_transform.scale() != a.true_transform.scale());

  // The recorded transform maps each true global pose onto its set pose.
  for (std::size_t i = 0; i < a.true_poses_set.size(); ++i) {
    const CameraPose composed =
        camera_pose_in_global(a.true_poses_set[i], a.true_transform);
    CHECK(pose_distance(composed, a.true_poses_global[i]) < 1e-9);
    CHECK(test::rotation_error_deg(composed.rotation,
                                   a.true_poses_global[i].rotation) < 1e-9);
  }
  // Scene indices of non-outlier query points reference real scene points.
  for (int idx : a.true_scene_index) {
    CHECK(idx >= -1);
    CHECK(idx < static_cast<int>(a.scene.points.size()));
  }
}

TEST_CASE("camera_pose_in_global composes directions consistently") {
  test::Rng rng(313);
  const Sim3Transform t = rng.sim3();
  CameraPose set_pose;
  set_pose.rotation = rng.rotation();
  set_pose.translation = rng.vec3(-1.0, 1.0);
  const CameraPose global_pose = camera_pose_in_global(set_pose, t);
  for (int i = 0; i < 10; ++i) {
    const Vec3 x = rng.vec3(-20.0, 20.0);
    const Vec3 via_set = set_pose.apply(t.apply(x));
    const Vec3 direct = global_pose.apply(x);
    if (via_set.norm() < 0.5) {
      continue;
    }
    // Same bearing, scale-free.
    CHECK((via_set.normalized() - direct.normalized()).norm() < 1e-9);
  }
  CHECK((global_pose.center() - t.inverse().apply(set_pose.center())).norm() <
        1e-9);
}

TEST_CASE("an uncorrupted query localizes through the single image path") {
  const SyntheticDataset data = generate_synthetic(easy_config(11));
  const DescriptorIndex index = DescriptorIndex::build(data.scene);
  const LocalizationResult result =
      localize(data.scene, index, data.query, PipelineConfig());
  CHECK(result.status == LocalizationResult::Status::SingleImageSuccess);
  REQUIRE(result.target_pose_global.has_value());
  const CameraPose& truth = data.true_poses_global[data.query.target_camera];
  CHECK(pose_distance(*result.target_pose_global, truth) < 1e-6);
  CHECK(test::rotation_error_deg(result.target_pose_global->rotation,
                                 truth.rotation) < 1e-6);
  CHECK(result.inlier_count >= 12);
}

TEST_CASE("a corrupted target falls back to the image set path") {
  SyntheticConfig config = easy_config(13);
  config.corrupt_target_descriptors = true;
  const SyntheticDataset data = generate_synthetic(config);
  const DescriptorIndex index = DescriptorIndex::build(data.scene);
  const LocalizationResult result =
      localize(data.scene, index, data.query, PipelineConfig());
  CHECK(result.status == LocalizationResult::Status::ImageSetSuccess);
  REQUIRE(result.target_pose_global.has_value());
  REQUIRE(result.transform.has_value());
  const CameraPose& truth = data.true_poses_global[data.query.target_camera];
  CHECK(pose_distance(*result.target_pose_global, truth) < 1e-4);
  CHECK(test::rotation_error_deg(result.target_pose_global->rotation,
                                 truth.rotation) < 1e-3);
  // The set path also reports the other cameras.
  REQUIRE(result.per_camera_poses_global.size() == data.query.cameras.size());
  for (std::size_t i = 0; i < result.per_camera_poses_global.size(); ++i) {
    CHECK(pose_distance(result.per_camera_poses_global[i],
                        data.true_poses_global[i]) < 1e-4);
  }
  // And the recovered similarity matches the planted one.
  CHECK(std::abs(result.transform->scale() - data.true_transform.scale()) <
        1e-5 * data.true_transform.scale());
}

TEST_CASE("all random descriptors fail cleanly") {
  SyntheticConfig config = easy_config(17);
  config.outlier_fraction = 1.0;
  config.corrupt_target_descriptors = true;
  const SyntheticDataset data = generate_synthetic(config);
  const DescriptorIndex index = DescriptorIndex::build(data.scene);
  const LocalizationResult result =
      localize(data.scene, index, data.query, PipelineConfig());
  CHECK(result.status == LocalizationResult::Status::Failed);
  CHECK_FALSE(result.registered());
  CHECK_FALSE(result.target_pose_global.has_value());
  CHECK(!result.failure_reason.empty());
}

TEST_CASE("localization is deterministic end to end") {
  SyntheticConfig config = easy_config(19);
  config.ray_noise = 5e-4;
  config.descriptor_noise = 0.03;
  config.corrupt_target_descriptors = true;
  const SyntheticDataset data = generate_synthetic(config);
  const DescriptorIndex index = DescriptorIndex::build(data.scene);
  const LocalizationResult a =
      localize(data.scene, index, data.query, PipelineConfig());
  const LocalizationResult b =
      localize(data.scene, index, data.query, PipelineConfig());
  CHECK(a.status == b.status);
  CHECK(a.inlier_count == b.inlier_count);
  REQUIRE(a.target_pose_global.has_value());
  REQUIRE(b.target_pose_global.has_value());
  CHECK(a.target_pose_global->rotation == b.target_pose_global->rotation);
  CHECK(a.target_pose_global->translation == b.target_pose_global->translation);
}

TEST_CASE("zero noise localization is exact to tolerance") {
  for (std::uint64_t seed : {23ULL, 29ULL, 31ULL}) {
    SyntheticConfig config = easy_config(seed);
    config.corrupt_target_descriptors = true;  // force the set path
    const SyntheticDataset data = generate_synthetic(config);
    const DescriptorIndex index = DescriptorIndex::build(data.scene);
    const LocalizationResult result =
        localize(data.scene, index, data.query, PipelineConfig());
    REQUIRE(result.registered());
    const CameraPose& truth = data.true_poses_global[data.query.target_camera];
    CHECK(pose_distance(*result.target_pose_global, truth) < 1e-6);
    CHECK(test::rotation_error_deg(result.target_pose_global->rotation,
                                   truth.rotation) < 1e-6);
  }
}

TEST_CASE("synthetic config validation") {
  SyntheticConfig config;
  config.num_query_points = 0;
  CHECK_THROWS_AS(config.validate(), InvalidConfig);
  config = SyntheticConfig();
  config.scene_extent = -1.0;
  CHECK_THROWS_AS(config.validate(), InvalidConfig);
  config = SyntheticConfig();
  config.outlier_fraction = 1.5;
  CHECK_THROWS_AS(config.validate(), InvalidConfig);
  config = SyntheticConfig();
  config.scale_min = 2.0;
  config.scale_max = 1.0;
  CHECK_THROWS_AS(config.validate(), InvalidConfig);
}

TEST_CASE("pipeline equals its manual module composition") {
  // The localize call on the set path must be reproducible by running the
  // stages by hand with the same configuration.
  SyntheticConfig config = easy_config(37);
  config.corrupt_target_descriptors = true;
  const SyntheticDataset data = generate_synthetic(config);
  const DescriptorIndex index = DescriptorIndex::build(data.scene);
  PipelineConfig pipeline_config;
  pipeline_config.joint_refinement = false;  // keep the manual replay short
  const LocalizationResult result =
      localize(data.scene, index, data.query, pipeline_config);
  REQUIRE(result.status == LocalizationResult::Status::ImageSetSuccess);

  // Stage 1: per point descriptor pooling and matching.
  std::vector<std::pair<Vec3, std::vector<Descriptor>>> units(
      data.query.points.size());
  for (std::size_t j = 0; j < data.query.points.size(); ++j) {
    units[j].first = data.query.points[j];
  }
  for (const auto& obs : data.query.observations) {
    if (!obs.descriptor.empty()) {
      units[obs.point].second.push_back(obs.descriptor);
    }
  }
  const auto matches =
      match_bidirectional(units, index, pipeline_config.ratio_threshold);
  REQUIRE(static_cast<int>(matches.size()) >= 12);

  // Stage 2: every observation of a matched point becomes a correspondence.
  std::vector<int> scene_of_local(data.query.points.size(), -1);
  for (const PointMatch& m : matches) {
    scene_of_local[m.local_index] = m.scene_index;
  }
  std::vector<RayPointCorrespondence> correspondences;
  std::vector<GlobalObservation> all_obs;
  std::vector<Vec3> matched_points;
  std::map<int, int> compact;
  for (const auto& obs : data.query.observations) {
    const int g = scene_of_local[obs.point];
    if (g < 0) {
      continue;
    }
    const auto& camera = data.query.cameras[obs.camera];
    const Vec3 camera_ray = calibrate(obs.pixel, camera.intrinsics);
    auto [it, inserted] =
        compact.try_emplace(g, static_cast<int>(matched_points.size()));
    if (inserted) {
      matched_points.push_back(data.scene.points[g]);
    }
    correspondences.push_back(
        {Ray(camera.pose.rotation.transpose() * camera_ray,
             camera.pose.center()),
         data.scene.points[g]});
    all_obs.push_back({obs.camera, camera_ray, it->second});
  }
  const RansacResult ransac =
      ransac_estimate(correspondences, pipeline_config.ransac);

  // Stage 3: LM refinement on the inliers.
  std::vector<GlobalObservation> refine_obs;
  for (std::size_t k = 0; k < all_obs.size(); ++k) {
    if (ransac.inlier_mask[k]) {
      refine_obs.push_back(all_obs[k]);
    }
  }
  std::vector<CameraPose> cameras;
  for (const auto& camera : data.query.cameras) {
    cameras.push_back(camera.pose);
  }
  const RefineSummary refined = refine_transform_lm(
      ransac.transform, refine_obs, matched_points, cameras, pipeline_config.lm);

  // Stage 4: compose the target pose and compare against the pipeline.
  const CameraPose manual = camera_pose_in_global(
      data.query.cameras[data.query.target_camera].pose, refined.transform);
  CHECK(pose_distance(manual, *result.target_pose_global) < 1e-9);
  CHECK(test::rotation_error_deg(manual.rotation,
                                 result.target_pose_global->rotation) < 1e-9);
  CHECK(result.inlier_count == ransac.inlier_count);
}

TEST_CASE("evaluate reports zero errors for identical poses") {
  test::Rng rng(331);
  std::vector<LabeledResult> results;
  std::vector<LabeledTruth> truth;
  for (int i = 0; i < 4; ++i) {
    CameraPose pose;
    pose.rotation = rng.rotation();
    pose.translation = rng.vec3(-5.0, 5.0);
    LocalizationResult r;
    r.status = LocalizationResult::Status::SingleImageSuccess;
    r.target_pose_global = pose;
    results.push_back({"q" + std::to_string(i), r});
    truth.push_back({"q" + std::to_string(i), pose});
  }
  const EvalReport report = evaluate(results, truth);
  CHECK(report.registered_count == 4);
  CHECK(report.total_count == 4);
  CHECK(report.registration_rate == doctest::Approx(1.0));
  CHECK(report.location.max == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(report.orientation.max == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("evaluate measures center offsets and rotation angles") {
  CameraPose truth_pose;  // identity at origin
  CameraPose offset = truth_pose;
  offset.translation = -Vec3(3.0, 4.0, 0.0);  // center (3, 4, 0)
  LocalizationResult r;
  r.status = LocalizationResult::Status::ImageSetSuccess;
  r.target_pose_global = offset;
  const EvalReport report =
      evaluate({{"a", r}}, {{"a", truth_pose}});
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].location_error_m == doctest::Approx(5.0).epsilon(1e-12));

  CameraPose rotated = truth_pose;
  rotated.rotation = rotation_exp(Vec3(0.0, 1.092 * M_PI / 180.0, 0.0));
  LocalizationResult r2;
  r2.status = LocalizationResult::Status::ImageSetSuccess;
  r2.target_pose_global = rotated;
  const EvalReport rot_report = evaluate({{"a", r2}}, {{"a", truth_pose}});
  CHECK(rot_report.entries[0].orientation_error_deg ==
        doctest::Approx(1.092).epsilon(1e-9));
}

TEST_CASE("evaluate separates failed entries from the statistics") {
  CameraPose pose;
  LocalizationResult good;
  good.status = LocalizationResult::Status::SingleImageSuccess;
  good.target_pose_global = pose;
  LocalizationResult failed;  // stays Failed
  const EvalReport report =
      evaluate({{"a", good}, {"b", failed}}, {{"a", pose}, {"b", pose}});
  CHECK(report.registered_count == 1);
  CHECK(report.total_count == 2);
  CHECK(report.registration_rate == doctest::Approx(0.5));
  REQUIRE(report.entries.size() == 2);
  CHECK(report.entries[0].registered);
  CHECK_FALSE(report.entries[1].registered);
}

TEST_CASE("evaluate rejects mismatched or duplicate ids") {
  CameraPose pose;
  LocalizationResult r;
  r.status = LocalizationResult::Status::SingleImageSuccess;
  r.target_pose_global = pose;
  CHECK_THROWS_AS(evaluate({{"a", r}}, {{"b", pose}}), MismatchedIds);
  CHECK_THROWS_AS(evaluate({{"a", r}, {"a", r}}, {{"a", pose}, {"a", pose}}),
                  MismatchedIds);
  CHECK_THROWS_AS(evaluate({{"a", r}}, {{"a", pose}, {"b", pose}}),
                  MismatchedIds);
}

TEST_CASE("summarize computes order statistics") {
  const SummaryStats odd = summarize({3.0, 1.0, 2.0});
  CHECK(odd.min == 1.0);
  CHECK(odd.median == 2.0);
  CHECK(odd.max == 3.0);
  CHECK(odd.mean == doctest::Approx(2.0));
  const SummaryStats even = summarize({4.0, 1.0, 3.0, 2.0});
  CHECK(even.median == doctest::Approx(2.5));
  const SummaryStats empty = summarize({});
  CHECK(empty.min == 0.0);
  CHECK(empty.max == 0.0);
}
