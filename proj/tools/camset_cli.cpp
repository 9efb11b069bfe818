// Command line shell around the library: synthetic data generation, descriptor
// indexing, matching, robust solving, refinement, localization, evaluation and
// report emission, all over the versioned text formats in io.hpp.
//
// Exit codes: 0 on success, 2 when a localization verb finishes with status
// Failed, 1 on any error.

#include "camset/camera.hpp"
#include "camset/dlt.hpp"
#include "camset/io.hpp"
#include "camset/match.hpp"
#include "camset/pipeline.hpp"
#include "camset/ransac.hpp"
#include "camset/refine.hpp"
#include "camset/types.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

using namespace camset;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string config_path;
  bool verbose = false;
};

void note(const GlobalOptions& global, const std::string& message) {
  if (global.verbose) {
    std::cerr << "camset: " << message << "\n";
  }
}

// Strict JSON pipeline configuration; unknown keys are errors so that typos
// cannot silently fall back to defaults.
void apply_json_config(const nlohmann::json& json, PipelineConfig& config) {
  for (const auto& [key, value] : json.items()) {
    if (key == "ratio_threshold") {
      config.ratio_threshold = value.get<double>();
    } else if (key == "single_image_min_inliers") {
      config.single_image_min_inliers = value.get<int>();
    } else if (key == "joint_refinement") {
      config.joint_refinement = value.get<bool>();
    } else if (key == "ransac") {
      for (const auto& [rkey, rvalue] : value.items()) {
        if (rkey == "max_iterations") {
          config.ransac.max_iterations = rvalue.get<int>();
        } else if (rkey == "inlier_angle_threshold") {
          config.ransac.inlier_angle_threshold = rvalue.get<double>();
        } else if (rkey == "min_inliers") {
          config.ransac.min_inliers = rvalue.get<int>();
        } else {
          throw InvalidConfig("unknown config key ransac." + rkey);
        }
      }
    } else if (key == "lm") {
      for (const auto& [lkey, lvalue] : value.items()) {
        if (lkey == "max_iterations") {
          config.lm.max_iterations = lvalue.get<int>();
        } else if (lkey == "initial_damping") {
          config.lm.initial_damping = lvalue.get<double>();
        } else if (lkey == "damping_increase") {
          config.lm.damping_increase = lvalue.get<double>();
        } else if (lkey == "damping_decrease") {
          config.lm.damping_decrease = lvalue.get<double>();
        } else if (lkey == "gradient_tolerance") {
          config.lm.gradient_tolerance = lvalue.get<double>();
        } else if (lkey == "step_tolerance") {
          config.lm.step_tolerance = lvalue.get<double>();
        } else if (lkey == "max_damping") {
          config.lm.max_damping = lvalue.get<double>();
        } else if (lkey == "schur_point_threshold") {
          config.lm.schur_point_threshold = lvalue.get<int>();
        } else {
          throw InvalidConfig("unknown config key lm." + lkey);
        }
      }
    } else {
      throw InvalidConfig("unknown config key " + key);
    }
  }
}

PipelineConfig make_pipeline_config(const GlobalOptions& global) {
  PipelineConfig config;
  if (!global.config_path.empty()) {
    std::ifstream in(global.config_path);
    if (!in) {
      throw IoError("cannot open config file " + global.config_path);
    }
    nlohmann::json json;
    try {
      in >> json;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidConfig("config file " + global.config_path + ": " + e.what());
    }
    apply_json_config(json, config);
    note(global, "loaded config " + global.config_path);
  }
  config.ransac.rng_seed = global.seed;
  return config;
}

std::string status_name(LocalizationResult::Status status) {
  switch (status) {
    case LocalizationResult::Status::SingleImageSuccess:
      return "single_image_success";
    case LocalizationResult::Status::ImageSetSuccess:
      return "image_set_success";
    case LocalizationResult::Status::Failed:
      return "failed";
  }
  return "failed";
}

// The per-point descriptor pools the image-set matcher consumes, in
// observation order; the same construction localize uses internally.
std::vector<std::pair<Vec3, std::vector<Descriptor>>> pooled_units(
    const CameraSetModel& model) {
  std::vector<std::pair<Vec3, std::vector<Descriptor>>> units(model.points.size());
  for (std::size_t j = 0; j < model.points.size(); ++j) {
    units[j].first = model.points[j];
  }
  for (const auto& obs : model.observations) {
    if (!obs.descriptor.empty()) {
      units[obs.point].second.push_back(obs.descriptor);
    }
  }
  return units;
}

// Every observation of a matched local point expanded into one set-frame ray
// correspondence plus the camera-frame observation for refinement.
struct MatchedRays {
  std::vector<RayPointCorrespondence> correspondences;
  std::vector<GlobalObservation> observations;  // compact global point ids
  std::vector<Vec3> matched_points;
};

MatchedRays expand_matches(const ScenePointCloud& scene,
                           const CameraSetModel& model,
                           const std::vector<PointMatch>& matches) {
  std::vector<int> scene_of_local(model.points.size(), -1);
  for (const auto& m : matches) {
    if (m.local_index < 0 || m.local_index >= static_cast<int>(model.points.size())) {
      throw InvalidConfig("match references local point " +
                          std::to_string(m.local_index));
    }
    if (m.scene_index < 0 || m.scene_index >= static_cast<int>(scene.points.size())) {
      throw InvalidConfig("match references scene point " +
                          std::to_string(m.scene_index));
    }
    scene_of_local[m.local_index] = m.scene_index;
  }
  MatchedRays out;
  std::map<int, int> compact;
  for (const auto& obs : model.observations) {
    const int g = scene_of_local[obs.point];
    if (g < 0) {
      continue;
    }
    const CameraSetModel::Camera& camera = model.cameras[obs.camera];
    const Vec3 camera_ray = calibrate(obs.pixel, camera.intrinsics);
    const Vec3 set_direction = camera.pose.rotation.transpose() * camera_ray;
    auto [it, inserted] =
        compact.try_emplace(g, static_cast<int>(out.matched_points.size()));
    if (inserted) {
      out.matched_points.push_back(scene.points[g]);
    }
    out.correspondences.push_back(
        {Ray(set_direction, camera.pose.center()), scene.points[g]});
    out.observations.push_back({obs.camera, camera_ray, it->second});
  }
  return out;
}

LocalizationResult result_from_transform(const CameraSetModel& model,
                                         const Sim3Transform& transform,
                                         int inlier_count) {
  LocalizationResult result;
  result.status = LocalizationResult::Status::ImageSetSuccess;
  result.transform = transform;
  result.inlier_count = inlier_count;
  result.per_camera_poses_global.reserve(model.cameras.size());
  for (const auto& camera : model.cameras) {
    result.per_camera_poses_global.push_back(
        camera_pose_in_global(camera.pose, transform));
  }
  result.target_pose_global = result.per_camera_poses_global[model.target_camera];
  return result;
}

int run_generate(const GlobalOptions& global, const SyntheticConfig& base,
                 const std::string& scene_path, const std::string& model_path,
                 const std::string& truth_path, bool binary_descriptors) {
  SyntheticConfig config = base;
  config.seed = global.seed;
  const SyntheticDataset dataset = generate_synthetic(config);
  save_scene(scene_path, dataset.scene, binary_descriptors);
  save_model(model_path, dataset.query);
  GroundTruth truth;
  truth.transform = dataset.true_transform;
  truth.target_camera = dataset.query.target_camera;
  truth.poses_global = dataset.true_poses_global;
  save_truth(truth_path, truth);
  note(global, "scene: " + std::to_string(dataset.scene.points.size()) +
                   " points, query: " +
                   std::to_string(dataset.query.points.size()) + " points, " +
                   std::to_string(dataset.query.cameras.size()) + " cameras");
  return 0;
}

int run_index(const GlobalOptions& global, const std::string& scene_path) {
  const ScenePointCloud scene = load_scene(scene_path);
  const DescriptorIndex index = DescriptorIndex::build(scene);
  (void)global;
  std::cout << "indexed " << index.size() << " descriptors of dimension "
            << index.dimension() << " over " << scene.points.size()
            << " points\n";
  return 0;
}

int run_match(const GlobalOptions& global, const std::string& scene_path,
              const std::string& model_path, const std::string& out_path,
              double ratio_threshold) {
  const ScenePointCloud scene = load_scene(scene_path);
  const CameraSetModel model = load_model(model_path);
  const DescriptorIndex index = DescriptorIndex::build(scene);
  const auto matches =
      match_bidirectional(pooled_units(model), index, ratio_threshold);
  save_matches(out_path, matches);
  note(global, std::to_string(matches.size()) + " of " +
                   std::to_string(model.points.size()) +
                   " local points matched");
  return 0;
}

int run_solve(const GlobalOptions& global, const PipelineConfig& config,
              const std::string& scene_path, const std::string& model_path,
              const std::string& matches_path, const std::string& out_path) {
  const ScenePointCloud scene = load_scene(scene_path);
  const CameraSetModel model = load_model(model_path);
  const auto matches = load_matches(matches_path);
  const MatchedRays rays = expand_matches(scene, model, matches);
  note(global, std::to_string(rays.correspondences.size()) +
                   " ray correspondences from " +
                   std::to_string(matches.size()) + " matches");

  LocalizationResult result;
  try {
    const RansacResult consensus =
        ransac_estimate(rays.correspondences, config.ransac);
    result = result_from_transform(model, consensus.transform,
                                   consensus.inlier_count);
  } catch (const NoConsensus& e) {
    result.failure_reason = e.what();
  } catch (const TooFewCorrespondences& e) {
    result.failure_reason = e.what();
  }
  save_result(out_path, result);
  std::cout << "status=" << status_name(result.status)
            << " inliers=" << result.inlier_count << "\n";
  return result.registered() ? 0 : 2;
}

int run_refine(const GlobalOptions& global, const PipelineConfig& config,
               const std::string& scene_path, const std::string& model_path,
               const std::string& matches_path, const std::string& in_path,
               const std::string& out_path) {
  const ScenePointCloud scene = load_scene(scene_path);
  const CameraSetModel model = load_model(model_path);
  const auto matches = load_matches(matches_path);
  const LocalizationResult input = load_result(in_path);
  if (!input.transform) {
    throw InvalidConfig("input result " + in_path + " carries no transform");
  }
  const MatchedRays rays = expand_matches(scene, model, matches);

  // Inliers are re-derived from the input transform under the configured
  // angle threshold; this reproduces the mask a preceding solve ended with,
  // because its final refit re-scored against the same rule.
  std::vector<GlobalObservation> inlier_obs;
  for (std::size_t k = 0; k < rays.correspondences.size(); ++k) {
    if (prediction_angle(rays.correspondences[k], *input.transform) <
        config.ransac.inlier_angle_threshold) {
      inlier_obs.push_back(rays.observations[k]);
    }
  }
  note(global, std::to_string(inlier_obs.size()) + " of " +
                   std::to_string(rays.correspondences.size()) +
                   " correspondences inline with the input transform");

  std::vector<CameraPose> poses;
  poses.reserve(model.cameras.size());
  for (const auto& camera : model.cameras) {
    poses.push_back(camera.pose);
  }
  const RefineSummary refined = refine_transform_lm(
      *input.transform, inlier_obs, rays.matched_points, poses, config.lm);
  Sim3Transform transform = refined.transform;
  note(global, "transform refinement: cost " +
                   format_double(refined.initial_cost) + " -> " +
                   format_double(refined.final_cost));

  CameraSetModel refined_model = model;
  if (config.joint_refinement && model.cameras.size() >= 2) {
    JointProblem joint;
    joint.transform = transform;
    joint.cameras = poses;
    joint.local_points = model.points;
    joint.global_points = rays.matched_points;
    joint.global_obs = inlier_obs;
    joint.local_obs.reserve(model.observations.size());
    for (const auto& obs : model.observations) {
      const Vec3 camera_ray =
          calibrate(obs.pixel, model.cameras[obs.camera].intrinsics);
      joint.local_obs.push_back({obs.camera, camera_ray, obs.point});
    }
    const JointRefineSummary joint_result = refine_joint(joint, config.lm);
    transform = joint_result.problem.transform;
    for (std::size_t c = 0; c < refined_model.cameras.size(); ++c) {
      refined_model.cameras[c].pose = joint_result.problem.cameras[c];
    }
    note(global, "joint refinement: cost " +
                     format_double(joint_result.initial_cost) + " -> " +
                     format_double(joint_result.final_cost));
  }

  LocalizationResult result = result_from_transform(
      refined_model, transform, static_cast<int>(inlier_obs.size()));
  save_result(out_path, result);
  std::cout << "status=" << status_name(result.status)
            << " inliers=" << result.inlier_count << "\n";
  return 0;
}

int run_localize(const GlobalOptions& global, const PipelineConfig& config,
                 const std::string& scene_path, const std::string& model_path,
                 const std::string& out_path) {
  const ScenePointCloud scene = load_scene(scene_path);
  const CameraSetModel model = load_model(model_path);
  const DescriptorIndex index = DescriptorIndex::build(scene);
  const LocalizationResult result = localize(scene, index, model, config);
  save_result(out_path, result);
  std::cout << "status=" << status_name(result.status)
            << " inliers=" << result.inlier_count << "\n";
  if (!result.registered()) {
    note(global, "failure: " + result.failure_reason);
    return 2;
  }
  return 0;
}

int run_evaluate(const GlobalOptions& global,
                 const std::vector<std::string>& result_paths,
                 const std::vector<std::string>& truth_paths,
                 const std::vector<std::string>& ids,
                 const std::string& out_path) {
  if (result_paths.size() != truth_paths.size()) {
    throw InvalidConfig("evaluate needs one --truth per --result");
  }
  if (!ids.empty() && ids.size() != result_paths.size()) {
    throw InvalidConfig("evaluate --id list must pair with --result list");
  }
  std::vector<LabeledResult> results;
  std::vector<LabeledTruth> truths;
  for (std::size_t i = 0; i < result_paths.size(); ++i) {
    const std::string id =
        ids.empty() ? std::filesystem::path(result_paths[i]).stem().string()
                    : ids[i];
    results.push_back({id, load_result(result_paths[i])});
    const GroundTruth truth = load_truth(truth_paths[i]);
    if (truth.target_camera < 0 ||
        truth.target_camera >= static_cast<int>(truth.poses_global.size())) {
      throw InvalidConfig("truth file " + truth_paths[i] +
                          " has no pose for its target camera");
    }
    truths.push_back({id, truth.poses_global[truth.target_camera]});
  }
  const EvalReport report = evaluate(results, truths);
  save_eval(out_path, report);
  (void)global;
  std::cout << "registered " << report.registered_count << "/"
            << report.total_count << " (rate " << report.registration_rate
            << "), location mean " << report.location.mean
            << " m, orientation mean " << report.orientation.mean << " deg\n";
  return 0;
}

int run_report(const GlobalOptions& global,
               const std::vector<std::string>& labeled_evals,
               const std::string& text_path, const std::string& csv_path) {
  std::vector<std::pair<std::string, EvalReport>> reports;
  for (const auto& entry : labeled_evals) {
    const auto split = entry.find('=');
    if (split == std::string::npos || split == 0 ||
        split + 1 == entry.size()) {
      throw InvalidConfig("--eval expects LABEL=PATH, got " + entry);
    }
    reports.emplace_back(entry.substr(0, split),
                         load_eval(entry.substr(split + 1)));
  }
  (void)global;
  if (!text_path.empty()) {
    std::ofstream out(text_path);
    if (!out) {
      throw IoError("cannot open " + text_path);
    }
    write_report_text(out, reports);
  }
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) {
      throw IoError("cannot open " + csv_path);
    }
    write_report_csv(out, reports);
  }
  if (text_path.empty() && csv_path.empty()) {
    write_report_text(std::cout, reports);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"camera set localization toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--seed", global.seed,
                 "seed for data generation and robust estimation");
  app.add_option("--config", global.config_path,
                 "JSON pipeline configuration file")
      ->envname("CAMSET_CONFIG");
  app.add_flag("-v,--verbose", global.verbose, "progress notes on stderr");

  // generate
  auto* generate = app.add_subcommand(
      "generate", "synthesize a scene, a query camera set, and ground truth");
  SyntheticConfig synthetic;
  std::string scene_path;
  std::string model_path;
  std::string truth_path;
  std::string matches_path;
  std::string in_path;
  std::string out_path;
  bool binary_descriptors = false;
  generate->add_option("--scene", scene_path, "output scene file")->required();
  generate->add_option("--model", model_path, "output query model file")
      ->required();
  generate->add_option("--truth", truth_path, "output ground truth file")
      ->required();
  generate->add_flag("--binary-descriptors", binary_descriptors,
                     "store scene descriptors in a binary sidecar");
  generate->add_option("--scene-extent", synthetic.scene_extent,
                       "scene box edge in meters");
  generate->add_option("--scene-cameras", synthetic.num_scene_cameras,
                       "panoramic scene cameras");
  generate->add_option("--query-cameras", synthetic.num_query_cameras,
                       "rectilinear query cameras");
  generate->add_option("--points", synthetic.num_query_points,
                       "covisible query points");
  generate->add_option("--distractors", synthetic.num_distractor_points,
                       "distractor scene points");
  generate->add_option("--descriptor-dim", synthetic.descriptor_dim,
                       "descriptor dimension");
  generate->add_option("--descriptor-noise", synthetic.descriptor_noise,
                       "descriptor noise sigma");
  generate->add_option("--ray-noise", synthetic.ray_noise,
                       "angular observation noise in radians");
  generate->add_option("--pose-rotation-noise-deg",
                       synthetic.pose_rotation_noise_deg,
                       "intra-set rotation perturbation in degrees");
  generate->add_option("--pose-translation-noise",
                       synthetic.pose_translation_noise_frac,
                       "intra-set translation perturbation, fraction of baseline");
  generate->add_option("--outlier-fraction", synthetic.outlier_fraction,
                       "fraction of query points given random descriptors");
  generate->add_flag("--corrupt-target", synthetic.corrupt_target_descriptors,
                     "replace the target camera's descriptors with noise");
  generate->add_option("--scale-min", synthetic.scale_min,
                       "similarity scale lower bound");
  generate->add_option("--scale-max", synthetic.scale_max,
                       "similarity scale upper bound");

  // index
  auto* index = app.add_subcommand(
      "index", "build the descriptor index over a scene and report its size");
  index->add_option("--scene", scene_path, "scene file")->required();

  // match
  auto* match = app.add_subcommand(
      "match", "match pooled query descriptors against a scene");
  double ratio_threshold = kDefaultRatioThreshold;
  match->add_option("--scene", scene_path, "scene file")->required();
  match->add_option("--model", model_path, "query model file")->required();
  match->add_option("--out", out_path, "output matches file")->required();
  match->add_option("--ratio", ratio_threshold, "ratio test threshold");

  // solve
  auto* solve = app.add_subcommand(
      "solve", "robust similarity estimation from saved matches");
  int ransac_iterations = -1;
  double ransac_threshold = -1.0;
  int ransac_min_inliers = -1;
  solve->add_option("--scene", scene_path, "scene file")->required();
  solve->add_option("--model", model_path, "query model file")->required();
  solve->add_option("--matches", matches_path, "matches file")->required();
  solve->add_option("--out", out_path, "output result file")->required();
  solve->add_option("--ransac-iterations", ransac_iterations,
                    "consensus iterations");
  solve->add_option("--ransac-threshold", ransac_threshold,
                    "inlier angle threshold in radians");
  solve->add_option("--ransac-min-inliers", ransac_min_inliers,
                    "minimum consensus size");

  // refine
  auto* refine = app.add_subcommand(
      "refine", "refine a solved transform, optionally jointly with the set");
  bool no_joint = false;
  refine->add_option("--scene", scene_path, "scene file")->required();
  refine->add_option("--model", model_path, "query model file")->required();
  refine->add_option("--matches", matches_path, "matches file")->required();
  refine->add_option("--in", in_path, "input result file")->required();
  refine->add_option("--out", out_path, "output result file")->required();
  refine->add_flag("--no-joint", no_joint,
                   "refine the transform only, keep intra-set poses fixed");

  // localize
  auto* localize_cmd = app.add_subcommand(
      "localize", "full localization pipeline for one query set");
  int single_image_min_inliers = -1;
  localize_cmd->add_option("--scene", scene_path, "scene file")->required();
  localize_cmd->add_option("--model", model_path, "query model file")
      ->required();
  localize_cmd->add_option("--out", out_path, "output result file")->required();
  localize_cmd->add_option("--ratio", ratio_threshold, "ratio test threshold");
  localize_cmd->add_option("--min-inliers", single_image_min_inliers,
                           "single image inlier threshold");
  localize_cmd->add_flag("--no-joint", no_joint,
                         "skip the joint refinement stage");
  localize_cmd->add_option("--ransac-iterations", ransac_iterations,
                           "consensus iterations");
  localize_cmd->add_option("--ransac-threshold", ransac_threshold,
                           "inlier angle threshold in radians");
  localize_cmd->add_option("--ransac-min-inliers", ransac_min_inliers,
                           "minimum consensus size");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand(
      "evaluate", "compare localization results against ground truth");
  std::vector<std::string> result_paths;
  std::vector<std::string> truth_paths;
  std::vector<std::string> ids;
  evaluate_cmd->add_option("--result", result_paths, "result file, repeatable")
      ->required();
  evaluate_cmd->add_option("--truth", truth_paths,
                           "ground truth file, repeatable, paired in order")
      ->required();
  evaluate_cmd->add_option("--id", ids,
                           "labels paired with --result; default file stems");
  evaluate_cmd->add_option("--out", out_path, "output evaluation file")
      ->required();

  // report
  auto* report = app.add_subcommand(
      "report", "emit registration and error tables from evaluations");
  std::vector<std::string> labeled_evals;
  std::string text_path;
  std::string csv_path;
  report->add_option("--eval", labeled_evals,
                     "LABEL=PATH evaluation file, repeatable")
      ->required();
  report->add_option("--text", text_path, "write the plain text table here");
  report->add_option("--csv", csv_path, "write the CSV table here");

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig config = make_pipeline_config(global);
    if (ratio_threshold != kDefaultRatioThreshold) {
      config.ratio_threshold = ratio_threshold;
    }
    if (single_image_min_inliers >= 0) {
      config.single_image_min_inliers = single_image_min_inliers;
    }
    if (no_joint) {
      config.joint_refinement = false;
    }
    if (ransac_iterations >= 0) {
      config.ransac.max_iterations = ransac_iterations;
    }
    if (ransac_threshold >= 0.0) {
      config.ransac.inlier_angle_threshold = ransac_threshold;
    }
    if (ransac_min_inliers >= 0) {
      config.ransac.min_inliers = ransac_min_inliers;
    }

    if (generate->parsed()) {
      return run_generate(global, synthetic, scene_path, model_path,
                          truth_path, binary_descriptors);
    }
    if (index->parsed()) {
      return run_index(global, scene_path);
    }
    if (match->parsed()) {
      return run_match(global, scene_path, model_path, out_path,
                       config.ratio_threshold);
    }
    if (solve->parsed()) {
      return run_solve(global, config, scene_path, model_path, matches_path,
                       out_path);
    }
    if (refine->parsed()) {
      return run_refine(global, config, scene_path, model_path, matches_path,
                        in_path, out_path);
    }
    if (localize_cmd->parsed()) {
      return run_localize(global, config, scene_path, model_path, out_path);
    }
    if (evaluate_cmd->parsed()) {
      return run_evaluate(global, result_paths, truth_paths, ids, out_path);
    }
    if (report->parsed()) {
      return run_report(global, labeled_evals, text_path, csv_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "camset: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
