// Python bindings for the main library operations: camera mappings, the DLT
// similarity solver, robust estimation, refinement, matching, the synthetic
// harness, the localization pipeline, and file round trips.

#include "camset/camera.hpp"
#include "camset/dlt.hpp"
#include "camset/io.hpp"
#include "camset/local_model.hpp"
#include "camset/match.hpp"
#include "camset/pipeline.hpp"
#include "camset/ransac.hpp"
#include "camset/refine.hpp"
#include "camset/types.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>
#include <vector>

namespace py = pybind11;
using namespace camset;

namespace {

// Three N x 3 arrays (set-frame ray directions, ray centers, global points)
// zipped into solver correspondences.
std::vector<RayPointCorrespondence> make_correspondences(
    const Eigen::Ref<const Eigen::MatrixXd>& directions,
    const Eigen::Ref<const Eigen::MatrixXd>& centers,
    const Eigen::Ref<const Eigen::MatrixXd>& points) {
  if (directions.cols() != 3 || centers.cols() != 3 || points.cols() != 3) {
    throw InvalidConfig("correspondence arrays must be N x 3");
  }
  if (directions.rows() != centers.rows() || directions.rows() != points.rows()) {
    throw InvalidConfig("correspondence arrays must have matching row counts");
  }
  std::vector<RayPointCorrespondence> correspondences;
  correspondences.reserve(directions.rows());
  for (Eigen::Index i = 0; i < directions.rows(); ++i) {
    correspondences.push_back(
        {Ray(directions.row(i), centers.row(i)), points.row(i)});
  }
  return correspondences;
}

// Set-frame rays recast as camera-frame observations of single-ray cameras
// with identity rotation, which leaves the residuals unchanged.
std::pair<std::vector<GlobalObservation>, std::vector<CameraPose>>
make_observations(const std::vector<RayPointCorrespondence>& correspondences) {
  std::vector<GlobalObservation> observations;
  std::vector<CameraPose> cameras;
  observations.reserve(correspondences.size());
  cameras.reserve(correspondences.size());
  for (std::size_t i = 0; i < correspondences.size(); ++i) {
    CameraPose pose;
    pose.translation = -correspondences[i].ray.center;
    cameras.push_back(pose);
    observations.push_back({static_cast<int>(i), correspondences[i].ray.direction,
                            static_cast<int>(i)});
  }
  return {std::move(observations), std::move(cameras)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "generalized camera set localization";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::enum_<CameraModel>(m, "CameraModel")
      .value("Panoramic", CameraModel::Panoramic)
      .value("Rectilinear", CameraModel::Rectilinear);

  py::class_<CameraIntrinsics>(m, "CameraIntrinsics")
      .def(py::init<>())
      .def_static("panoramic", &CameraIntrinsics::panoramic, py::arg("width"),
                  py::arg("height"))
      .def_static("rectilinear", &CameraIntrinsics::rectilinear,
                  py::arg("focal"), py::arg("width"), py::arg("height"))
      .def_readwrite("model", &CameraIntrinsics::model)
      .def_readwrite("focal", &CameraIntrinsics::focal)
      .def_readwrite("principal_point", &CameraIntrinsics::principal_point)
      .def_readwrite("image_size", &CameraIntrinsics::image_size);

  py::class_<CameraPose>(m, "CameraPose")
      .def(py::init<>())
      .def(py::init([](const Mat3& rotation, const Vec3& translation) {
             CameraPose pose;
             pose.rotation = rotation;
             pose.translation = translation;
             pose.validate();
             return pose;
           }),
           py::arg("rotation"), py::arg("translation"))
      .def_readwrite("rotation", &CameraPose::rotation)
      .def_readwrite("translation", &CameraPose::translation)
      .def("matrix", &CameraPose::matrix)
      .def("center", &CameraPose::center)
      .def("apply", &CameraPose::apply, py::arg("point"));

  py::class_<Sim3Transform>(m, "Sim3Transform")
      .def(py::init<>())
      .def(py::init<double, const Mat3&, const Vec3&>(), py::arg("scale"),
           py::arg("rotation"), py::arg("center"))
      .def_property_readonly("scale", &Sim3Transform::scale)
      .def_property_readonly("rotation", &Sim3Transform::rotation)
      .def_property_readonly("center", &Sim3Transform::center)
      .def("as_matrix", &Sim3Transform::as_matrix)
      .def("apply",
           py::overload_cast<const Vec3&>(&Sim3Transform::apply, py::const_),
           py::arg("point"))
      .def("inverse", &Sim3Transform::inverse)
      .def("compose", &Sim3Transform::compose, py::arg("other"));

  py::class_<Descriptor>(m, "Descriptor")
      .def(py::init<>())
      .def(py::init<Eigen::VectorXd>(), py::arg("values"))
      .def_readwrite("values", &Descriptor::values)
      .def("empty", &Descriptor::empty);
  py::implicitly_convertible<Eigen::VectorXd, Descriptor>();

  m.def("rotation_exp", &rotation_exp, py::arg("w"));
  m.def("rotation_log", &rotation_log, py::arg("rotation"));
  m.def("rotation_angle_deg", &rotation_angle_deg, py::arg("a"), py::arg("b"));
  m.def("calibrate", &calibrate, py::arg("pixel"), py::arg("intrinsics"));
  m.def("uncalibrate", &uncalibrate, py::arg("direction"),
        py::arg("intrinsics"));

  py::class_<DltDiagnostics>(m, "DltDiagnostics")
      .def_readonly("condition_number", &DltDiagnostics::condition_number)
      .def_readonly("residual_rms", &DltDiagnostics::residual_rms)
      .def_readonly("num_correspondences",
                    &DltDiagnostics::num_correspondences);

  m.def(
      "estimate_pose_dlt",
      [](const Eigen::Ref<const Eigen::MatrixXd>& directions,
         const Eigen::Ref<const Eigen::MatrixXd>& centers,
         const Eigen::Ref<const Eigen::MatrixXd>& points) {
        return estimate_pose_dlt(make_correspondences(directions, centers, points));
      },
      py::arg("directions"), py::arg("centers"), py::arg("points"));

  m.def(
      "prediction_angles",
      [](const Eigen::Ref<const Eigen::MatrixXd>& directions,
         const Eigen::Ref<const Eigen::MatrixXd>& centers,
         const Eigen::Ref<const Eigen::MatrixXd>& points,
         const Sim3Transform& transform) {
        const auto correspondences =
            make_correspondences(directions, centers, points);
        Eigen::VectorXd angles(correspondences.size());
        for (std::size_t i = 0; i < correspondences.size(); ++i) {
          angles[i] = prediction_angle(correspondences[i], transform);
        }
        return angles;
      },
      py::arg("directions"), py::arg("centers"), py::arg("points"),
      py::arg("transform"));

  py::class_<RansacConfig>(m, "RansacConfig")
      .def(py::init<>())
      .def_readwrite("max_iterations", &RansacConfig::max_iterations)
      .def_readwrite("inlier_angle_threshold",
                     &RansacConfig::inlier_angle_threshold)
      .def_readwrite("min_inliers", &RansacConfig::min_inliers)
      .def_readwrite("rng_seed", &RansacConfig::rng_seed);

  py::class_<RansacResult>(m, "RansacResult")
      .def_readonly("transform", &RansacResult::transform)
      .def_readonly("inlier_mask", &RansacResult::inlier_mask)
      .def_readonly("inlier_count", &RansacResult::inlier_count)
      .def_readonly("diagnostics", &RansacResult::diagnostics);

  m.def(
      "ransac_estimate",
      [](const Eigen::Ref<const Eigen::MatrixXd>& directions,
         const Eigen::Ref<const Eigen::MatrixXd>& centers,
         const Eigen::Ref<const Eigen::MatrixXd>& points,
         const RansacConfig& config) {
        return ransac_estimate(make_correspondences(directions, centers, points),
                               config);
      },
      py::arg("directions"), py::arg("centers"), py::arg("points"),
      py::arg("config") = RansacConfig());

  py::class_<LmConfig>(m, "LmConfig")
      .def(py::init<>())
      .def_readwrite("max_iterations", &LmConfig::max_iterations)
      .def_readwrite("initial_damping", &LmConfig::initial_damping)
      .def_readwrite("damping_increase", &LmConfig::damping_increase)
      .def_readwrite("damping_decrease", &LmConfig::damping_decrease)
      .def_readwrite("gradient_tolerance", &LmConfig::gradient_tolerance)
      .def_readwrite("step_tolerance", &LmConfig::step_tolerance)
      .def_readwrite("max_damping", &LmConfig::max_damping)
      .def_readwrite("schur_point_threshold", &LmConfig::schur_point_threshold);

  py::class_<RefineSummary>(m, "RefineSummary")
      .def_readonly("transform", &RefineSummary::transform)
      .def_readonly("initial_cost", &RefineSummary::initial_cost)
      .def_readonly("final_cost", &RefineSummary::final_cost)
      .def_readonly("final_norm_sum", &RefineSummary::final_norm_sum)
      .def_readonly("iterations", &RefineSummary::iterations);

  m.def(
      "refine_sim3",
      [](const Sim3Transform& t_init,
         const Eigen::Ref<const Eigen::MatrixXd>& directions,
         const Eigen::Ref<const Eigen::MatrixXd>& centers,
         const Eigen::Ref<const Eigen::MatrixXd>& points,
         const LmConfig& config) {
        const auto correspondences =
            make_correspondences(directions, centers, points);
        const auto [observations, cameras] = make_observations(correspondences);
        std::vector<Vec3> global_points;
        global_points.reserve(correspondences.size());
        for (const auto& c : correspondences) {
          global_points.push_back(c.global_point);
        }
        return refine_transform_lm(t_init, observations, global_points, cameras,
                                   config);
      },
      py::arg("transform"), py::arg("directions"), py::arg("centers"),
      py::arg("points"), py::arg("config") = LmConfig());

  py::class_<ScenePointCloud::PointDescriptor>(m, "PointDescriptor")
      .def(py::init<>())
      .def_readwrite("point", &ScenePointCloud::PointDescriptor::point)
      .def_readwrite("descriptor", &ScenePointCloud::PointDescriptor::descriptor);

  py::class_<ScenePointCloud>(m, "ScenePointCloud")
      .def(py::init<>())
      .def_readwrite("points", &ScenePointCloud::points)
      .def_readwrite("descriptors", &ScenePointCloud::descriptors)
      .def_readwrite("metadata", &ScenePointCloud::metadata)
      .def("validate", &ScenePointCloud::validate);

  py::class_<DescriptorIndex>(m, "DescriptorIndex")
      .def_static("build",
                  py::overload_cast<const ScenePointCloud&>(&DescriptorIndex::build),
                  py::arg("scene"))
      .def_property_readonly("dimension", &DescriptorIndex::dimension)
      .def("__len__", &DescriptorIndex::size);

  py::class_<PointMatch>(m, "PointMatch")
      .def_readonly("local_index", &PointMatch::local_index)
      .def_readonly("scene_index", &PointMatch::scene_index)
      .def_readonly("descriptor_distance", &PointMatch::descriptor_distance)
      .def_readonly("ratio", &PointMatch::ratio)
      .def("__repr__", [](const PointMatch& match) {
        return "PointMatch(local_index=" + std::to_string(match.local_index) +
               ", scene_index=" + std::to_string(match.scene_index) + ")";
      });

  m.def("match_bidirectional", &match_bidirectional, py::arg("local_points"),
        py::arg("scene_index"),
        py::arg("ratio_threshold") = kDefaultRatioThreshold);

  py::class_<CameraSetModel::Camera>(m, "SetCamera")
      .def(py::init<>())
      .def_readwrite("intrinsics", &CameraSetModel::Camera::intrinsics)
      .def_readwrite("pose", &CameraSetModel::Camera::pose);

  py::class_<CameraSetModel::Observation>(m, "SetObservation")
      .def(py::init<>())
      .def_readwrite("camera", &CameraSetModel::Observation::camera)
      .def_readwrite("point", &CameraSetModel::Observation::point)
      .def_readwrite("pixel", &CameraSetModel::Observation::pixel)
      .def_readwrite("descriptor", &CameraSetModel::Observation::descriptor);

  py::class_<CameraSetModel>(m, "CameraSetModel")
      .def(py::init<>())
      .def_readwrite("cameras", &CameraSetModel::cameras)
      .def_readwrite("points", &CameraSetModel::points)
      .def_readwrite("observations", &CameraSetModel::observations)
      .def_readwrite("target_camera", &CameraSetModel::target_camera)
      .def("validate", &CameraSetModel::validate);

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("ratio_threshold", &PipelineConfig::ratio_threshold)
      .def_readwrite("single_image_min_inliers",
                     &PipelineConfig::single_image_min_inliers)
      .def_readwrite("ransac", &PipelineConfig::ransac)
      .def_readwrite("lm", &PipelineConfig::lm)
      .def_readwrite("joint_refinement", &PipelineConfig::joint_refinement);

  py::enum_<LocalizationResult::Status>(m, "Status")
      .value("SingleImageSuccess", LocalizationResult::Status::SingleImageSuccess)
      .value("ImageSetSuccess", LocalizationResult::Status::ImageSetSuccess)
      .value("Failed", LocalizationResult::Status::Failed);

  py::class_<LocalizationResult>(m, "LocalizationResult")
      .def_readonly("status", &LocalizationResult::status)
      .def_readonly("target_pose_global", &LocalizationResult::target_pose_global)
      .def_readonly("transform", &LocalizationResult::transform)
      .def_readonly("inlier_count", &LocalizationResult::inlier_count)
      .def_readonly("per_camera_poses_global",
                    &LocalizationResult::per_camera_poses_global)
      .def_readonly("failure_reason", &LocalizationResult::failure_reason)
      .def("registered", &LocalizationResult::registered);

  m.def("localize", &localize, py::arg("scene"), py::arg("scene_index"),
        py::arg("query"), py::arg("config") = PipelineConfig());
  m.def("camera_pose_in_global", &camera_pose_in_global, py::arg("set_pose"),
        py::arg("transform"));

  py::class_<SyntheticConfig>(m, "SyntheticConfig")
      .def(py::init<>())
      .def_readwrite("scene_extent", &SyntheticConfig::scene_extent)
      .def_readwrite("num_scene_cameras", &SyntheticConfig::num_scene_cameras)
      .def_readwrite("num_query_cameras", &SyntheticConfig::num_query_cameras)
      .def_readwrite("num_query_points", &SyntheticConfig::num_query_points)
      .def_readwrite("num_distractor_points",
                     &SyntheticConfig::num_distractor_points)
      .def_readwrite("descriptor_dim", &SyntheticConfig::descriptor_dim)
      .def_readwrite("descriptor_noise", &SyntheticConfig::descriptor_noise)
      .def_readwrite("ray_noise", &SyntheticConfig::ray_noise)
      .def_readwrite("pose_rotation_noise_deg",
                     &SyntheticConfig::pose_rotation_noise_deg)
      .def_readwrite("pose_translation_noise_frac",
                     &SyntheticConfig::pose_translation_noise_frac)
      .def_readwrite("outlier_fraction", &SyntheticConfig::outlier_fraction)
      .def_readwrite("corrupt_target_descriptors",
                     &SyntheticConfig::corrupt_target_descriptors)
      .def_readwrite("scale_min", &SyntheticConfig::scale_min)
      .def_readwrite("scale_max", &SyntheticConfig::scale_max)
      .def_readwrite("seed", &SyntheticConfig::seed);

  py::class_<SyntheticDataset>(m, "SyntheticDataset")
      .def_readonly("scene", &SyntheticDataset::scene)
      .def_readonly("query", &SyntheticDataset::query)
      .def_readonly("true_transform", &SyntheticDataset::true_transform)
      .def_readonly("true_poses_set", &SyntheticDataset::true_poses_set)
      .def_readonly("true_poses_global", &SyntheticDataset::true_poses_global)
      .def_readonly("true_scene_index", &SyntheticDataset::true_scene_index);

  m.def("generate_synthetic", &generate_synthetic, py::arg("config"));

  py::class_<GroundTruth>(m, "GroundTruth")
      .def(py::init<>())
      .def_readwrite("transform", &GroundTruth::transform)
      .def_readwrite("target_camera", &GroundTruth::target_camera)
      .def_readwrite("poses_global", &GroundTruth::poses_global);

  m.def("save_scene", &save_scene, py::arg("path"), py::arg("scene"),
        py::arg("binary_descriptors") = false);
  m.def("load_scene", &load_scene, py::arg("path"));
  m.def("save_model", &save_model, py::arg("path"), py::arg("model"));
  m.def("load_model", &load_model, py::arg("path"));
  m.def("save_result", &save_result, py::arg("path"), py::arg("result"));
  m.def("load_result", &load_result, py::arg("path"));
  m.def("save_truth", &save_truth, py::arg("path"), py::arg("truth"));
  m.def("load_truth", &load_truth, py::arg("path"));

  m.attr("MIN_DLT_CORRESPONDENCES") = kMinDltCorrespondences;
  m.attr("DEFAULT_RATIO_THRESHOLD") = kDefaultRatioThreshold;
}
