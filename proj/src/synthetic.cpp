#include "camset/camera.hpp"
#include "camset/pipeline.hpp"
#include "camset/ransac.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace camset {

namespace {

double next_double(std::uint64_t& state) {
  // 53 mantissa bits of the mixed state, uniform in [0, 1).
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

double uniform(std::uint64_t& state, double lo, double hi) {
  return lo + (hi - lo) * next_double(state);
}

double gaussian(std::uint64_t& state) {
  // Box-Muller on two uniforms; the 1 - u shift keeps the log argument
  // strictly positive.
  const double u1 = 1.0 - next_double(state);
  const double u2 = next_double(state);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vec3 gaussian_vec3(std::uint64_t& state) {
  return Vec3(gaussian(state), gaussian(state), gaussian(state));
}

Vec3 random_unit_vec3(std::uint64_t& state) {
  while (true) {
    const Vec3 v = gaussian_vec3(state);
    const double norm = v.norm();
    if (norm > 1e-6) {
      return v / norm;
    }
  }
}

Eigen::VectorXd random_unit_descriptor(std::uint64_t& state, int dim) {
  Eigen::VectorXd d(dim);
  for (int i = 0; i < dim; ++i) {
    d(i) = gaussian(state);
  }
  const double norm = d.norm();
  return norm > 1e-9 ? Eigen::VectorXd(d / norm) : Eigen::VectorXd::Unit(dim, 0);
}

Descriptor noisy_descriptor(std::uint64_t& state, const Eigen::VectorXd& base,
                            double sigma) {
  if (sigma <= 0.0) {
    return Descriptor(base);
  }
  Eigen::VectorXd d = base;
  for (int i = 0; i < d.size(); ++i) {
    d(i) += sigma * gaussian(state);
  }
  const double norm = d.norm();
  if (norm > 1e-9) {
    d /= norm;
  }
  return Descriptor(std::move(d));
}

// Unit direction pushed off axis by a tangent-plane Gaussian.
Vec3 perturb_direction(std::uint64_t& state, const Vec3& d, double sigma) {
  if (sigma <= 0.0) {
    return d;
  }
  const Vec3 helper = std::abs(d.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 e1 = d.cross(helper).normalized();
  const Vec3 e2 = d.cross(e1).normalized();
  const Vec3 moved = d + sigma * gaussian(state) * e1 + sigma * gaussian(state) * e2;
  return moved.normalized();
}

}  // namespace

void SyntheticConfig::validate() const {
  if (!(scene_extent > 0.0)) {
    throw InvalidConfig("scene_extent must be positive");
  }
  if (num_scene_cameras < 1 || num_query_cameras < 1) {
    throw InvalidConfig("camera counts must be positive");
  }
  if (num_query_points < 6) {
    throw InvalidConfig("num_query_points must be at least 6");
  }
  if (num_distractor_points < 0) {
    throw InvalidConfig("num_distractor_points must be non-negative");
  }
  if (descriptor_dim < 2) {
    throw InvalidConfig("descriptor_dim must be at least 2");
  }
  if (descriptor_noise < 0.0 || ray_noise < 0.0 ||
      pose_rotation_noise_deg < 0.0 || pose_translation_noise_frac < 0.0) {
    throw InvalidConfig("noise levels must be non-negative");
  }
  if (outlier_fraction < 0.0 || outlier_fraction > 1.0) {
    throw InvalidConfig("outlier_fraction must lie in [0, 1]");
  }
  if (!(scale_min > 0.0) || !(scale_max >= scale_min)) {
    throw InvalidConfig("scale range is invalid");
  }
}

SyntheticDataset generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  std::uint64_t state = config.seed;

  SyntheticDataset data;

  // Query cameras along a short baseline, all looking roughly down +z of the
  // set frame. Camera 0 defines the frame.
  const double spacing = 0.5;
  const CameraIntrinsics intrinsics = CameraIntrinsics::rectilinear(800.0, 1600, 1200);
  std::vector<Vec3> true_centers;
  for (int i = 0; i < config.num_query_cameras; ++i) {
    CameraPose pose;
    if (i == 0) {
      pose.rotation = Mat3::Identity();
      pose.translation = Vec3::Zero();
      true_centers.push_back(Vec3::Zero());
    } else {
      const Vec3 center(spacing * i, uniform(state, -0.05, 0.05),
                        uniform(state, -0.05, 0.05));
      pose.rotation =
          rotation_exp(random_unit_vec3(state) * uniform(state, 0.0, 0.09));
      pose.translation = -pose.rotation * center;
      true_centers.push_back(center);
    }
    data.true_poses_set.push_back(pose);
    data.query.cameras.push_back({intrinsics, pose});
  }
  data.query.target_camera = config.num_query_cameras - 1;

  // Points inside the frustum every query camera shares.
  std::vector<Vec3> local_points;
  for (int j = 0; j < config.num_query_points; ++j) {
    const double z = uniform(state, 8.0, 25.0);
    const double ax = uniform(state, -0.38, 0.38);
    const double ay = uniform(state, -0.30, 0.30);
    local_points.emplace_back(z * std::tan(ax), z * std::tan(ay), z);
  }

  // The similarity placing the set inside the global scene box.
  const double half = 0.5 * config.scene_extent;
  const double scale = uniform(state, config.scale_min, config.scale_max);
  const Mat3 rotation =
      rotation_exp(random_unit_vec3(state) * uniform(state, 0.0, M_PI));
  const Vec3 center(uniform(state, -half, half), uniform(state, -half, half),
                    uniform(state, -half, half));
  data.true_transform = Sim3Transform(scale, rotation, center);
  const Sim3Transform global_from_set = data.true_transform.inverse();

  for (const auto& pose : data.true_poses_set) {
    data.true_poses_global.push_back(
        camera_pose_in_global(pose, data.true_transform));
  }

  // Scene points: the globals behind the query points first, distractors
  // after them.
  for (const auto& p : local_points) {
    data.scene.points.push_back(global_from_set.apply(p));
  }
  Vec3 lo = data.scene.points.front();
  Vec3 hi = lo;
  for (const auto& p : data.scene.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 pad = 0.25 * config.scene_extent * Vec3::Ones() + 0.25 * (hi - lo);
  lo -= pad;
  hi += pad;
  for (int j = 0; j < config.num_distractor_points; ++j) {
    data.scene.points.emplace_back(uniform(state, lo.x(), hi.x()),
                                   uniform(state, lo.y(), hi.y()),
                                   uniform(state, lo.z(), hi.z()));
  }

  // One descriptor identity per scene point, observed a few times with noise
  // as if by the mapping cameras.
  const int max_copies = std::min(3, config.num_scene_cameras);
  std::vector<Eigen::VectorXd> scene_bases;
  scene_bases.reserve(data.scene.points.size());
  for (std::size_t g = 0; g < data.scene.points.size(); ++g) {
    scene_bases.push_back(random_unit_descriptor(state, config.descriptor_dim));
    const int copies =
        1 + static_cast<int>(splitmix64(state) % static_cast<std::uint64_t>(max_copies));
    for (int c = 0; c < copies; ++c) {
      data.scene.descriptors.push_back(
          {static_cast<int>(g),
           noisy_descriptor(state, scene_bases[g], config.descriptor_noise)});
    }
  }
  data.scene.metadata["generator"] = "synthetic";

  // Which query points carry descriptors unrelated to their scene point.
  const int num_outliers = static_cast<int>(
      std::round(config.outlier_fraction * config.num_query_points));
  std::vector<Eigen::VectorXd> query_bases(local_points.size());
  data.true_scene_index.assign(local_points.size(), 0);
  for (std::size_t j = 0; j < local_points.size(); ++j) {
    if (static_cast<int>(j) < num_outliers) {
      query_bases[j] = random_unit_descriptor(state, config.descriptor_dim);
      data.true_scene_index[j] = -1;
    } else {
      query_bases[j] = scene_bases[j];
      data.true_scene_index[j] = static_cast<int>(j);
    }
  }

  // Project every point into every camera that sees it; each observation
  // carries its own noisy ray and descriptor.
  std::vector<int> obs_count(local_points.size(), 0);
  for (std::size_t j = 0; j < local_points.size(); ++j) {
    for (int i = 0; i < config.num_query_cameras; ++i) {
      const CameraPose& pose = data.true_poses_set[i];
      const Vec3 z = pose.rotation * local_points[j] + pose.translation;
      if (z.z() <= 0.1) {
        continue;
      }
      const Vec3 direction = perturb_direction(state, z.normalized(), config.ray_noise);
      Vec2 pixel;
      try {
        pixel = uncalibrate(direction, intrinsics);
      } catch (const BehindCamera&) {
        continue;
      }
      if (pixel.x() < 0.0 || pixel.x() > intrinsics.image_size.x() ||
          pixel.y() < 0.0 || pixel.y() > intrinsics.image_size.y()) {
        continue;
      }
      CameraSetModel::Observation obs;
      obs.camera = i;
      obs.point = static_cast<int>(j);
      obs.pixel = pixel;
      obs.descriptor =
          noisy_descriptor(state, query_bases[j], config.descriptor_noise);
      data.query.observations.push_back(std::move(obs));
      ++obs_count[j];
    }
  }

  // Drop points that ended up with fewer than two observations and compact
  // the indexing; the matching scene entries stay (extra map points are
  // harmless).
  std::vector<int> remap(local_points.size(), -1);
  int kept = 0;
  for (std::size_t j = 0; j < local_points.size(); ++j) {
    if (obs_count[j] >= 2) {
      remap[j] = kept++;
    }
  }
  data.query.points.clear();
  std::vector<int> kept_scene_index;
  for (std::size_t j = 0; j < local_points.size(); ++j) {
    if (remap[j] >= 0) {
      data.query.points.push_back(local_points[j]);
      kept_scene_index.push_back(data.true_scene_index[j]);
    }
  }
  data.true_scene_index = std::move(kept_scene_index);
  std::vector<CameraSetModel::Observation> kept_obs;
  for (auto& obs : data.query.observations) {
    if (remap[obs.point] >= 0) {
      obs.point = remap[obs.point];
      kept_obs.push_back(std::move(obs));
    }
  }
  data.query.observations = std::move(kept_obs);

  // Perturb the stored poses of cameras 1..n-1 to mimic an imperfect local
  // reconstruction; camera 0 pins the set frame and stays exact.
  if (config.pose_rotation_noise_deg > 0.0 || config.pose_translation_noise_frac > 0.0) {
    for (int i = 1; i < config.num_query_cameras; ++i) {
      CameraPose& pose = data.query.cameras[i].pose;
      Vec3 c = pose.center();
      if (config.pose_translation_noise_frac > 0.0) {
        c += config.pose_translation_noise_frac * spacing * gaussian_vec3(state);
      }
      if (config.pose_rotation_noise_deg > 0.0) {
        const double angle =
            config.pose_rotation_noise_deg * M_PI / 180.0 * gaussian(state);
        pose.rotation = rotation_exp(random_unit_vec3(state) * angle) * pose.rotation;
      }
      pose.translation = -pose.rotation * c;
    }
  }

  // Optionally overwrite the target camera's descriptors with unrelated
  // vectors, which starves single image localization while the other cameras
  // keep their good descriptors.
  if (config.corrupt_target_descriptors) {
    for (auto& obs : data.query.observations) {
      if (obs.camera == data.query.target_camera) {
        obs.descriptor =
            Descriptor(random_unit_descriptor(state, config.descriptor_dim));
      }
    }
  }

  data.query.validate();
  data.scene.validate();
  return data;
}

}  // namespace camset
