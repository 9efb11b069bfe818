#include "camset/io.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace camset {

static_assert(std::endian::native == std::endian::little,
              "binary descriptor files assume a little-endian host");

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

constexpr char kDescriptorMagic[8] = {'C', 'S', 'E', 'T', 'D', 'S', 'B', '1'};

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
  throw IoError(path + ":" + std::to_string(line) + ": " + what);
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  return out;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) {
    throw IoError("cannot open " + path + " for reading");
  }
  return in;
}

// Splits a record line into whitespace-separated tokens.
std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream stream(line);
  std::vector<std::string> tokens;
  std::string token;
  while (stream >> token) {
    tokens.push_back(token);
  }
  return tokens;
}

double parse_double(const std::string& token, const std::string& path, int line) {
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    fail(path, line, "expected a number, got '" + token + "'");
  }
  return value;
}

long parse_int(const std::string& token, const std::string& path, int line) {
  char* end = nullptr;
  const long value = std::strtol(token.c_str(), &end, 10);
  if (end == token.c_str() || *end != '\0') {
    fail(path, line, "expected an integer, got '" + token + "'");
  }
  return value;
}

void expect_tokens(const std::vector<std::string>& tokens, std::size_t count,
                   const std::string& path, int line) {
  if (tokens.size() != count) {
    fail(path, line,
         "expected " + std::to_string(count) + " fields, got " +
             std::to_string(tokens.size()));
  }
}

// Reads and checks the "<format> 1" header line.
int read_header(std::istream& in, const std::string& format,
                const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) {
    fail(path, 1, "missing header");
  }
  const auto tokens = tokenize(line);
  if (tokens.size() != 2 || tokens[0] != format || tokens[1] != "1") {
    fail(path, 1, "expected header '" + format + " 1'");
  }
  return 1;
}

void write_mat3(std::ostream& out, const Mat3& m) {
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      out << ' ' << format_double(m(r, c));
    }
  }
}

Mat3 parse_mat3(const std::vector<std::string>& tokens, std::size_t offset,
                const std::string& path, int line) {
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      m(r, c) = parse_double(tokens[offset + 3 * r + c], path, line);
    }
  }
  return m;
}

Vec3 parse_vec3(const std::vector<std::string>& tokens, std::size_t offset,
                const std::string& path, int line) {
  return Vec3(parse_double(tokens[offset], path, line),
              parse_double(tokens[offset + 1], path, line),
              parse_double(tokens[offset + 2], path, line));
}

void write_pose_fields(std::ostream& out, const CameraPose& pose) {
  write_mat3(out, pose.rotation);
  for (int i = 0; i < 3; ++i) {
    out << ' ' << format_double(pose.translation(i));
  }
}

CameraPose parse_pose_fields(const std::vector<std::string>& tokens,
                             std::size_t offset, const std::string& path, int line) {
  CameraPose pose;
  pose.rotation = parse_mat3(tokens, offset, path, line);
  pose.translation = parse_vec3(tokens, offset + 9, path, line);
  // Snap parsing drift off the rotation so every load path hands out a
  // properly orthonormal matrix.
  const Eigen::JacobiSVD<Mat3> svd(pose.rotation,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
  pose.rotation = svd.matrixU() * svd.matrixV().transpose();
  if (pose.rotation.determinant() < 0.0) {
    fail(path, line, "pose rotation is not proper");
  }
  return pose;
}

void write_transform_fields(std::ostream& out, const Sim3Transform& t) {
  out << ' ' << format_double(t.scale());
  write_mat3(out, t.rotation());
  for (int i = 0; i < 3; ++i) {
    out << ' ' << format_double(t.center()(i));
  }
}

Sim3Transform parse_transform_fields(const std::vector<std::string>& tokens,
                                     std::size_t offset, const std::string& path,
                                     int line) {
  const double scale = parse_double(tokens[offset], path, line);
  Mat3 rotation = parse_mat3(tokens, offset + 1, path, line);
  const Vec3 center = parse_vec3(tokens, offset + 10, path, line);
  // Text round trips keep 17 digits, so the matrix is a rotation to within
  // parsing precision; renormalize the last bits of drift.
  const Eigen::JacobiSVD<Mat3> svd(rotation,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
  rotation = svd.matrixU() * svd.matrixV().transpose();
  if (rotation.determinant() < 0.0) {
    fail(path, line, "transform rotation is not proper");
  }
  return Sim3Transform(scale, rotation, center);
}

std::string sidecar_path(const std::string& scene_path) {
  return scene_path + ".desc";
}

void save_descriptor_sidecar(const std::string& path,
                             const ScenePointCloud& scene, int dimension) {
  std::ofstream out = open_out(path, true);
  out.write(kDescriptorMagic, sizeof(kDescriptorMagic));
  const std::uint32_t dim32 = static_cast<std::uint32_t>(dimension);
  const std::uint64_t count = scene.descriptors.size();
  out.write(reinterpret_cast<const char*>(&dim32), sizeof(dim32));
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const auto& entry : scene.descriptors) {
    const std::uint32_t point = static_cast<std::uint32_t>(entry.point);
    out.write(reinterpret_cast<const char*>(&point), sizeof(point));
    out.write(reinterpret_cast<const char*>(entry.descriptor.values.data()),
              static_cast<std::streamsize>(sizeof(double) * dimension));
  }
  if (!out) {
    throw IoError("failed writing " + path);
  }
}

void load_descriptor_sidecar(const std::string& path, ScenePointCloud* scene,
                             int expected_dim) {
  std::ifstream in = open_in(path, true);
  char magic[sizeof(kDescriptorMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kDescriptorMagic, sizeof(magic)) != 0) {
    throw IoError(path + ": bad descriptor file magic");
  }
  std::uint32_t dim32 = 0;
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&dim32), sizeof(dim32));
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!in) {
    throw IoError(path + ": truncated descriptor header");
  }
  if (expected_dim >= 0 && static_cast<int>(dim32) != expected_dim) {
    throw IoError(path + ": descriptor dimension mismatch");
  }
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t point = 0;
    in.read(reinterpret_cast<char*>(&point), sizeof(point));
    Eigen::VectorXd values(dim32);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(sizeof(double) * dim32));
    if (!in) {
      throw IoError(path + ": truncated descriptor record");
    }
    scene->descriptors.push_back(
        {static_cast<int>(point), Descriptor(std::move(values))});
  }
}

const char* status_name(LocalizationResult::Status status) {
  switch (status) {
    case LocalizationResult::Status::SingleImageSuccess:
      return "single_image";
    case LocalizationResult::Status::ImageSetSuccess:
      return "image_set";
    case LocalizationResult::Status::Failed:
      return "failed";
  }
  return "failed";
}

LocalizationResult::Status status_from_name(const std::string& name,
                                            const std::string& path, int line) {
  if (name == "single_image") {
    return LocalizationResult::Status::SingleImageSuccess;
  }
  if (name == "image_set") {
    return LocalizationResult::Status::ImageSetSuccess;
  }
  if (name == "failed") {
    return LocalizationResult::Status::Failed;
  }
  fail(path, line, "unknown status '" + name + "'");
}

}  // namespace

void save_scene(const std::string& path, const ScenePointCloud& scene,
                bool binary_descriptors) {
  scene.validate();
  int dimension = -1;
  if (!scene.descriptors.empty()) {
    dimension = static_cast<int>(scene.descriptors.front().descriptor.values.size());
  }
  std::ofstream out = open_out(path);
  out << "camset_scene 1\n";
  for (const auto& [key, value] : scene.metadata) {
    out << "meta " << key << ' ' << value << '\n';
  }
  if (dimension >= 0) {
    out << "descdim " << dimension << '\n';
  }
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    out << "point " << i << ' ' << format_double(scene.points[i].x()) << ' '
        << format_double(scene.points[i].y()) << ' '
        << format_double(scene.points[i].z()) << '\n';
  }
  if (dimension >= 0) {
    if (binary_descriptors) {
      const std::string sidecar = sidecar_path(path);
      save_descriptor_sidecar(sidecar, scene, dimension);
      out << "descbin " << std::filesystem::path(sidecar).filename().string()
          << '\n';
    } else {
      for (const auto& entry : scene.descriptors) {
        out << "desc " << entry.point;
        for (int i = 0; i < dimension; ++i) {
          out << ' ' << format_double(entry.descriptor.values(i));
        }
        out << '\n';
      }
    }
  }
  if (!out) {
    throw IoError("failed writing " + path);
  }
}

ScenePointCloud load_scene(const std::string& path) {
  std::ifstream in = open_in(path);
  int line_no = read_header(in, "camset_scene", path);
  ScenePointCloud scene;
  int dimension = -1;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    auto tokens = tokenize(line);
    if (tokens.empty()) {
      continue;
    }
    const std::string& kind = tokens[0];
    if (kind == "meta") {
      if (tokens.size() < 3) {
        fail(path, line_no, "meta needs a key and a value");
      }
      // The value is everything after the second token, whitespace included.
      const std::size_t after_kind = line.find_first_of(" \t");
      const std::size_t key_pos = line.find_first_not_of(" \t", after_kind);
      const std::size_t after_key = line.find_first_of(" \t", key_pos);
      const std::size_t value_pos = line.find_first_not_of(" \t", after_key);
      scene.metadata[tokens[1]] =
          value_pos == std::string::npos ? "" : line.substr(value_pos);
    } else if (kind == "descdim") {
      expect_tokens(tokens, 2, path, line_no);
      dimension = static_cast<int>(parse_int(tokens[1], path, line_no));
      if (dimension < 1) {
        fail(path, line_no, "descriptor dimension must be positive");
      }
    } else if (kind == "point") {
      expect_tokens(tokens, 5, path, line_no);
      const long id = parse_int(tokens[1], path, line_no);
      if (id != static_cast<long>(scene.points.size())) {
        fail(path, line_no, "point ids must be sequential from 0");
      }
      scene.points.push_back(parse_vec3(tokens, 2, path, line_no));
    } else if (kind == "desc") {
      if (dimension < 0) {
        fail(path, line_no, "desc record before descdim");
      }
      expect_tokens(tokens, 2 + static_cast<std::size_t>(dimension), path, line_no);
      ScenePointCloud::PointDescriptor entry;
      entry.point = static_cast<int>(parse_int(tokens[1], path, line_no));
      Eigen::VectorXd values(dimension);
      for (int i = 0; i < dimension; ++i) {
        values(i) = parse_double(tokens[2 + i], path, line_no);
      }
      entry.descriptor = Descriptor(std::move(values));
      scene.descriptors.push_back(std::move(entry));
    } else if (kind == "descbin") {
      expect_tokens(tokens, 2, path, line_no);
      const std::filesystem::path sidecar =
          std::filesystem::path(path).parent_path() / tokens[1];
      load_descriptor_sidecar(sidecar.string(), &scene, dimension);
    } else {
      fail(path, line_no, "unknown record '" + kind + "'");
    }
  }
  scene.validate();
  return scene;
}

void save_model(const std::string& path, const CameraSetModel& model) {
  model.validate();
  int dimension = 0;
  for (const auto& obs : model.observations) {
    if (!obs.descriptor.empty()) {
      dimension = static_cast<int>(obs.descriptor.values.size());
      break;
    }
  }
  std::ofstream out = open_out(path);
  out << "camset_model 1\n";
  out << "descdim " << dimension << '\n';
  for (std::size_t i = 0; i < model.cameras.size(); ++i) {
    const auto& camera = model.cameras[i];
    out << "camera " << i << ' ' << camera_model_name(camera.intrinsics.model)
        << ' ' << format_double(camera.intrinsics.focal) << ' '
        << format_double(camera.intrinsics.principal_point.x()) << ' '
        << format_double(camera.intrinsics.principal_point.y()) << ' '
        << camera.intrinsics.image_size.x() << ' '
        << camera.intrinsics.image_size.y();
    write_pose_fields(out, camera.pose);
    out << '\n';
  }
  for (std::size_t i = 0; i < model.points.size(); ++i) {
    out << "point " << i << ' ' << format_double(model.points[i].x()) << ' '
        << format_double(model.points[i].y()) << ' '
        << format_double(model.points[i].z()) << '\n';
  }
  for (const auto& obs : model.observations) {
    out << "obs " << obs.camera << ' ' << obs.point << ' '
        << format_double(obs.pixel.x()) << ' ' << format_double(obs.pixel.y());
    if (!obs.descriptor.empty()) {
      for (int i = 0; i < obs.descriptor.values.size(); ++i) {
        out << ' ' << format_double(obs.descriptor.values(i));
      }
    }
    out << '\n';
  }
  out << "target " << model.target_camera << '\n';
  if (!out) {
    throw IoError("failed writing " + path);
  }
}

CameraSetModel load_model(const std::string& path) {
  std::ifstream in = open_in(path);
  int line_no = read_header(in, "camset_model", path);
  CameraSetModel model;
  int dimension = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    auto tokens = tokenize(line);
    if (tokens.empty()) {
      continue;
    }
    const std::string& kind = tokens[0];
    if (kind == "descdim") {
      expect_tokens(tokens, 2, path, line_no);
      dimension = static_cast<int>(parse_int(tokens[1], path, line_no));
    } else if (kind == "camera") {
      expect_tokens(tokens, 20, path, line_no);
      if (parse_int(tokens[1], path, line_no) !=
          static_cast<long>(model.cameras.size())) {
        fail(path, line_no, "camera ids must be sequential from 0");
      }
      CameraSetModel::Camera camera;
      camera.intrinsics.model = camera_model_from_name(tokens[2]);
      camera.intrinsics.focal = parse_double(tokens[3], path, line_no);
      camera.intrinsics.principal_point =
          Vec2(parse_double(tokens[4], path, line_no),
               parse_double(tokens[5], path, line_no));
      camera.intrinsics.image_size =
          Eigen::Vector2i(static_cast<int>(parse_int(tokens[6], path, line_no)),
                          static_cast<int>(parse_int(tokens[7], path, line_no)));
      camera.pose = parse_pose_fields(tokens, 8, path, line_no);
      model.cameras.push_back(std::move(camera));
    } else if (kind == "point") {
      expect_tokens(tokens, 5, path, line_no);
      if (parse_int(tokens[1], path, line_no) !=
          static_cast<long>(model.points.size())) {
        fail(path, line_no, "point ids must be sequential from 0");
      }
      model.points.push_back(parse_vec3(tokens, 2, path, line_no));
    } else if (kind == "obs") {
      if (tokens.size() != 5 &&
          tokens.size() != 5 + static_cast<std::size_t>(dimension)) {
        fail(path, line_no, "obs record has the wrong field count");
      }
      CameraSetModel::Observation obs;
      obs.camera = static_cast<int>(parse_int(tokens[1], path, line_no));
      obs.point = static_cast<int>(parse_int(tokens[2], path, line_no));
      obs.pixel = Vec2(parse_double(tokens[3], path, line_no),
                       parse_double(tokens[4], path, line_no));
      if (tokens.size() > 5) {
        Eigen::VectorXd values(dimension);
        for (int i = 0; i < dimension; ++i) {
          values(i) = parse_double(tokens[5 + i], path, line_no);
        }
        obs.descriptor = Descriptor(std::move(values));
      }
      model.observations.push_back(std::move(obs));
    } else if (kind == "target") {
      expect_tokens(tokens, 2, path, line_no);
      model.target_camera = static_cast<int>(parse_int(tokens[1], path, line_no));
    } else {
      fail(path, line_no, "unknown record '" + kind + "'");
    }
  }
  model.validate();
  return model;
}

void save_matches(const std::string& path, const std::vector<PointMatch>& matches) {
  std::ofstream out = open_out(path);
  out << "camset_matches 1\n";
  for (const auto& m : matches) {
    out << "match " << m.local_index << ' ' << m.scene_index << ' '
        << format_double(m.descriptor_distance) << ' ' << format_double(m.ratio)
        << '\n';
  }
  if (!out) {
    throw IoError("failed writing " + path);
  }
}

std::vector<PointMatch> load_matches(const std::string& path) {
  std::ifstream in = open_in(path);
  int line_no = read_header(in, "camset_matches", path);
  std::vector<PointMatch> matches;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    auto tokens = tokenize(line);
    if (tokens.empty()) {
      continue;
    }
    if (tokens[0] != "match") {
      fail(path, line_no, "unknown record '" + tokens[0] + "'");
    }
    expect_tokens(tokens, 5, path, line_no);
    PointMatch m;
    m.local_index = static_cast<int>(parse_int(tokens[1], path, line_no));
    m.scene_index = static_cast<int>(parse_int(tokens[2], path, line_no));
    m.descriptor_distance = parse_double(tokens[3], path, line_no);
    m.ratio = parse_double(tokens[4], path, line_no);
    matches.push_back(m);
  }
  return matches;
}

void save_result(const std::string& path, const LocalizationResult& result) {
  std::ofstream out = open_out(path);
  out << "camset_result 1\n";
  out << "status " << status_name(result.status) << '\n';
  out << "inliers " << result.inlier_count << '\n';
  if (!result.failure_reason.empty()) {
    out << "reason " << result.failure_reason << '\n';
  }
  if (result.transform) {
    out << "transform";
    write_transform_fields(out, *result.transform);
    out << '\n';
  }
  if (result.target_pose_global) {
    out << "target_pose";
    write_pose_fields(out, *result.target_pose_global);
    out << '\n';
  }
  for (std::size_t i = 0; i < result.per_camera_poses_global.size(); ++i) {
    out << "pose " << i;
    write_pose_fields(out, result.per_camera_poses_global[i]);
    out << '\n';
  }
  if (!out) {
    throw IoError("failed writing " + path);
  }
}

LocalizationResult load_result(const std::string& path) {
  std::ifstream in = open_in(path);
  int line_no = read_header(in, "camset_result", path);
  LocalizationResult result;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    auto tokens = tokenize(line);
    if (tokens.empty()) {
      continue;
    }
    const std::string& kind = tokens[0];
    if (kind == "status") {
      expect_tokens(tokens, 2, path, line_no);
      result.status = status_from_name(tokens[1], path, line_no);
    } else if (kind == "inliers") {
      expect_tokens(tokens, 2, path, line_no);
      result.inlier_count = static_cast<int>(parse_int(tokens[1], path, line_no));
    } else if (kind == "reason") {
      const std::size_t pos = line.find("reason ");
      result.failure_reason = line.substr(pos + 7);
    } else if (kind == "transform") {
      expect_tokens(tokens, 14, path, line_no);
      result.transform = parse_transform_fields(tokens, 1, path, line_no);
    } else if (kind == "target_pose") {
      expect_tokens(tokens, 13, path, line_no);
      result.target_pose_global = parse_pose_fields(tokens, 1, path, line_no);
    } else if (kind == "pose") {
      expect_tokens(tokens, 14, path, line_no);
      if (parse_int(tokens[1], path, line_no) !=
          static_cast<long>(result.per_camera_poses_global.size())) {
        fail(path, line_no, "pose ids must be sequential from 0");
      }
      result.per_camera_poses_global.push_back(
          parse_pose_fields(tokens, 2, path, line_no));
    } else {
      fail(path, line_no, "unknown record '" + kind + "'");
    }
  }
  return result;
}

void save_truth(const std::string& path, const GroundTruth& truth) {
  std::ofstream out = open_out(path);
  out << "camset_truth 1\n";
  out << "transform";
  write_transform_fields(out, truth.transform);
  out << '\n';
  out << "target " << truth.target_camera << '\n';
  for (std::size_t i = 0; i < truth.poses_global.size(); ++i) {
    out << "pose " << i;
    write_pose_fields(out, truth.poses_global[i]);
    out << '\n';
  }
  if (!out) {
    throw IoError("failed writing " + path);
  }
}

GroundTruth load_truth(const std::string& path) {
  std::ifstream in = open_in(path);
  int line_no = read_header(in, "camset_truth", path);
  GroundTruth truth;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    auto tokens = tokenize(line);
    if (tokens.empty()) {
      continue;
    }
    const std::string& kind = tokens[0];
    if (kind == "transform") {
      expect_tokens(tokens, 14, path, line_no);
      truth.transform = parse_transform_fields(tokens, 1, path, line_no);
    } else if (kind == "target") {
      expect_tokens(tokens, 2, path, line_no);
      truth.target_camera = static_cast<int>(parse_int(tokens[1], path, line_no));
    } else if (kind == "pose") {
      expect_tokens(tokens, 14, path, line_no);
      if (parse_int(tokens[1], path, line_no) !=
          static_cast<long>(truth.poses_global.size())) {
        fail(path, line_no, "pose ids must be sequential from 0");
      }
      truth.poses_global.push_back(parse_pose_fields(tokens, 2, path, line_no));
    } else {
      fail(path, line_no, "unknown record '" + kind + "'");
    }
  }
  return truth;
}

void save_eval(const std::string& path, const EvalReport& report) {
  std::ofstream out = open_out(path);
  out << "camset_eval 1\n";
  for (const auto& entry : report.entries) {
    out << "image " << entry.id << ' ' << (entry.registered ? 1 : 0) << ' '
        << format_double(entry.location_error_m) << ' '
        << format_double(entry.orientation_error_deg) << '\n';
  }
  if (!out) {
    throw IoError("failed writing " + path);
  }
}

EvalReport load_eval(const std::string& path) {
  std::ifstream in = open_in(path);
  int line_no = read_header(in, "camset_eval", path);
  EvalReport report;
  std::vector<double> locations;
  std::vector<double> orientations;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    auto tokens = tokenize(line);
    if (tokens.empty()) {
      continue;
    }
    if (tokens[0] != "image") {
      fail(path, line_no, "unknown record '" + tokens[0] + "'");
    }
    expect_tokens(tokens, 5, path, line_no);
    EvalReport::Entry entry;
    entry.id = tokens[1];
    entry.registered = parse_int(tokens[2], path, line_no) != 0;
    entry.location_error_m = parse_double(tokens[3], path, line_no);
    entry.orientation_error_deg = parse_double(tokens[4], path, line_no);
    if (entry.registered) {
      ++report.registered_count;
      locations.push_back(entry.location_error_m);
      orientations.push_back(entry.orientation_error_deg);
    }
    report.entries.push_back(std::move(entry));
  }
  report.total_count = static_cast<int>(report.entries.size());
  report.registration_rate =
      report.total_count > 0
          ? static_cast<double>(report.registered_count) / report.total_count
          : 0.0;
  report.location = summarize(std::move(locations));
  report.orientation = summarize(std::move(orientations));
  return report;
}

namespace {

std::string fixed3(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3f", value);
  return buffer;
}

}  // namespace

void write_report_text(std::ostream& out,
                       const std::vector<std::pair<std::string, EvalReport>>& reports) {
  out << "Registration\n";
  out << std::left << std::setw(24) << "  run" << std::right << std::setw(12)
      << "registered" << std::setw(8) << "total" << std::setw(8) << "rate"
      << '\n';
  for (const auto& [label, report] : reports) {
    out << "  " << std::left << std::setw(22) << label << std::right
        << std::setw(12) << report.registered_count << std::setw(8)
        << report.total_count << std::setw(8) << fixed3(report.registration_rate)
        << '\n';
  }
  out << '\n';
  out << "Errors over registered images (location m, orientation deg)\n";
  out << std::left << std::setw(24) << "  run" << std::right << std::setw(9)
      << "loc min" << std::setw(9) << "med" << std::setw(9) << "max"
      << std::setw(9) << "mean" << std::setw(9) << "ori min" << std::setw(9)
      << "med" << std::setw(9) << "max" << std::setw(9) << "mean" << '\n';
  for (const auto& [label, report] : reports) {
    out << "  " << std::left << std::setw(22) << label << std::right
        << std::setw(9) << fixed3(report.location.min) << std::setw(9)
        << fixed3(report.location.median) << std::setw(9)
        << fixed3(report.location.max) << std::setw(9)
        << fixed3(report.location.mean) << std::setw(9)
        << fixed3(report.orientation.min) << std::setw(9)
        << fixed3(report.orientation.median) << std::setw(9)
        << fixed3(report.orientation.max) << std::setw(9)
        << fixed3(report.orientation.mean) << '\n';
  }
}

void write_report_csv(std::ostream& out,
                      const std::vector<std::pair<std::string, EvalReport>>& reports) {
  out << "label,registered,total,rate,loc_min,loc_median,loc_max,loc_mean,"
         "ori_min,ori_median,ori_max,ori_mean\n";
  for (const auto& [label, report] : reports) {
    out << label << ',' << report.registered_count << ',' << report.total_count
        << ',' << format_double(report.registration_rate) << ','
        << format_double(report.location.min) << ','
        << format_double(report.location.median) << ','
        << format_double(report.location.max) << ','
        << format_double(report.location.mean) << ','
        << format_double(report.orientation.min) << ','
        << format_double(report.orientation.median) << ','
        << format_double(report.orientation.max) << ','
        << format_double(report.orientation.mean) << '\n';
  }
}

}  // namespace camset
