#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace camset {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

// Base class for all camset error conditions.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BehindCamera : Error {
  using Error::Error;
};
struct DegeneratePoint : Error {
  using Error::Error;
};
struct TooFewCorrespondences : Error {
  using Error::Error;
};
struct DegenerateConfiguration : Error {
  using Error::Error;
};
struct SingularTransform : Error {
  using Error::Error;
};
struct NegativeScale : Error {
  using Error::Error;
};
struct NoConsensus : Error {
  using Error::Error;
};
struct NumericalFailure : Error {
  using Error::Error;
};
struct GaugeUnderconstrained : Error {
  using Error::Error;
};
struct DegenerateRays : Error {
  using Error::Error;
};
struct EmptyScene : Error {
  using Error::Error;
};
struct InvalidConfig : Error {
  using Error::Error;
};
struct MismatchedIds : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

// Returns the 3x3 antisymmetric matrix with skew(v) * w == v x w.
Mat3 skew(const Vec3& v);

// A bearing observation: unit direction from a projection center.
// Direction and center are expressed in the same coordinate frame.
struct Ray {
  Vec3 direction = Vec3::UnitZ();
  Vec3 center = Vec3::Zero();

  Ray() = default;
  // Normalizes the given direction; throws on a near-zero vector.
  Ray(const Vec3& dir, const Vec3& c);
  // Ray from a center through a target point.
  static Ray through(const Vec3& center, const Vec3& point);
};

// Homogeneous coordinate X~ = (X; 1) of a 3D point.
struct HomogeneousPoint {
  Vec4 coords = Vec4(0, 0, 0, 1);

  HomogeneousPoint() = default;
  explicit HomogeneousPoint(const Vec3& x) : coords(x.x(), x.y(), x.z(), 1.0) {}
  explicit HomogeneousPoint(const Vec4& h);
  Vec3 xyz() const { return coords.head<3>(); }
};

enum class CameraModel { Panoramic, Rectilinear };

std::string camera_model_name(CameraModel model);
CameraModel camera_model_from_name(const std::string& name);

// Intrinsic parameters of one camera. Panoramic cameras are equirectangular:
// the default focal width/(2*pi) makes the full image width span a 2*pi pan.
struct CameraIntrinsics {
  CameraModel model = CameraModel::Rectilinear;
  double focal = 1.0;                      // pixels
  Vec2 principal_point = Vec2::Zero();     // pixels
  Eigen::Vector2i image_size = Eigen::Vector2i(1, 1);

  static CameraIntrinsics panoramic(int width, int height);
  static CameraIntrinsics rectilinear(double focal, int width, int height);
  void validate() const;
};

// Projection matrix P = [R | t] mapping points of the enclosing frame into
// the camera frame. The camera center in the enclosing frame is -R^T t.
struct CameraPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Mat34 matrix() const;
  Vec3 center() const { return -rotation.transpose() * translation; }
  Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
  void validate() const;
};

// Returns true if R is orthonormal with det +1 within the given tolerance.
bool is_rotation(const Mat3& r, double tol = 1e-10);

// The 7-DOF similarity T = s R [I | -C] mapping global coordinates into the
// camera set frame. Stored as (s, R, C) so the invariants stay enforceable;
// the 3x4 matrix form is derived.
class Sim3Transform {
 public:
  Sim3Transform() = default;
  Sim3Transform(double scale, const Mat3& rotation, const Vec3& center);

  double scale() const { return scale_; }
  const Mat3& rotation() const { return rotation_; }
  const Vec3& center() const { return center_; }

  Mat34 as_matrix() const;
  Vec3 apply(const Vec3& x) const { return scale_ * (rotation_ * (x - center_)); }
  Vec3 apply(const HomogeneousPoint& x) const { return apply(x.xyz()); }

  Sim3Transform inverse() const;
  // Composition acting as this(other(x)).
  Sim3Transform compose(const Sim3Transform& other) const;

 private:
  double scale_ = 1.0;
  Mat3 rotation_ = Mat3::Identity();
  Vec3 center_ = Vec3::Zero();
};

// Rodrigues exponential: rotation by angle |w| about axis w/|w|.
Mat3 rotation_exp(const Vec3& w);
// Inverse of rotation_exp.
Vec3 rotation_log(const Mat3& r);
// Relative angle between two rotations, in degrees.
double rotation_angle_deg(const Mat3& a, const Mat3& b);

}  // namespace camset
