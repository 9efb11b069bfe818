#include "camset/types.hpp"

#include <cmath>

namespace camset {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
      v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

Ray::Ray(const Vec3& dir, const Vec3& c) : center(c) {
  const double n = dir.norm();
  if (!(n > 1e-300)) {
    throw std::invalid_argument("Ray direction must be nonzero");
  }
  direction = dir / n;
}

Ray Ray::through(const Vec3& center, const Vec3& point) {
  return Ray(point - center, center);
}

HomogeneousPoint::HomogeneousPoint(const Vec4& h) {
  if (h.w() == 0.0) {
    throw std::invalid_argument("homogeneous point at infinity");
  }
  coords = h / h.w();
  coords.w() = 1.0;
}

std::string camera_model_name(CameraModel model) {
  return model == CameraModel::Panoramic ? "panoramic" : "rectilinear";
}

CameraModel camera_model_from_name(const std::string& name) {
  if (name == "panoramic") return CameraModel::Panoramic;
  if (name == "rectilinear") return CameraModel::Rectilinear;
  throw IoError("unknown camera model: " + name);
}

CameraIntrinsics CameraIntrinsics::panoramic(int width, int height) {
  CameraIntrinsics k;
  k.model = CameraModel::Panoramic;
  // Full pixel width spans a 2*pi pan.
  k.focal = width / (2.0 * M_PI);
  k.principal_point = Vec2(width / 2.0, height / 2.0);
  k.image_size = Eigen::Vector2i(width, height);
  return k;
}

CameraIntrinsics CameraIntrinsics::rectilinear(double focal, int width, int height) {
  CameraIntrinsics k;
  k.model = CameraModel::Rectilinear;
  k.focal = focal;
  k.principal_point = Vec2(width / 2.0, height / 2.0);
  k.image_size = Eigen::Vector2i(width, height);
  return k;
}

void CameraIntrinsics::validate() const {
  if (!(focal > 0.0)) {
    throw std::invalid_argument("focal length must be positive");
  }
  if (image_size.x() <= 0 || image_size.y() <= 0) {
    throw std::invalid_argument("image size must be positive");
  }
  if (model == CameraModel::Rectilinear) {
    if (principal_point.x() < 0.0 || principal_point.x() > image_size.x() ||
        principal_point.y() < 0.0 || principal_point.y() > image_size.y()) {
      throw std::invalid_argument("principal point outside the image");
    }
  }
}

Mat34 CameraPose::matrix() const {
  Mat34 p;
  p.leftCols<3>() = rotation;
  p.col(3) = translation;
  return p;
}

void CameraPose::validate() const {
  if (!is_rotation(rotation)) {
    throw std::invalid_argument("camera pose rotation is not orthonormal");
  }
}

bool is_rotation(const Mat3& r, double tol) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

Sim3Transform::Sim3Transform(double scale, const Mat3& rotation, const Vec3& center)
    : scale_(scale), rotation_(rotation), center_(center) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("similarity scale must be positive");
  }
  if (!is_rotation(rotation)) {
    throw std::invalid_argument("similarity rotation is not orthonormal");
  }
}

Mat34 Sim3Transform::as_matrix() const {
  Mat34 t;
  t.leftCols<3>() = scale_ * rotation_;
  t.col(3) = -scale_ * (rotation_ * center_);
  return t;
}

Sim3Transform Sim3Transform::inverse() const {
  // (s R [I|-C])^-1 = (1/s) R^T [I | s R C]
  return Sim3Transform(1.0 / scale_, rotation_.transpose(),
                       -scale_ * (rotation_ * center_));
}

Sim3Transform Sim3Transform::compose(const Sim3Transform& other) const {
  // this(other(x)) = s1 s2 (R1 R2)(x - C) with C = C2 + R2^T C1 / s2.
  return Sim3Transform(scale_ * other.scale_, rotation_ * other.rotation_,
                       other.center() +
                           other.rotation().transpose() * center_ / other.scale_);
}

Mat3 rotation_exp(const Vec3& w) {
  const double angle = w.norm();
  if (angle < 1e-12) {
    // Second-order series keeps the result orthonormal to machine precision.
    const Mat3 k = skew(w);
    return Mat3::Identity() + k + 0.5 * (k * k);
  }
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

Vec3 rotation_log(const Mat3& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

double rotation_angle_deg(const Mat3& a, const Mat3& b) {
  const Mat3 m = a * b.transpose();
  // acos of the trace loses half the working precision near zero, which
  // matters when certifying errors below a microdegree. Recover the sine
  // from the skew part and use atan2 instead.
  const Vec3 axis(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double s = 0.5 * axis.norm();
  const double c = (m.trace() - 1.0) / 2.0;
  return std::atan2(s, c) * 180.0 / M_PI;
}

}  // namespace camset
