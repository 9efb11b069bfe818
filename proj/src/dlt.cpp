#include "camset/dlt.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>

namespace camset {

namespace {

// Condition number from the singular values of A; also used to pick the
// least squares path.
struct SvdInfo {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd;
  double condition = 0.0;
};

SvdInfo analyze(const Eigen::MatrixXd& a) {
  SvdInfo info{Eigen::JacobiSVD<Eigen::MatrixXd>(
                   a, Eigen::ComputeThinU | Eigen::ComputeThinV),
               0.0};
  const auto& sv = info.svd.singularValues();
  const double smin = sv(sv.size() - 1);
  info.condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  return info;
}

// One Givens rotation mixing columns i and j so that (row, j) vanishes after
// M <- M * G. Returns G.
Mat3 annihilating_rotation(const Mat3& m, int row, int i, int j) {
  const double a = m(row, i);
  const double b = m(row, j);
  const double h = std::hypot(a, b);
  Mat3 g = Mat3::Identity();
  if (h < 1e-300) {
    return g;
  }
  // Columns i, j map to (c*i - s*j, s*i + c*j); zero the j entry of `row`.
  const double c = a / h;
  const double s = b / h;
  g(i, i) = c;
  g(j, j) = c;
  g(i, j) = -s;
  g(j, i) = s;
  // After the mix: m(row, j) = a*(-s) + b*c = 0 and m(row, i) = h.
  return g;
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_dlt_system(
    std::span<const RayPointCorrespondence> correspondences) {
  const int n = static_cast<int>(correspondences.size());
  if (n < kMinDltCorrespondences) {
    throw TooFewCorrespondences("DLT needs at least 6 correspondences, got " +
                                std::to_string(n));
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3 * n, 12);
  Eigen::VectorXd b(3 * n);
  for (int i = 0; i < n; ++i) {
    const auto& c = correspondences[i];
    const Mat3 rx = skew(c.ray.direction);
    const HomogeneousPoint xh(c.global_point);
    // Row block: X~^T (x) [r]x for column-major vec(T).
    for (int j = 0; j < 4; ++j) {
      a.block<3, 3>(3 * i, 3 * j) = xh.coords(j) * rx;
    }
    b.segment<3>(3 * i) = rx * c.ray.center;
  }
  return {std::move(a), std::move(b)};
}

std::pair<Mat34, DltDiagnostics> solve_dlt(
    std::span<const RayPointCorrespondence> correspondences) {
  auto [a, b] = build_dlt_system(correspondences);
  const SvdInfo info = analyze(a);
  if (!(info.condition < kDltDegenerateCondition)) {
    throw DegenerateConfiguration(
        "DLT system condition number " + std::to_string(info.condition) +
        " exceeds the degeneracy limit");
  }
  Eigen::VectorXd x;
  if (info.condition > kDltSvdFallbackCondition) {
    x = info.svd.solve(b);
  } else {
    x = a.colPivHouseholderQr().solve(b);
  }
  DltDiagnostics diag;
  diag.condition_number = info.condition;
  diag.residual_rms = std::sqrt((a * x - b).squaredNorm() / static_cast<double>(b.size()));
  diag.num_correspondences = static_cast<int>(correspondences.size());
  Mat34 t;
  // Column-major vec(T): x(3*j + r) = T(r, j).
  for (int j = 0; j < 4; ++j) {
    t.col(j) = x.segment<3>(3 * j);
  }
  return {t, diag};
}

Sim3Transform project_to_sim3(const Mat34& t_raw) {
  const Mat3 m = t_raw.leftCols<3>();
  if (std::abs(m.determinant()) < 1e-12) {
    throw SingularTransform("left 3x3 block of the transform is singular");
  }
  // RQ by Givens rotations: annihilate (3,2), then (3,1), then (2,1) by
  // right-multiplication; K = M G_x G_y G_z, R = (G_x G_y G_z)^T.
  Mat3 k = m;
  Mat3 q = Mat3::Identity();
  for (const auto [row, i, j] : {std::array<int, 3>{2, 2, 1},
                                 std::array<int, 3>{2, 2, 0},
                                 std::array<int, 3>{1, 1, 0}}) {
    const Mat3 g = annihilating_rotation(k, row, i, j);
    k = k * g;
    q = q * g;
  }
  Mat3 r = q.transpose();
  // Force K's diagonal positive, then repair an improper rotation by joint
  // negation; the product K R stays equal to M throughout.
  Vec3 signs;
  for (int i = 0; i < 3; ++i) {
    signs(i) = k(i, i) < 0.0 ? -1.0 : 1.0;
  }
  k = k * signs.asDiagonal();
  r = signs.asDiagonal() * r;
  if (r.determinant() < 0.0) {
    k = -k;
    r = -r;
  }
  const double s = k.trace() / 3.0;
  if (s <= 0.0) {
    throw NegativeScale("projected similarity scale is not positive");
  }
  // Numerical drift can leave r slightly off the rotation manifold for badly
  // scaled inputs; snap it back through the polar factor.
  const Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  r = svd.matrixU() * svd.matrixV().transpose();
  const Vec3 t = k.triangularView<Eigen::Upper>().solve(t_raw.col(3));
  // s [R | t] as a similarity about center C = -R^T t.
  return Sim3Transform(s, r, -r.transpose() * t);
}

std::pair<Sim3Transform, DltDiagnostics> estimate_pose_dlt(
    std::span<const RayPointCorrespondence> correspondences) {
  auto [t_raw, diag] = solve_dlt(correspondences);
  return {project_to_sim3(t_raw), diag};
}

CameraPose estimate_single_camera_pose(
    std::span<const RayPointCorrespondence> correspondences) {
  const int n = static_cast<int>(correspondences.size());
  if (n < kMinDltCorrespondences) {
    throw TooFewCorrespondences(
        "single camera DLT needs at least 6 correspondences, got " +
        std::to_string(n));
  }
  const Vec3 common = correspondences[0].ray.center;
  for (const auto& c : correspondences) {
    if ((c.ray.center - common).norm() > 1e-9) {
      throw std::invalid_argument("single camera solve requires a common ray center");
    }
  }
  // Shifting by the common center makes the constraint homogeneous in
  // [R | t']; the true translation is t' plus the center again.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3 * n, 12);
  for (int i = 0; i < n; ++i) {
    const auto& c = correspondences[i];
    const Mat3 rx = skew(c.ray.direction);
    const HomogeneousPoint xh(c.global_point);
    for (int j = 0; j < 4; ++j) {
      a.block<3, 3>(3 * i, 3 * j) = xh.coords(j) * rx;
    }
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  // The nullspace direction is the solution; the spectrum above it must stay
  // well conditioned for the pose to be unique.
  const double second_smallest = sv(sv.size() - 2);
  if (!(sv(0) / second_smallest < kDltDegenerateCondition) ||
      second_smallest <= 0.0) {
    throw DegenerateConfiguration("single camera DLT system is rank deficient");
  }
  Eigen::VectorXd x = svd.matrixV().col(sv.size() - 1);
  Mat34 t;
  for (int j = 0; j < 4; ++j) {
    t.col(j) = x.segment<3>(3 * j);
  }
  Sim3Transform sim = [&] {
    try {
      return project_to_sim3(t);
    } catch (const NegativeScale&) {
      // The singular vector's sign is arbitrary; the negated solution is the
      // one decomposing into a proper positive-scale pose.
      return project_to_sim3(Mat34(-t));
    }
  }();
  // Scale is unobservable from a single center; keep rotation and the
  // direction-preserving translation at s = 1.
  CameraPose pose;
  pose.rotation = sim.rotation();
  pose.translation = -sim.rotation() * sim.center() + common;
  return pose;
}

double prediction_angle(const RayPointCorrespondence& c, const Sim3Transform& t) {
  const Vec3 predicted = t.apply(c.global_point) - c.ray.center;
  const double norm = predicted.norm();
  if (norm <= 1e-12) {
    return M_PI;
  }
  const double d = std::clamp(c.ray.direction.dot(predicted / norm), -1.0, 1.0);
  return std::acos(d);
}

double prediction_angle(const RayPointCorrespondence& c, const CameraPose& pose) {
  const Vec3 predicted =
      pose.rotation * c.global_point + pose.translation - c.ray.center;
  const double norm = predicted.norm();
  if (norm <= 1e-12) {
    return M_PI;
  }
  const double d = std::clamp(c.ray.direction.dot(predicted / norm), -1.0, 1.0);
  return std::acos(d);
}

}  // namespace camset
