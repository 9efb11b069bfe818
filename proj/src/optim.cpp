#include "camset/optim.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace camset {

namespace {

struct Layout {
  int transform_offset = -1;
  int transform_dim = 0;
  int camera_offset = -1;
  int camera_dim = 0;
  int point_offset = -1;
  int point_dim = 0;
  int total = 0;
};

Layout make_layout(const RayBundleProblem& p) {
  Layout l;
  int cursor = 0;
  if (p.vary.transform) {
    l.transform_offset = cursor;
    l.transform_dim = p.vary.transform_scale ? 7 : 6;
    cursor += l.transform_dim;
  }
  if (p.vary.cameras && p.cameras.size() > 1) {
    l.camera_offset = cursor;
    l.camera_dim = 6 * (static_cast<int>(p.cameras.size()) - 1);
    cursor += l.camera_dim;
  }
  if (p.vary.points && !p.local_points.empty()) {
    l.point_offset = cursor;
    l.point_dim = 3 * static_cast<int>(p.local_points.size());
    cursor += l.point_dim;
  }
  l.total = cursor;
  return l;
}

// Z in the camera frame for one term; throws if the point collapses onto the
// projection center.
Vec3 term_point(const RayBundleProblem& p, const RayBundleProblem::Term& term,
                bool global) {
  const CameraPose& pose = p.cameras[term.camera];
  const Vec3 x = global ? p.transform.apply(p.global_points[term.point])
                        : p.local_points[term.point];
  return pose.rotation * x + pose.translation;
}

Vec3 term_residual(const Vec3& ray, const Vec3& z) {
  const double norm = z.norm();
  if (norm <= 1e-12) {
    throw DegeneratePoint("observed point coincides with the projection center");
  }
  return ray - z / norm;
}

// d(Z/||Z||)/dZ = (I - n n^T) / ||Z||.
Mat3 normalize_jacobian(const Vec3& z) {
  const double norm = z.norm();
  const Vec3 n = z / norm;
  return (Mat3::Identity() - n * n.transpose()) / norm;
}

}  // namespace

void LmConfig::validate() const {
  if (max_iterations < 1) {
    throw InvalidConfig("lm max_iterations must be positive");
  }
  if (!(initial_damping > 0.0) || !(max_damping >= initial_damping)) {
    throw InvalidConfig("lm damping range is invalid");
  }
  if (!(damping_increase > 1.0) || !(damping_decrease > 1.0)) {
    throw InvalidConfig("lm damping factors must exceed 1");
  }
  if (!(gradient_tolerance >= 0.0) || !(step_tolerance >= 0.0)) {
    throw InvalidConfig("lm tolerances must be non-negative");
  }
  if (schur_point_threshold < 0) {
    throw InvalidConfig("lm schur_point_threshold must be non-negative");
  }
}

int RayBundleProblem::num_residuals() const {
  return 3 * static_cast<int>(global_terms.size() + local_terms.size());
}

int RayBundleProblem::num_parameters() const { return make_layout(*this).total; }

void RayBundleProblem::validate() const {
  if (cameras.empty()) {
    throw InvalidConfig("ray bundle problem has no cameras");
  }
  for (const auto& pose : cameras) {
    pose.validate();
  }
  if (global_terms.empty() && local_terms.empty()) {
    throw InvalidConfig("ray bundle problem has no residual terms");
  }
  auto check = [&](const Term& t, int num_points, const char* kind) {
    if (t.camera < 0 || t.camera >= static_cast<int>(cameras.size())) {
      throw InvalidConfig(std::string(kind) + " term references camera " +
                          std::to_string(t.camera));
    }
    if (t.point < 0 || t.point >= num_points) {
      throw InvalidConfig(std::string(kind) + " term references point " +
                          std::to_string(t.point));
    }
    if (std::abs(t.ray.norm() - 1.0) > 1e-6) {
      throw InvalidConfig(std::string(kind) + " term ray is not unit length");
    }
  };
  for (const auto& t : global_terms) {
    check(t, static_cast<int>(global_points.size()), "global");
  }
  for (const auto& t : local_terms) {
    check(t, static_cast<int>(local_points.size()), "local");
  }
}

Eigen::VectorXd evaluate_residuals(const RayBundleProblem& problem) {
  Eigen::VectorXd r(problem.num_residuals());
  int row = 0;
  for (const auto& t : problem.global_terms) {
    r.segment<3>(row) = term_residual(t.ray, term_point(problem, t, true));
    row += 3;
  }
  for (const auto& t : problem.local_terms) {
    r.segment<3>(row) = term_residual(t.ray, term_point(problem, t, false));
    row += 3;
  }
  return r;
}

double evaluate_cost(const RayBundleProblem& problem) {
  return evaluate_residuals(problem).squaredNorm();
}

double evaluate_norm_sum(const RayBundleProblem& problem) {
  const Eigen::VectorXd r = evaluate_residuals(problem);
  double sum = 0.0;
  for (int row = 0; row < r.size(); row += 3) {
    sum += r.segment<3>(row).norm();
  }
  return sum;
}

Eigen::MatrixXd evaluate_jacobian(const RayBundleProblem& problem) {
  const Layout layout = make_layout(problem);
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(problem.num_residuals(), layout.total);
  const double s = problem.transform.scale();
  const Mat3 sr = s * problem.transform.rotation();

  int row = 0;
  for (const auto& t : problem.global_terms) {
    const CameraPose& pose = problem.cameras[t.camera];
    const Vec3 y = problem.transform.apply(problem.global_points[t.point]);
    const Vec3 z = pose.rotation * y + pose.translation;
    const Mat3 n = normalize_jacobian(z);
    // Residual is r - Z/||Z||, so every block carries -N d(Z)/d(param).
    if (layout.transform_offset >= 0) {
      const Mat3 nr = n * pose.rotation;
      j.block<3, 3>(row, layout.transform_offset) = nr * skew(y);
      j.block<3, 3>(row, layout.transform_offset + 3) = nr * sr;
      if (problem.vary.transform_scale) {
        j.block<3, 1>(row, layout.transform_offset + 6) = -(nr * y);
      }
    }
    if (layout.camera_offset >= 0 && t.camera > 0) {
      const int col = layout.camera_offset + 6 * (t.camera - 1);
      j.block<3, 3>(row, col) = n * skew(pose.rotation * y);
      j.block<3, 3>(row, col + 3) = -n;
    }
    row += 3;
  }
  for (const auto& t : problem.local_terms) {
    const CameraPose& pose = problem.cameras[t.camera];
    const Vec3 x = problem.local_points[t.point];
    const Vec3 z = pose.rotation * x + pose.translation;
    const Mat3 n = normalize_jacobian(z);
    if (layout.camera_offset >= 0 && t.camera > 0) {
      const int col = layout.camera_offset + 6 * (t.camera - 1);
      j.block<3, 3>(row, col) = n * skew(pose.rotation * x);
      j.block<3, 3>(row, col + 3) = -n;
    }
    if (layout.point_offset >= 0) {
      j.block<3, 3>(row, layout.point_offset + 3 * t.point) = -(n * pose.rotation);
    }
    row += 3;
  }
  return j;
}

RayBundleProblem apply_step(const RayBundleProblem& problem,
                            const Eigen::VectorXd& delta) {
  const Layout layout = make_layout(problem);
  if (delta.size() != layout.total) {
    throw InvalidConfig("step size does not match the problem layout");
  }
  RayBundleProblem next = problem;
  if (layout.transform_offset >= 0) {
    const Vec3 omega = delta.segment<3>(layout.transform_offset);
    const Vec3 dc = delta.segment<3>(layout.transform_offset + 3);
    const double dlog = problem.vary.transform_scale
                            ? delta(layout.transform_offset + 6)
                            : 0.0;
    next.transform = Sim3Transform(problem.transform.scale() * std::exp(dlog),
                                   rotation_exp(omega) * problem.transform.rotation(),
                                   problem.transform.center() + dc);
  }
  if (layout.camera_offset >= 0) {
    for (std::size_t i = 1; i < problem.cameras.size(); ++i) {
      const int col = layout.camera_offset + 6 * (static_cast<int>(i) - 1);
      next.cameras[i].rotation =
          rotation_exp(delta.segment<3>(col)) * problem.cameras[i].rotation;
      next.cameras[i].translation =
          problem.cameras[i].translation + delta.segment<3>(col + 3);
    }
  }
  if (layout.point_offset >= 0) {
    for (std::size_t i = 0; i < problem.local_points.size(); ++i) {
      next.local_points[i] =
          problem.local_points[i] +
          delta.segment<3>(layout.point_offset + 3 * static_cast<int>(i));
    }
  }
  return next;
}

namespace {

// Solves (H + lambda D) delta = -g, eliminating the point blocks first when
// the problem is large enough for that to pay off. Returns false when the
// reduced system is not solvable at this damping level.
bool solve_normal_equations(const Eigen::MatrixXd& h, const Eigen::VectorXd& d,
                            const Eigen::VectorXd& g, double lambda,
                            const Layout& layout, int schur_point_threshold,
                            Eigen::VectorXd* delta) {
  const int total = static_cast<int>(h.rows());
  const int num_points = layout.point_dim / 3;
  const bool use_schur =
      layout.point_offset >= 0 && num_points > schur_point_threshold &&
      layout.point_offset > 0;
  if (!use_schur) {
    Eigen::MatrixXd damped = h;
    damped.diagonal() += lambda * d;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
    if (ldlt.info() != Eigen::Success) {
      return false;
    }
    *delta = ldlt.solve(-g);
    return delta->allFinite();
  }

  // Partition at the point boundary: H = [A B; B^T C] with C built from
  // independent 3x3 point blocks.
  const int nc = layout.point_offset;
  const int np = layout.point_dim;
  Eigen::MatrixXd a = h.topLeftCorner(nc, nc);
  a.diagonal() += lambda * d.head(nc);
  const Eigen::MatrixXd b = h.topRightCorner(nc, np);
  Eigen::VectorXd g_c = g.head(nc);
  const Eigen::VectorXd g_p = g.tail(np);

  // Invert each damped point block and fold it into the reduced system.
  Eigen::MatrixXd c_inv_bt(np, nc);
  Eigen::VectorXd c_inv_gp(np);
  for (int p = 0; p < num_points; ++p) {
    Mat3 c_block = h.block<3, 3>(nc + 3 * p, nc + 3 * p);
    c_block.diagonal() += lambda * d.segment<3>(nc + 3 * p);
    const Eigen::LDLT<Mat3> ldlt(c_block);
    if (ldlt.info() != Eigen::Success) {
      return false;
    }
    c_inv_bt.middleRows<3>(3 * p) = ldlt.solve(b.middleCols<3>(3 * p).transpose());
    c_inv_gp.segment<3>(3 * p) = ldlt.solve(g_p.segment<3>(3 * p));
  }
  const Eigen::MatrixXd reduced = a - b * c_inv_bt;
  const Eigen::VectorXd rhs = -g_c + b * c_inv_gp;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(reduced);
  if (ldlt.info() != Eigen::Success) {
    return false;
  }
  delta->resize(total);
  delta->head(nc) = ldlt.solve(rhs);
  if (!delta->head(nc).allFinite()) {
    return false;
  }
  // Back substitution for the point blocks.
  delta->tail(np) = -c_inv_gp - c_inv_bt * delta->head(nc);
  return delta->allFinite();
}

}  // namespace

LmSummary solve_lm(RayBundleProblem& problem, const LmConfig& config) {
  config.validate();
  problem.validate();
  const Layout layout = make_layout(problem);
  LmSummary summary;
  if (layout.total == 0) {
    // Nothing varies; report the fixed cost.
    summary.initial_cost = evaluate_cost(problem);
    summary.final_cost = summary.initial_cost;
    summary.final_norm_sum = evaluate_norm_sum(problem);
    summary.cost_history = {summary.initial_cost};
    return summary;
  }

  double cost = evaluate_cost(problem);
  summary.initial_cost = cost;
  summary.cost_history.push_back(cost);
  double lambda = config.initial_damping;
  summary.status = LmSummary::Status::MaxIterations;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    summary.iterations = iter + 1;
    const Eigen::VectorXd residuals = evaluate_residuals(problem);
    const Eigen::MatrixXd jac = evaluate_jacobian(problem);
    const Eigen::VectorXd gradient = jac.transpose() * residuals;
    if (gradient.lpNorm<Eigen::Infinity>() <= config.gradient_tolerance) {
      summary.status = LmSummary::Status::Converged;
      break;
    }
    const Eigen::MatrixXd h = jac.transpose() * jac;
    // Marquardt scaling with a floor so exactly-flat directions stay damped.
    Eigen::VectorXd d = h.diagonal();
    const double floor = 1e-12 * d.maxCoeff();
    d = d.cwiseMax(floor > 0.0 ? floor : 1e-12);

    bool accepted = false;
    while (true) {
      Eigen::VectorXd delta;
      const bool solved =
          solve_normal_equations(h, d, gradient, lambda, layout,
                                 config.schur_point_threshold, &delta);
      if (solved) {
        bool improved = false;
        RayBundleProblem candidate = problem;
        double candidate_cost = std::numeric_limits<double>::infinity();
        try {
          candidate = apply_step(problem, delta);
          candidate_cost = evaluate_cost(candidate);
          improved = candidate_cost < cost;
        } catch (const DegeneratePoint&) {
          // A trial step that collapses a point is just a bad step.
          improved = false;
        }
        if (improved) {
          problem = std::move(candidate);
          cost = candidate_cost;
          summary.cost_history.push_back(cost);
          lambda = std::max(lambda / config.damping_decrease, 1e-32);
          accepted = true;
          if (delta.norm() <= config.step_tolerance) {
            summary.status = LmSummary::Status::Converged;
          }
          break;
        }
      }
      lambda *= config.damping_increase;
      if (lambda > config.max_damping) {
        if (!solved) {
          throw NumericalFailure(
              "damped normal equations remain singular at the damping ceiling");
        }
        // No improving step exists at full damping; accept the local optimum.
        summary.status = LmSummary::Status::Converged;
        break;
      }
    }
    if (summary.status == LmSummary::Status::Converged) {
      break;
    }
    if (!accepted) {
      break;
    }
  }

  summary.final_cost = cost;
  summary.final_norm_sum = evaluate_norm_sum(problem);
  return summary;
}

}  // namespace camset
