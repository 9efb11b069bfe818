#pragma once

#include "camset/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace camset {

struct LmConfig {
  int max_iterations = 100;
  double initial_damping = 1e-3;
  double damping_increase = 10.0;
  double damping_decrease = 10.0;
  double gradient_tolerance = 1e-10;
  double step_tolerance = 1e-12;
  double max_damping = 1e12;
  // Point blocks are Schur-eliminated once the problem has more active point
  // parameters than this; below it the normal equations are solved densely.
  int schur_point_threshold = 200;

  void validate() const;
};

// Which parameter blocks of a RayBundleProblem move during optimization.
// cameras[0] is always held fixed as the gauge anchor.
struct VariableFlags {
  bool transform = false;
  bool transform_scale = true;  // only meaningful when transform is active
  bool cameras = false;
  bool points = false;
};

// A sum of unit-ray reprojection terms over an optional similarity transform,
// a set of camera poses and a set of points. Each term contributes the
// residual r - Z / ||Z|| where Z is the observed point in the camera frame:
//   global terms:  Z = P_i(T X^g)   (the point is mapped through T first)
//   local terms:   Z = P_i(X^l)
// This one structure backs refine_transform_lm, refine_joint and
// bundle_adjust; they differ only in which blocks vary and which terms exist.
struct RayBundleProblem {
  Sim3Transform transform;
  std::vector<CameraPose> cameras;
  std::vector<Vec3> local_points;
  std::vector<Vec3> global_points;

  struct Term {
    int camera = 0;
    Vec3 ray = Vec3::UnitZ();  // unit, camera frame
    int point = 0;
  };
  std::vector<Term> global_terms;
  std::vector<Term> local_terms;

  VariableFlags vary;

  int num_residuals() const;
  // Packed tangent dimension: [transform (6/7)] [cameras 1.. x6] [points x3].
  int num_parameters() const;
  void validate() const;
};

// Stacked residual vector, 3 rows per term (global terms first).
Eigen::VectorXd evaluate_residuals(const RayBundleProblem& problem);
// Sum of squared residual norms; the quantity LM minimizes.
double evaluate_cost(const RayBundleProblem& problem);
// Sum of unsquared residual norms, reported alongside the cost.
double evaluate_norm_sum(const RayBundleProblem& problem);
// Dense Jacobian of the stacked residuals with respect to the packed tangent.
Eigen::MatrixXd evaluate_jacobian(const RayBundleProblem& problem);
// Retraction: moves every active block by the packed tangent step. Rotations
// update by left-multiplied exponentials; scale moves on the log axis.
RayBundleProblem apply_step(const RayBundleProblem& problem,
                            const Eigen::VectorXd& delta);

struct LmSummary {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double final_norm_sum = 0.0;
  // Cost after every accepted step, starting with the initial cost.
  std::vector<double> cost_history;
  enum class Status { Converged, MaxIterations } status = Status::Converged;
};

// Levenberg-Marquardt with multiplicative damping on diag(J^T J). Accepted
// steps strictly reduce the cost. Throws NumericalFailure when the damped
// normal equations stay unsolvable at the damping ceiling.
LmSummary solve_lm(RayBundleProblem& problem, const LmConfig& config);

}  // namespace camset
