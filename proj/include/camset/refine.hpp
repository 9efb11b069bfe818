#pragma once

#include "camset/optim.hpp"
#include "camset/types.hpp"

#include <span>
#include <tuple>
#include <vector>

namespace camset {

// One matched observation for transform refinement: camera `camera` saw the
// unit ray `ray` (camera frame) toward global point `point`.
struct GlobalObservation {
  int camera = 0;
  Vec3 ray = Vec3::UnitZ();
  int point = 0;
};

// An observation of a locally reconstructed point.
struct LocalObservation {
  int camera = 0;
  Vec3 ray = Vec3::UnitZ();
  int point = 0;
};

// Joint refinement state: the transform, the intra-set cameras (camera 0 is
// the gauge anchor and never moves), the local points, and both observation
// sets. global_obs constrains T through the matched global points; local_obs
// ties cameras and local points to the local reconstruction.
struct JointProblem {
  Sim3Transform transform;
  std::vector<CameraPose> cameras;
  std::vector<Vec3> local_points;
  std::vector<Vec3> global_points;
  std::vector<GlobalObservation> global_obs;
  std::vector<LocalObservation> local_obs;

  void validate() const;
};

struct RefineSummary {
  Sim3Transform transform;
  double initial_cost = 0.0;
  double final_cost = 0.0;      // sum of squared residual norms
  double final_norm_sum = 0.0;  // sum of residual norms
  int iterations = 0;
};

// Minimizes sum ||r_ij - P_i(T X^g_j)/||P_i(T X^g_j)|| ||^2 over the 7
// transform parameters (log scale, rotation, center), starting from t_init.
RefineSummary refine_transform_lm(const Sim3Transform& t_init,
                                  std::span<const GlobalObservation> observations,
                                  std::span<const Vec3> global_points,
                                  std::span<const CameraPose> cameras,
                                  const LmConfig& config);

struct JointRefineSummary {
  JointProblem problem;  // refined state
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double final_norm_sum = 0.0;
  int iterations = 0;
};

// Minimizes the two-term objective (global matches through T plus local
// reconstruction residuals) over T, cameras 1..m-1 and all local points.
// refine_cameras / refine_points freeze the extra blocks, which reduces the
// problem to refine_transform_lm when no local observations exist; that case
// freezes them automatically. Throws GaugeUnderconstrained with fewer than 2
// cameras or no global observations.
JointRefineSummary refine_joint(const JointProblem& problem, const LmConfig& config,
                                bool refine_cameras = true, bool refine_points = true);

// Problem builders shared with the diagnostics below and with the tests.
RayBundleProblem make_transform_problem(const Sim3Transform& t_init,
                                        std::span<const GlobalObservation> observations,
                                        std::span<const Vec3> global_points,
                                        std::span<const CameraPose> cameras);
RayBundleProblem make_joint_problem(const JointProblem& problem,
                                    bool refine_cameras = true,
                                    bool refine_points = true);

}  // namespace camset
