#pragma once

#include "camset/local_model.hpp"
#include "camset/match.hpp"
#include "camset/pipeline.hpp"
#include "camset/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace camset {

// Line-delimited structured text with explicit version headers; numbers are
// written with 17 significant digits so that round trips are bit exact.
// Formats (first line is the header):
//   camset_scene 1    meta/descdim/point/desc/descbin records
//   camset_model 1    descdim/camera/point/obs/target records
//   camset_matches 1  match records
//   camset_result 1   status/inliers/transform/target_pose/pose records
//   camset_truth 1    transform/target/pose records
//   camset_eval 1     image/registered/location/orientation records
// Scene descriptors may live in a little-endian binary sidecar referenced by
// a descbin record: magic "CSETDSB1", u32 dim, u64 count, then per record a
// u32 point id followed by dim f64 values.

struct GroundTruth {
  Sim3Transform transform;
  int target_camera = 0;
  std::vector<CameraPose> poses_global;
};

void save_scene(const std::string& path, const ScenePointCloud& scene,
                bool binary_descriptors = false);
ScenePointCloud load_scene(const std::string& path);

void save_model(const std::string& path, const CameraSetModel& model);
CameraSetModel load_model(const std::string& path);

void save_matches(const std::string& path, const std::vector<PointMatch>& matches);
std::vector<PointMatch> load_matches(const std::string& path);

void save_result(const std::string& path, const LocalizationResult& result);
LocalizationResult load_result(const std::string& path);

void save_truth(const std::string& path, const GroundTruth& truth);
GroundTruth load_truth(const std::string& path);

void save_eval(const std::string& path, const EvalReport& report);
EvalReport load_eval(const std::string& path);

// Registration-rate table (one labeled report per column block) and the
// error-statistics table, as aligned plain text.
void write_report_text(std::ostream& out,
                       const std::vector<std::pair<std::string, EvalReport>>& reports);
// The same content as CSV rows: label,registered,total,rate,
// loc_min,loc_median,loc_max,loc_mean,ori_min,ori_median,ori_max,ori_mean.
void write_report_csv(std::ostream& out,
                      const std::vector<std::pair<std::string, EvalReport>>& reports);

// 17-significant-digit form that parses back to the identical double.
std::string format_double(double value);

}  // namespace camset
