#include "camset/pipeline.hpp"

#include <algorithm>
#include <map>

namespace camset {

SummaryStats summarize(std::vector<double> values) {
  SummaryStats stats;
  if (values.empty()) {
    return stats;
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  stats.min = values.front();
  stats.max = values.back();
  stats.median = n % 2 == 1 ? values[n / 2]
                            : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  stats.mean = sum / static_cast<double>(n);
  return stats;
}

EvalReport evaluate(const std::vector<LabeledResult>& results,
                    const std::vector<LabeledTruth>& truth) {
  std::map<std::string, const CameraPose*> truth_by_id;
  for (const auto& t : truth) {
    if (!truth_by_id.emplace(t.id, &t.target_pose_global).second) {
      throw MismatchedIds("duplicate truth id " + t.id);
    }
  }
  if (results.size() != truth.size()) {
    throw MismatchedIds("result count " + std::to_string(results.size()) +
                        " does not match truth count " +
                        std::to_string(truth.size()));
  }

  EvalReport report;
  std::vector<double> locations;
  std::vector<double> orientations;
  for (const auto& labeled : results) {
    const auto it = truth_by_id.find(labeled.id);
    if (it == truth_by_id.end()) {
      throw MismatchedIds("no truth entry for result id " + labeled.id);
    }
    EvalReport::Entry entry;
    entry.id = labeled.id;
    entry.registered = labeled.result.registered();
    if (entry.registered) {
      if (!labeled.result.target_pose_global) {
        throw InvalidConfig("registered result " + labeled.id +
                            " is missing the target pose");
      }
      const CameraPose& estimated = *labeled.result.target_pose_global;
      const CameraPose& expected = *it->second;
      entry.location_error_m = (estimated.center() - expected.center()).norm();
      entry.orientation_error_deg =
          rotation_angle_deg(estimated.rotation, expected.rotation);
      locations.push_back(entry.location_error_m);
      orientations.push_back(entry.orientation_error_deg);
      ++report.registered_count;
    }
    report.entries.push_back(std::move(entry));
  }
  report.total_count = static_cast<int>(results.size());
  report.registration_rate =
      report.total_count > 0
          ? static_cast<double>(report.registered_count) / report.total_count
          : 0.0;
  report.location = summarize(std::move(locations));
  report.orientation = summarize(std::move(orientations));
  return report;
}

}  // namespace camset
