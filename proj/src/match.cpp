#include "camset/match.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace camset {

double descriptor_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::sqrt((a - b).squaredNorm());
}

void ScenePointCloud::validate() const {
  for (const auto& point : points) {
    if (!point.allFinite()) {
      throw InvalidConfig("scene point is not finite");
    }
  }
  std::vector<int> described(points.size(), 0);
  int dimension = -1;
  for (const auto& entry : descriptors) {
    if (entry.point < 0 || entry.point >= static_cast<int>(points.size())) {
      throw InvalidConfig("scene descriptor references point " +
                          std::to_string(entry.point));
    }
    ++described[entry.point];
    if (entry.descriptor.empty()) {
      throw InvalidConfig("scene descriptor is empty");
    }
    if (dimension < 0) {
      dimension = static_cast<int>(entry.descriptor.values.size());
    } else if (dimension != entry.descriptor.values.size()) {
      throw InvalidConfig("scene descriptors have inconsistent dimensions");
    }
    if (!entry.descriptor.values.allFinite()) {
      throw InvalidConfig("scene descriptor is not finite");
    }
  }
  for (std::size_t i = 0; i < described.size(); ++i) {
    if (described[i] == 0) {
      throw InvalidConfig("scene point " + std::to_string(i) +
                          " has no descriptor");
    }
  }
}

DescriptorIndex DescriptorIndex::build(const ScenePointCloud& scene) {
  scene.validate();
  std::vector<std::pair<int, Descriptor>> entries;
  entries.reserve(scene.descriptors.size());
  for (const auto& d : scene.descriptors) {
    entries.emplace_back(d.point, d.descriptor);
  }
  return build(entries);
}

DescriptorIndex DescriptorIndex::build(
    const std::vector<std::pair<int, Descriptor>>& descriptors) {
  if (descriptors.empty()) {
    throw EmptyScene("descriptor index built from an empty collection");
  }
  DescriptorIndex index;
  index.dimension_ = static_cast<int>(descriptors.front().second.values.size());
  if (index.dimension_ == 0) {
    throw InvalidConfig("descriptor index entries are empty");
  }
  index.data_.reserve(descriptors.size());
  index.owners_.reserve(descriptors.size());
  for (const auto& [owner, descriptor] : descriptors) {
    if (descriptor.values.size() != index.dimension_) {
      throw InvalidConfig("descriptor index entries have inconsistent dimensions");
    }
    index.data_.push_back(descriptor.values);
    index.owners_.push_back(owner);
  }
  return index;
}

std::vector<DescriptorIndex::Neighbor> DescriptorIndex::knn(
    const Eigen::VectorXd& query, int k) const {
  if (query.size() != dimension_) {
    throw InvalidConfig("query dimension " + std::to_string(query.size()) +
                        " does not match index dimension " +
                        std::to_string(dimension_));
  }
  std::vector<Neighbor> all(data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i) {
    all[i] = {static_cast<int>(i), owners_[i], descriptor_distance(data_[i], query)};
  }
  const auto order = [](const Neighbor& a, const Neighbor& b) {
    return std::tie(a.distance, a.owner, a.descriptor_index) <
           std::tie(b.distance, b.owner, b.descriptor_index);
  };
  const std::size_t keep = std::min<std::size_t>(std::max(k, 0), all.size());
  std::partial_sort(all.begin(), all.begin() + keep, all.end(), order);
  all.resize(keep);
  return all;
}

std::array<DescriptorIndex::Neighbor, 2> DescriptorIndex::two_nearest_distinct(
    const Eigen::VectorXd& query) const {
  if (query.size() != dimension_) {
    throw InvalidConfig("query dimension " + std::to_string(query.size()) +
                        " does not match index dimension " +
                        std::to_string(dimension_));
  }
  const auto better = [](const Neighbor& a, const Neighbor& b) {
    if (!b.valid()) {
      return true;
    }
    return std::tie(a.distance, a.owner, a.descriptor_index) <
           std::tie(b.distance, b.owner, b.descriptor_index);
  };
  std::array<Neighbor, 2> best;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const Neighbor candidate{static_cast<int>(i), owners_[i],
                             descriptor_distance(data_[i], query)};
    if (better(candidate, best[0])) {
      if (best[0].valid() && best[0].owner != candidate.owner) {
        best[1] = best[0];
      }
      best[0] = candidate;
    } else if (candidate.owner != best[0].owner && better(candidate, best[1])) {
      best[1] = candidate;
    }
  }
  return best;
}

std::vector<PointMatch> match_bidirectional(
    const std::vector<std::pair<Vec3, std::vector<Descriptor>>>& local_points,
    const DescriptorIndex& scene_index, double ratio_threshold) {
  if (!(ratio_threshold > 0.0) || !(ratio_threshold < 1.0)) {
    throw InvalidConfig("ratio threshold must lie in (0, 1)");
  }
  std::vector<std::pair<int, Descriptor>> local_entries;
  for (std::size_t i = 0; i < local_points.size(); ++i) {
    for (const auto& descriptor : local_points[i].second) {
      if (!descriptor.empty()) {
        local_entries.emplace_back(static_cast<int>(i), descriptor);
      }
    }
  }
  if (local_entries.empty()) {
    return {};
  }
  const DescriptorIndex local_index = DescriptorIndex::build(local_entries);

  // The ratio with the guard for coincident descriptors: a zero denominator
  // forces both distances to zero, and a ratio of 1 rejects the match.
  const auto guarded_ratio = [](double d1, double d2) {
    return d2 == 0.0 ? 1.0 : d1 / d2;
  };

  struct DescriptorMatch {
    int local_point = 0;
    int scene_point = 0;
    double distance = 0.0;
    double ratio = 0.0;
  };
  std::vector<DescriptorMatch> surviving;
  for (const auto& [local_point, descriptor] : local_entries) {
    const auto forward = scene_index.two_nearest_distinct(descriptor.values);
    if (!forward[0].valid() || !forward[1].valid()) {
      continue;
    }
    const double ratio = guarded_ratio(forward[0].distance, forward[1].distance);
    if (!(ratio < ratio_threshold)) {
      continue;
    }
    // Reverse check: the matched scene descriptor must prefer this local
    // point by the same margin.
    const Eigen::VectorXd& scene_descriptor =
        scene_index.descriptor(forward[0].descriptor_index);
    const auto reverse = local_index.two_nearest_distinct(scene_descriptor);
    if (!reverse[0].valid() || reverse[0].owner != local_point) {
      continue;
    }
    if (reverse[1].valid()) {
      const double reverse_ratio =
          guarded_ratio(reverse[0].distance, reverse[1].distance);
      if (!(reverse_ratio < ratio_threshold)) {
        continue;
      }
    }
    surviving.push_back({local_point, forward[0].owner, forward[0].distance, ratio});
  }

  // Per-point majority vote over the surviving descriptor matches; ties fall
  // to the smaller best distance, then the smaller scene index.
  std::vector<PointMatch> matches;
  for (std::size_t i = 0; i < local_points.size(); ++i) {
    struct Candidate {
      int votes = 0;
      double best_distance = std::numeric_limits<double>::infinity();
      double best_ratio = 0.0;
    };
    std::map<int, Candidate> tally;
    for (const auto& m : surviving) {
      if (m.local_point != static_cast<int>(i)) {
        continue;
      }
      Candidate& c = tally[m.scene_point];
      ++c.votes;
      if (m.distance < c.best_distance) {
        c.best_distance = m.distance;
        c.best_ratio = m.ratio;
      }
    }
    int winner = -1;
    Candidate winning;
    for (const auto& [scene_point, candidate] : tally) {
      const bool take =
          winner < 0 || candidate.votes > winning.votes ||
          (candidate.votes == winning.votes &&
           candidate.best_distance < winning.best_distance);
      if (take) {
        winner = scene_point;
        winning = candidate;
      }
    }
    if (winner >= 0) {
      matches.push_back({static_cast<int>(i), winner, winning.best_distance,
                         winning.best_ratio});
    }
  }
  return matches;
}

}  // namespace camset
