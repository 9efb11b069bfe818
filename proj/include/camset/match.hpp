#pragma once

#include "camset/types.hpp"

#include <Eigen/Core>

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace camset {

// A fixed-length descriptor; SIFT-like collections use 128 dimensions and
// L2-normalized entries, but any consistent length works.
struct Descriptor {
  Eigen::VectorXd values;

  Descriptor() = default;
  explicit Descriptor(Eigen::VectorXd v) : values(std::move(v)) {}
  bool empty() const { return values.size() == 0; }
};

// The pre-built global scene: 3D points, each carrying one or more
// descriptors from the images that observed it.
struct ScenePointCloud {
  std::vector<Vec3> points;
  struct PointDescriptor {
    int point = 0;
    Descriptor descriptor;
  };
  std::vector<PointDescriptor> descriptors;
  std::map<std::string, std::string> metadata;

  void validate() const;
};

// A local point <-> scene point correspondence surviving both ratio tests.
struct PointMatch {
  int local_index = 0;
  int scene_index = 0;
  double descriptor_distance = 0.0;
  double ratio = 0.0;
};

// L2 distance between two descriptor vectors. Every matcher component goes
// through this one arithmetic path, so equal inputs give equal distances.
double descriptor_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Exact nearest-neighbor index over a descriptor collection in which every
// descriptor belongs to an owning point. Immutable after build; queries are
// safe from any number of threads.
class DescriptorIndex {
 public:
  struct Neighbor {
    int descriptor_index = -1;
    int owner = -1;
    double distance = 0.0;
    bool valid() const { return descriptor_index >= 0; }
  };

  // Throws EmptyScene for a scene without descriptors.
  static DescriptorIndex build(const ScenePointCloud& scene);
  static DescriptorIndex build(
      const std::vector<std::pair<int, Descriptor>>& descriptors);

  // k nearest descriptors ordered by (distance, owner, descriptor index).
  std::vector<Neighbor> knn(const Eigen::VectorXd& query, int k) const;
  // Nearest descriptor plus the nearest descriptor of a different owner.
  // The second entry is invalid when only one owner exists.
  std::array<Neighbor, 2> two_nearest_distinct(const Eigen::VectorXd& query) const;

  int dimension() const { return dimension_; }
  int size() const { return static_cast<int>(owners_.size()); }
  // The stored descriptor vector and owning point behind an index entry.
  const Eigen::VectorXd& descriptor(int index) const { return data_[index]; }
  int owner(int index) const { return owners_[index]; }

 private:
  std::vector<Eigen::VectorXd> data_;
  std::vector<int> owners_;
  int dimension_ = 0;
};

inline constexpr double kDefaultRatioThreshold = 0.6;

// 3D-to-3D matching with forward and reverse ratio tests. For each local
// descriptor the two nearest scene descriptors of distinct scene points are
// found and the d1/d2 < threshold test applied; survivors are re-queried
// against the local descriptors with the roles reversed and must pass the
// same test while mapping back to the same local point. Descriptor-level
// matches aggregate per local point by majority vote (ties to the smallest
// distance), giving at most one PointMatch per local point.
std::vector<PointMatch> match_bidirectional(
    const std::vector<std::pair<Vec3, std::vector<Descriptor>>>& local_points,
    const DescriptorIndex& scene_index,
    double ratio_threshold = kDefaultRatioThreshold);

}  // namespace camset
