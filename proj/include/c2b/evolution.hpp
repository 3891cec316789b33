#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "c2b/kinematics.hpp"

namespace c2b {

// Motion database the variant generator draws donor poses from.
struct PoseDatabase {
  struct Entry {
    Pose pose;
    std::string tag;
  };
  std::vector<Entry> entries;

  int size() const { return static_cast<int>(entries.size()); }
};

struct MutationConfig {
  double epsilon = 0.0;  // per-joint geodesic bound, radians
  std::uint64_t seed = 0;
};

// Sum of geodesic angles between corresponding rotations over the
// cloth-covered joints.
double pose_distance(const Pose& a, const Pose& b, const ClothMask& mask);

// Indices of the k database entries nearest to the query under
// pose_distance, ascending; ties broken by lower index.
std::vector<int> knn_match(const PoseDatabase& db, const Pose& query,
                           const ClothMask& mask, int k);

// Covered joints keep the estimate's rotations, uncovered joints take the
// donor's; the root translation comes from the estimate.
Pose crossover(const Pose& estimate, const Pose& donor, const ClothMask& mask);

// Composes each uncovered joint's rotation with a random rotation of
// geodesic angle below epsilon (uniform axis, uniform angle). Covered
// joints are returned bitwise unchanged.
Pose mutate(const Pose& pose, const ClothMask& mask,
            const MutationConfig& config);

// Cycles through the k nearest donors (clamped to the database size),
// applying crossover then mutate with a sub-seed per variant.
std::vector<Pose> generate_variants(const PoseDatabase& db,
                                    const Pose& estimate,
                                    const ClothMask& mask, int count,
                                    const MutationConfig& config, int k);

}  // namespace c2b
