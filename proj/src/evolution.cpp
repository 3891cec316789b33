#include "c2b/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "c2b/error.hpp"
#include "c2b/rng.hpp"
#include "c2b/twist_swing.hpp"

namespace c2b {
namespace {

// geodesic angle via the chordal identity |A-B|_F = 2 sqrt(2) sin(theta/2),
// exact at zero where the arccos-of-trace form loses half the precision
double geodesic_angle(const Mat3& a, const Mat3& b) {
  double s = (a - b).norm() / (2.0 * std::numbers::sqrt2);
  return 2.0 * std::asin(std::min(s, 1.0));
}

Vec3 random_unit_axis(Rng& rng) {
  for (;;) {
    Vec3 v(rng.normal(), rng.normal(), rng.normal());
    double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

}  // namespace

double pose_distance(const Pose& a, const Pose& b, const ClothMask& mask) {
  if (a.joint_count() != b.joint_count() ||
      a.joint_count() != mask.joint_count())
    fail_input("pose distance needs matching joint counts");
  double total = 0.0;
  for (int k = 0; k < a.joint_count(); ++k)
    if (mask.covered[k]) total += geodesic_angle(a.rotations[k], b.rotations[k]);
  return total;
}

std::vector<int> knn_match(const PoseDatabase& db, const Pose& query,
                           const ClothMask& mask, int k) {
  if (db.entries.empty()) fail_input("pose database is empty");
  if (k < 1 || k > db.size())
    fail_input("k must be between 1 and the database size");
  std::vector<std::pair<double, int>> ranked;
  ranked.reserve(db.entries.size());
  for (int i = 0; i < db.size(); ++i)
    ranked.emplace_back(pose_distance(db.entries[i].pose, query, mask), i);
  std::sort(ranked.begin(), ranked.end());
  std::vector<int> out(k);
  for (int i = 0; i < k; ++i) out[i] = ranked[i].second;
  return out;
}

Pose crossover(const Pose& estimate, const Pose& donor, const ClothMask& mask) {
  if (estimate.joint_count() != donor.joint_count() ||
      estimate.joint_count() != mask.joint_count())
    fail_input("crossover needs matching joint counts");
  Pose out = estimate;
  for (int k = 0; k < out.joint_count(); ++k)
    if (!mask.covered[k]) out.rotations[k] = donor.rotations[k];
  return out;
}

Pose mutate(const Pose& pose, const ClothMask& mask,
            const MutationConfig& config) {
  if (pose.joint_count() != mask.joint_count())
    fail_input("mutate needs matching joint counts");
  if (config.epsilon < 0.0) fail_input("mutation epsilon must be nonnegative");
  Pose out = pose;
  if (config.epsilon == 0.0) return out;
  for (int k = 0; k < out.joint_count(); ++k) {
    if (mask.covered[k]) continue;
    Rng rng(derive_seed(config.seed, "mutate", k));
    Vec3 axis = random_unit_axis(rng);
    double angle = rng.uniform(0.0, config.epsilon);
    out.rotations[k] = pose.rotations[k] *
                       rodrigues(axis, std::sin(angle), std::cos(angle));
  }
  return out;
}

std::vector<Pose> generate_variants(const PoseDatabase& db,
                                    const Pose& estimate,
                                    const ClothMask& mask, int count,
                                    const MutationConfig& config, int k) {
  if (count < 0) fail_input("variant count must be nonnegative");
  if (k < 1) fail_input("k must be positive");
  int k_eff = std::min(k, db.size());
  std::vector<int> nearest = knn_match(db, estimate, mask, k_eff);
  std::vector<Pose> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const Pose& donor = db.entries[nearest[i % k_eff]].pose;
    Pose crossed = crossover(estimate, donor, mask);
    MutationConfig sub{config.epsilon, derive_seed(config.seed, "variant", i)};
    out.push_back(mutate(crossed, mask, sub));
  }
  return out;
}

}  // namespace c2b
