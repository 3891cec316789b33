#include "c2b/body_model.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "c2b/error.hpp"
#include "c2b/rng.hpp"

namespace c2b {
namespace {

constexpr int kRingVerts = 10;
constexpr int kBaseVertexCount = 458;  // rings + caps below, all slots off

enum class Part { torso, left_arm, right_arm, left_hand, right_hand,
                  left_leg, right_leg, left_foot, right_foot };

enum class Role { plain, band_chest, band_waist, band_hips, head_ring };

enum class Axis { x, y, z };

struct VertTag {
  Part part = Part::torso;
  Role role = Role::plain;
};

struct Builder {
  std::vector<Vec3> verts;
  std::vector<VertTag> tags;
  std::vector<Eigen::Vector3i> faces;

  int add_vert(const Vec3& p, Part part, Role role) {
    verts.push_back(p);
    tags.push_back({part, role});
    return static_cast<int>(verts.size()) - 1;
  }

  // Ring of kRingVerts vertices around `axis` through `center`, semi-axes
  // (ra, rb) over the two remaining coordinates. Returns first vertex index.
  int add_ring(Axis axis, const Vec3& center, double ra, double rb,
               double phase, Part part, Role role) {
    int start = static_cast<int>(verts.size());
    for (int j = 0; j < kRingVerts; ++j) {
      double phi = phase + 2.0 * std::numbers::pi * j / kRingVerts;
      double ca = ra * std::cos(phi);
      double cb = rb * std::sin(phi);
      Vec3 p = center;
      switch (axis) {
        case Axis::y: p.x() += ca; p.z() += cb; break;
        case Axis::x: p.y() += ca; p.z() += cb; break;
        case Axis::z: p.x() += ca; p.y() += cb; break;
      }
      add_vert(p, part, role);
    }
    return start;
  }

  void bridge(int ring_a, int ring_b) {
    for (int j = 0; j < kRingVerts; ++j) {
      int jn = (j + 1) % kRingVerts;
      faces.emplace_back(ring_a + j, ring_a + jn, ring_b + jn);
      faces.emplace_back(ring_a + j, ring_b + jn, ring_b + j);
    }
  }

  void fan(int ring, int apex) {
    for (int j = 0; j < kRingVerts; ++j) {
      int jn = (j + 1) % kRingVerts;
      faces.emplace_back(ring + j, ring + jn, apex);
    }
  }
};

WeightRow ring_row(int ring_start, double w) {
  WeightRow row;
  for (int j = 0; j < kRingVerts; ++j)
    row.entries.emplace_back(ring_start + j, w / kRingVerts);
  return row;
}

WeightRow two_ring_row(int ring_a, double wa, int ring_b, double wb) {
  WeightRow row = ring_row(ring_a, wa);
  WeightRow other = ring_row(ring_b, wb);
  row.entries.insert(row.entries.end(), other.entries.begin(),
                     other.entries.end());
  return row;
}

}  // namespace

void BodyModel::validate() const {
  const int v = vertex_count();
  const int n = joint_count();
  if (v == 0) fail_input("body model has no vertices");
  if (static_cast<int>(skin_weights.size()) != v)
    fail_input("skin weight rows do not match vertex count");
  if (static_cast<int>(joint_regressor.size()) != n)
    fail_input("joint regressor rows do not match joint count");
  for (const auto& f : faces)
    for (int i = 0; i < 3; ++i)
      if (f[i] < 0 || f[i] >= v) fail_input("face vertex index out of range");
  for (const auto& shape : blendshapes)
    if (static_cast<int>(shape.size()) != v)
      fail_input("blendshape size does not match vertex count");
  for (int k = 0; k < n; ++k) {
    double sum = 0.0;
    if (joint_regressor[k].entries.empty())
      fail_input("empty joint regressor row for " + tree.name[k]);
    for (auto [idx, w] : joint_regressor[k].entries) {
      if (idx < 0 || idx >= v) fail_input("regressor vertex index out of range");
      if (w < -1e-12) fail_input("negative joint regressor weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      fail_input("joint regressor row for " + tree.name[k] +
                 " does not sum to 1");
  }
  for (int i = 0; i < v; ++i) {
    const auto& row = skin_weights[i];
    if (row.entries.empty() || row.entries.size() > 4)
      fail_input("skin weight row must have 1 to 4 entries");
    double sum = 0.0;
    for (auto [idx, w] : row.entries) {
      if (idx < 0 || idx >= n) fail_input("skin weight joint index out of range");
      if (w < -1e-12) fail_input("negative skin weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      fail_input("skin weight row does not sum to 1");
  }
}

BodyModel synth_body_model(int joint_count, int shape_dims, int vertex_budget,
                           std::uint64_t seed) {
  if (joint_count != 24)
    fail_input("synthetic body model requires the default 24-joint layout");
  if (shape_dims < 1) fail_input("shape_dims must be at least 1");
  if (shape_dims > 10)
    fail_input("synthetic body model defines at most 10 shape directions");
  if (vertex_budget < 100) fail_input("vertex_budget must be at least 100");
  if (vertex_budget < kBaseVertexCount)
    fail_input("vertex budget too small to cover all bones (minimum " +
               std::to_string(kBaseVertexCount) + ")");

  // Optional subdivision rings, activated in mirrored left/right groups so
  // any budget keeps the template bilaterally symmetric.
  // slot ids: 0..7 arm midpoints (L then R offset by 4), 8..19 leg midpoints
  // (R offset by 6), 20..22 torso, 23..25 head, 26..27 foot
  const std::vector<std::vector<int>> slot_groups = {
      {0, 4}, {1, 5}, {2, 6}, {3, 7}, {8, 14}, {9, 15}, {10, 16}, {11, 17},
      {12, 18}, {13, 19}, {20}, {21}, {22}, {23}, {24}, {25}, {26, 27}};
  std::array<bool, 28> on{};
  {
    int used = kBaseVertexCount;
    for (const auto& group : slot_groups) {
      int cost = kRingVerts * static_cast<int>(group.size());
      if (used + cost > vertex_budget) continue;
      used += cost;
      for (int s : group) on[s] = true;
    }
  }
  auto slot_phase = [&](int slot) {
    Rng r(derive_seed(seed, "ring-phase", slot));
    return r.uniform(0.0, 2.0 * std::numbers::pi / kRingVerts);
  };

  Builder b;
  const double pi = std::numbers::pi;

  // --- torso and head: one vertical tube, pelvis cap to crown apex ---
  struct TRing { double y, a, bz; Role role; int slot; };
  // the hips and waist silhouettes are short barrels: three rings of equal
  // radius so the band windows keep a representative ring at every shape in
  // the working range, while the middle ring anchors the joint regressors
  const std::vector<TRing> torso_rings = {
      {-0.117, 0.170, 0.120, Role::band_hips, -1},
      {-0.072, 0.170, 0.120, Role::band_hips, -1},
      {-0.032, 0.170, 0.120, Role::band_hips, -1},
      {0.022, 0.150, 0.110, Role::band_waist, -1},
      {0.060, 0.150, 0.110, Role::band_waist, -1},
      {0.098, 0.150, 0.110, Role::band_waist, -1},
      {0.150, 0.157, 0.114, Role::plain, 20},
      {0.170, 0.159, 0.115, Role::plain, 21},
      {0.258, 0.165, 0.120, Role::band_chest, -1},
      {0.340, 0.150, 0.110, Role::plain, 22},
      {0.420, 0.130, 0.100, Role::plain, -1},  // collar anchor ring
      {0.500, 0.050, 0.050, Role::plain, -1},  // neck anchor ring
      {0.540, 0.055, 0.055, Role::head_ring, -1},
      {0.570, 0.075, 0.080, Role::head_ring, 23},
      {0.600, 0.085, 0.090, Role::head_ring, -1},
      {0.630, 0.085, 0.090, Role::head_ring, 24},
      {0.660, 0.080, 0.085, Role::head_ring, -1},
      {0.685, 0.065, 0.070, Role::head_ring, 25},
      {0.700, 0.050, 0.055, Role::head_ring, -1},
  };
  int ring_hips = -1, ring_waist = -1, ring_chest = -1, ring_collar = -1,
      ring_neckb = -1;
  std::vector<int> torso_chain;
  for (const auto& r : torso_rings) {
    if (r.slot >= 0 && !on[r.slot]) continue;
    int start = b.add_ring(Axis::y, {0.0, r.y, 0.0}, r.a, r.bz, 0.0,
                           Part::torso, r.role);
    torso_chain.push_back(start);
    if (r.y == -0.072) ring_hips = start;
    if (r.y == 0.060) ring_waist = start;
    if (r.role == Role::band_chest) ring_chest = start;
    if (r.y == 0.420) ring_collar = start;
    if (r.y == 0.500) ring_neckb = start;
  }
  int apex = b.add_vert({0.0, 0.72, 0.0}, Part::torso, Role::plain);
  int pelvis_cap = b.add_vert({0.0, -0.12, 0.0}, Part::torso, Role::plain);
  for (size_t i = 0; i + 1 < torso_chain.size(); ++i)
    b.bridge(torso_chain[i], torso_chain[i + 1]);
  b.fan(torso_chain.back(), apex);
  b.fan(torso_chain.front(), pelvis_cap);

  // --- arms: lateral tubes from the shoulder out to a fingertip ---
  struct ARing { double x, r; bool hand; int slot; };
  const std::vector<ARing> arm_rings = {
      {0.1650, 0.055, false, -1},  // shoulder anchor
      {0.2375, 0.052, false, 0},
      {0.3100, 0.048, false, -1},
      {0.3725, 0.046, false, 1},
      {0.4350, 0.044, false, -1},  // elbow anchor
      {0.4975, 0.042, false, 2},
      {0.5600, 0.040, false, -1},
      {0.6225, 0.037, false, 3},
      {0.6850, 0.034, false, -1},  // wrist anchor
      {0.7200, 0.036, true, -1},
      {0.7700, 0.020, true, -1},   // hand anchor
  };
  int ring_shoulder[2], ring_elbow[2], ring_wrist[2], ring_hand[2];
  for (int side = 0; side < 2; ++side) {
    double sgn = side == 0 ? 1.0 : -1.0;
    Part arm = side == 0 ? Part::left_arm : Part::right_arm;
    Part hand = side == 0 ? Part::left_hand : Part::right_hand;
    std::vector<int> chain;
    for (const auto& r : arm_rings) {
      double phase = 0.0;
      if (r.slot >= 0) {
        int slot = side == 0 ? r.slot : r.slot + 4;
        if (!on[slot]) continue;
        phase = slot_phase(r.slot);
      }
      int start = b.add_ring(Axis::x, {sgn * r.x, 0.42, 0.0}, r.r, r.r, phase,
                             r.hand ? hand : arm, Role::plain);
      chain.push_back(start);
      if (r.x == 0.1650) ring_shoulder[side] = start;
      if (r.x == 0.4350) ring_elbow[side] = start;
      if (r.x == 0.6850) ring_wrist[side] = start;
      if (r.x == 0.7700) ring_hand[side] = start;
    }
    int tip = b.add_vert({sgn * 0.795, 0.42, 0.0}, hand, Role::plain);
    for (size_t i = 0; i + 1 < chain.size(); ++i) b.bridge(chain[i], chain[i + 1]);
    b.fan(chain.back(), tip);
  }

  // --- legs: vertical tubes from a hip cap down through the ankle ---
  struct LRing { double y, r; int slot; };
  const std::vector<LRing> leg_rings = {
      {-0.070, 0.0500, -1},  // hip anchor
      {-0.115, 0.0540, 8},
      {-0.160, 0.0580, -1},
      {-0.230, 0.0575, 9},
      {-0.300, 0.0570, -1},
      {-0.375, 0.0535, 10},
      {-0.450, 0.0500, -1},  // knee anchor
      {-0.525, 0.0475, 11},
      {-0.600, 0.0450, -1},
      {-0.670, 0.0425, 12},
      {-0.740, 0.0400, -1},
      {-0.795, 0.0390, 13},
      {-0.850, 0.0380, -1},  // ankle anchor
  };
  int ring_hip[2], ring_knee[2], ring_ankle[2], ring_foot[2];
  for (int side = 0; side < 2; ++side) {
    double sgn = side == 0 ? 1.0 : -1.0;
    Part leg = side == 0 ? Part::left_leg : Part::right_leg;
    Part foot = side == 0 ? Part::left_foot : Part::right_foot;
    std::vector<int> chain;
    for (const auto& r : leg_rings) {
      double phase = 0.0;
      if (r.slot >= 0) {
        int slot = side == 0 ? r.slot : r.slot + 6;
        if (!on[slot]) continue;
        phase = slot_phase(r.slot);
        if (side == 1) phase = pi - phase;
      }
      int start = b.add_ring(Axis::y, {sgn * 0.09, r.y, 0.0}, r.r, r.r, phase,
                             leg, Role::plain);
      chain.push_back(start);
      if (r.y == -0.070) ring_hip[side] = start;
      if (r.y == -0.450) ring_knee[side] = start;
      if (r.y == -0.850) ring_ankle[side] = start;
    }
    // foot: short forward tube, rigid with the ankle region
    std::vector<int> foot_chain;
    struct FRing { double z, rx, ry; int slot; };
    const std::vector<FRing> foot_rings = {
        {0.020, 0.035, 0.040, -1},
        {0.065, 0.034, 0.038, side == 0 ? 26 : 27},
        {0.110, 0.032, 0.040, -1},  // foot anchor
    };
    for (const auto& r : foot_rings) {
      if (r.slot >= 0 && !on[r.slot]) continue;
      // phase puts one vertex at the exact bottom so the sole height is
      // a single linear function of shape
      int start = b.add_ring(Axis::z, {sgn * 0.09, -0.89, r.z}, r.rx, r.ry,
                             pi / kRingVerts, foot, Role::plain);
      foot_chain.push_back(start);
      if (r.z == 0.110) ring_foot[side] = start;
    }
    int toe = b.add_vert({sgn * 0.09, -0.90, 0.19}, foot, Role::plain);
    int heel = b.add_vert({sgn * 0.09, -0.883, -0.035}, foot, Role::plain);
    b.bridge(chain.back(), foot_chain.front());
    for (size_t i = 0; i + 1 < foot_chain.size(); ++i)
      b.bridge(foot_chain[i], foot_chain[i + 1]);
    b.fan(foot_chain.back(), toe);
    b.fan(foot_chain.front(), heel);
    for (size_t i = 0; i + 1 < chain.size(); ++i) b.bridge(chain[i], chain[i + 1]);
  }

  BodyModel model;
  model.template_vertices = b.verts;
  model.faces = b.faces;

  // kinematic tree: the default layout, which the regressed template joints
  // reproduce exactly by construction
  model.tree = default_tree();

  // --- joint regressor: affine-exact combinations of ring centroids ---
  model.joint_regressor.resize(24);
  auto set_row = [&](const char* name, WeightRow row) {
    model.joint_regressor[model.tree.index_of(name)] = std::move(row);
  };
  // torso joints interpolate between torso ring centroids so the regressed
  // positions track every shape direction exactly
  set_row("pelvis", two_ring_row(ring_waist, 0.072 / 0.132, ring_hips,
                                 0.060 / 0.132));
  set_row("spine1", two_ring_row(ring_chest, 0.060 / 0.198, ring_waist,
                                 0.138 / 0.198));
  set_row("spine2", two_ring_row(ring_chest, 0.180 / 0.198, ring_waist,
                                 0.018 / 0.198));
  set_row("spine3", two_ring_row(ring_collar, 0.102 / 0.162, ring_chest,
                                 0.060 / 0.162));
  set_row("neck", two_ring_row(ring_neckb, 0.060 / 0.080, ring_collar,
                               0.020 / 0.080));
  {
    WeightRow head;
    head.entries.emplace_back(apex, 1.0);
    set_row("head", std::move(head));
    // collars sit between the +-x extremes of the collar-height torso ring
    WeightRow lc, rc;
    double w0 = 0.5 + 0.07 / (2.0 * 0.13);
    lc.entries.emplace_back(ring_collar + 0, w0);
    lc.entries.emplace_back(ring_collar + kRingVerts / 2, 1.0 - w0);
    rc.entries.emplace_back(ring_collar + kRingVerts / 2, w0);
    rc.entries.emplace_back(ring_collar + 0, 1.0 - w0);
    set_row("left_collar", std::move(lc));
    set_row("right_collar", std::move(rc));
  }
  const char* sides[2][6] = {
      {"left_shoulder", "left_elbow", "left_wrist", "left_hand", "left_hip",
       "left_knee"},
      {"right_shoulder", "right_elbow", "right_wrist", "right_hand",
       "right_hip", "right_knee"}};
  for (int side = 0; side < 2; ++side) {
    set_row(sides[side][0], ring_row(ring_shoulder[side], 1.0));
    set_row(sides[side][1], ring_row(ring_elbow[side], 1.0));
    set_row(sides[side][2], ring_row(ring_wrist[side], 1.0));
    set_row(sides[side][3], ring_row(ring_hand[side], 1.0));
    set_row(sides[side][4], ring_row(ring_hip[side], 1.0));
    set_row(sides[side][5], ring_row(ring_knee[side], 1.0));
  }
  set_row("left_ankle", ring_row(ring_ankle[0], 1.0));
  set_row("right_ankle", ring_row(ring_ankle[1], 1.0));
  set_row("left_foot", ring_row(ring_foot[0], 1.0));
  set_row("right_foot", ring_row(ring_foot[1], 1.0));

  // --- skin weights: per ring, blended along each bone ---
  model.skin_weights.resize(model.vertex_count());
  auto j = [&](const char* name) { return model.tree.index_of(name); };
  auto blend = [&](int vert, int ja, double wa, int jb, double wb) {
    WeightRow row;
    if (wa > 0.0) row.entries.emplace_back(ja, wa);
    if (wb > 0.0) row.entries.emplace_back(jb, wb);
    model.skin_weights[vert] = std::move(row);
  };
  const int j_pelvis = j("pelvis"), j_spine1 = j("spine1"),
            j_spine2 = j("spine2"), j_spine3 = j("spine3"), j_neck = j("neck"),
            j_head = j("head");
  for (int v = 0; v < model.vertex_count(); ++v) {
    const VertTag& tag = b.tags[v];
    const Vec3& p = model.template_vertices[v];
    switch (tag.part) {
      case Part::torso: {
        double y = p.y();
        if (v == apex || tag.role == Role::head_ring) {
          blend(v, j_head, 1.0, 0, 0.0);
        } else if (y <= 0.0) {
          blend(v, j_pelvis, 1.0, 0, 0.0);
        } else if (y <= 0.12) {
          double s = y / 0.12;
          blend(v, j_pelvis, 1.0 - s, j_spine1, s);
        } else if (y <= 0.24) {
          double s = (y - 0.12) / 0.12;
          blend(v, j_spine1, 1.0 - s, j_spine2, s);
        } else if (y <= 0.36) {
          double s = (y - 0.24) / 0.12;
          blend(v, j_spine2, 1.0 - s, j_spine3, s);
        } else if (y <= 0.48) {
          double s = (y - 0.36) / 0.12;
          blend(v, j_spine3, 1.0 - s, j_neck, s);
        } else {
          double s = std::min(1.0, (y - 0.48) / 0.24);
          blend(v, j_neck, 1.0 - s, j_head, s);
        }
        break;
      }
      case Part::left_arm:
      case Part::right_arm: {
        int side = tag.part == Part::left_arm ? 0 : 1;
        double x = std::abs(p.x());
        int js = j(sides[side][0]), je = j(sides[side][1]), jw = j(sides[side][2]);
        if (x <= 0.165) {
          blend(v, js, 1.0, 0, 0.0);
        } else if (x <= 0.435) {
          double s = (x - 0.165) / 0.27;
          blend(v, js, 1.0 - s, je, s);
        } else {
          double s = std::min(1.0, (x - 0.435) / 0.25);
          blend(v, je, 1.0 - s, jw, s);
        }
        break;
      }
      case Part::left_hand:
      case Part::right_hand: {
        int side = tag.part == Part::left_hand ? 0 : 1;
        double x = std::abs(p.x());
        int jw = j(sides[side][2]), jh = j(sides[side][3]);
        if (x >= 0.77) {
          blend(v, jh, 1.0, 0, 0.0);
        } else {
          double s = (x - 0.685) / 0.085;
          blend(v, jw, 1.0 - s, jh, s);
        }
        break;
      }
      case Part::left_leg:
      case Part::right_leg: {
        int side = tag.part == Part::left_leg ? 0 : 1;
        double y = p.y();
        int jh = j(sides[side][4]), jk = j(sides[side][5]);
        int ja = j(side == 0 ? "left_ankle" : "right_ankle");
        if (y >= -0.07) {
          blend(v, jh, 1.0, 0, 0.0);
        } else if (y >= -0.45) {
          double s = (-0.07 - y) / 0.38;
          blend(v, jh, 1.0 - s, jk, s);
        } else {
          double s = std::min(1.0, (-0.45 - y) / 0.40);
          blend(v, jk, 1.0 - s, ja, s);
        }
        break;
      }
      case Part::left_foot:
      case Part::right_foot: {
        int jf = j(tag.part == Part::left_foot ? "left_foot" : "right_foot");
        blend(v, jf, 1.0, 0, 0.0);
        break;
      }
    }
  }

  // --- shape blendshapes (all displacement fields linear in template
  // coordinates, so measurements and regressed joints are affine in beta) ---
  const double k_height = 0.030, k_chest = 0.040, k_waist = 0.050,
               k_hips = 0.040, k_shoulder = 0.012, k_leg = 0.025,
               k_arm = 0.030, k_torso = 0.025, k_belly = 0.030,
               k_headg = 0.030;
  model.blendshapes.assign(shape_dims,
                           std::vector<Vec3>(model.vertex_count(), Vec3::Zero()));
  for (int v = 0; v < model.vertex_count(); ++v) {
    const VertTag& tag = b.tags[v];
    const Vec3& p = model.template_vertices[v];
    bool foot = tag.part == Part::left_foot || tag.part == Part::right_foot;
    bool leg = tag.part == Part::left_leg || tag.part == Part::right_leg;
    bool arm = tag.part == Part::left_arm || tag.part == Part::right_arm ||
               tag.part == Part::left_hand || tag.part == Part::right_hand;
    bool left = p.x() > 0.0;
    auto set = [&](int dim, const Vec3& d) {
      if (dim < shape_dims) model.blendshapes[dim][v] = d;
    };
    set(0, {0.0, k_height * (foot ? -0.85 : p.y()), 0.0});
    if (tag.role == Role::band_chest)
      set(1, {k_chest * p.x(), 0.0, k_chest * p.z()});
    if (tag.role == Role::band_waist) {
      set(2, {k_waist * p.x(), 0.0, k_waist * p.z()});
      set(8, {0.0, 0.0, k_belly * p.z()});
    }
    if (tag.role == Role::band_hips)
      set(3, {k_hips * p.x(), 0.0, k_hips * p.z()});
    if (arm) {
      set(4, {left ? k_shoulder : -k_shoulder, 0.0, 0.0});
      bool hand = tag.part == Part::left_hand || tag.part == Part::right_hand;
      double reach = hand ? 0.52 : std::abs(p.x()) - 0.165;
      set(6, {(left ? 1.0 : -1.0) * k_arm * reach, 0.0, 0.0});
      set(7, {0.0, k_torso * 0.42, 0.0});
    }
    if (leg) set(5, {0.0, k_leg * (0.07 + p.y()), 0.0});
    if (foot) set(5, {0.0, k_leg * -0.78, 0.0});
    if (tag.part == Part::torso) set(7, {0.0, k_torso * p.y(), 0.0});
    if (tag.role == Role::head_ring)
      set(9, {k_headg * p.x(), 0.0, k_headg * p.z()});
  }

  model.validate();
  return model;
}

Mesh shape_mesh(const BodyModel& model, const ShapeParams& beta) {
  if (beta.dims() != model.shape_dims())
    fail_input("shape parameter count does not match model");
  Mesh mesh;
  mesh.vertices = model.template_vertices;
  mesh.faces = model.faces;
  for (int d = 0; d < model.shape_dims(); ++d) {
    double w = beta.beta[d];
    if (w == 0.0) continue;
    for (int v = 0; v < model.vertex_count(); ++v)
      mesh.vertices[v] += w * model.blendshapes[d][v];
  }
  return mesh;
}

JointSet regress_joints(const BodyModel& model, const Mesh& rest_mesh) {
  if (rest_mesh.vertex_count() != model.vertex_count())
    fail_input("mesh vertex count does not match model");
  JointSet joints;
  joints.positions.resize(model.joint_count(), Vec3::Zero());
  for (int k = 0; k < model.joint_count(); ++k) {
    Vec3 acc = Vec3::Zero();
    for (auto [idx, w] : model.joint_regressor[k].entries)
      acc += w * rest_mesh.vertices[idx];
    joints.positions[k] = acc;
  }
  return joints;
}

JointSet rest_joints(const BodyModel& model, const ShapeParams& beta) {
  return regress_joints(model, shape_mesh(model, beta));
}

KinematicTree shaped_tree(const BodyModel& model, const ShapeParams& beta) {
  JointSet joints = rest_joints(model, beta);
  KinematicTree tree = model.tree;
  for (int k = 0; k < tree.joint_count(); ++k) {
    if (tree.parent[k] == kRootParent) continue;
    tree.rest_offset[k] = joints.positions[k] - joints.positions[tree.parent[k]];
  }
  return tree;
}

Mesh skin(const BodyModel& model, const ShapeParams& beta, const Pose& pose) {
  KinematicTree tree = shaped_tree(model, beta);
  JointSet rest = rest_joints(model, beta);
  validate_pose(tree, pose);
  JointSet posed = forward_kinematics(tree, pose);
  std::vector<Mat3> glob = global_rotations(tree, pose);

  Mesh mesh = shape_mesh(model, beta);
  std::vector<Vec3> out(mesh.vertex_count(), Vec3::Zero());
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec3& x = mesh.vertices[v];
    Vec3 acc = Vec3::Zero();
    for (auto [k, w] : model.skin_weights[v].entries)
      acc += w * (glob[k] * (x - rest.positions[k]) + posed.positions[k]);
    out[v] = acc;
  }
  mesh.vertices = std::move(out);
  return mesh;
}

void export_obj(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_io("cannot open " + path + " for writing");
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(),
                  v.z());
    out << buf;
  }
  for (const auto& f : mesh.faces) {
    std::snprintf(buf, sizeof(buf), "f %d %d %d\n", f[0] + 1, f[1] + 1,
                  f[2] + 1);
    out << buf;
  }
  if (!out) fail_io("failed writing " + path);
}

Mesh import_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("cannot open " + path);
  Mesh mesh;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p.x() >> p.y() >> p.z()))
        fail_input(path + ":" + std::to_string(lineno) + ": malformed vertex");
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string word;
      while (ss >> word) {
        size_t slash = word.find('/');
        if (slash != std::string::npos) word = word.substr(0, slash);
        int i = 0;
        try {
          i = std::stoi(word);
        } catch (const std::exception&) {
          fail_input(path + ":" + std::to_string(lineno) + ": malformed face");
        }
        if (i < 0) i = static_cast<int>(mesh.vertices.size()) + i + 1;
        if (i < 1 || i > static_cast<int>(mesh.vertices.size()))
          fail_input(path + ":" + std::to_string(lineno) +
                     ": face index out of range");
        idx.push_back(i - 1);
      }
      if (idx.size() < 3)
        fail_input(path + ":" + std::to_string(lineno) + ": face needs 3 vertices");
      for (size_t i = 1; i + 1 < idx.size(); ++i)
        mesh.faces.emplace_back(idx[0], idx[i], idx[i + 1]);
    }
  }
  return mesh;
}

}  // namespace c2b
