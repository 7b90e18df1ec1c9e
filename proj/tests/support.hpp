#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "authalic/disk_map.hpp"
#include "authalic/generators.hpp"
#include "authalic/mesh.hpp"
#include "authalic/sem.hpp"

namespace authalic::testing {

inline TriMesh unit_triangle() {
  return TriMesh::build({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
}

inline TriMesh unit_square() {
  return TriMesh::build({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}});
}

// Planar mesh with a single interior vertex at the origin surrounded by k
// rim vertices on the unit circle.
inline TriMesh wheel(int k) {
  std::vector<Vec3> v{{0, 0, 0}};
  std::vector<Face> f;
  for (int i = 0; i < k; ++i) {
    const double t = 2.0 * M_PI * i / k;
    v.push_back({std::cos(t), std::sin(t), 0});
    f.push_back({0, 1 + i, 1 + (i + 1) % k});
  }
  return TriMesh::build(std::move(v), std::move(f));
}

inline std::vector<Vec2> xy(const TriMesh& mesh) {
  std::vector<Vec2> out;
  out.reserve(mesh.vertices().size());
  for (const Vec3& p : mesh.vertices()) out.emplace_back(p.x(), p.y());
  return out;
}

// For planar meshes whose boundary lies on the unit circle.
inline DiskMap identity_map(const TriMesh& mesh) { return DiskMap::from_positions(mesh.partition(), xy(mesh)); }

inline DiskMap rotated(const DiskMap& map, double angle) {
  DiskMap out = map;
  const double c = std::cos(angle), s = std::sin(angle);
  for (int i = 0; i < map.n_interior(); ++i) {
    const Vec2 p = map.interior_point(i);
    out.u()[i] = c * p.x() - s * p.y();
    out.v()[i] = s * p.x() + c * p.y();
  }
  out.theta().array() += angle;
  return out;
}

// Interior jitter of the given size plus an order-preserving shift of every
// boundary angle by at most `angle_jitter` of its smaller neighbouring gap.
inline DiskMap perturbed(const DiskMap& base, std::mt19937_64& rng, double jitter, double angle_jitter = 0.0) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  DiskMap out = base;
  for (int i = 0; i < 2 * base.n_interior(); ++i) out.packed()[i] += jitter * unit(rng);
  const int nb = base.n_boundary();
  const Eigen::VectorXd theta = base.theta();
  for (int i = 0; i < nb; ++i) {
    const double prev = theta[i] - theta[(i + nb - 1) % nb];
    const double next = theta[(i + 1) % nb] - theta[i];
    auto wrap = [](double d) { return std::remainder(d, 2.0 * M_PI); };
    const double gap = std::min(std::abs(wrap(prev)), std::abs(wrap(next)));
    out.theta()[i] += angle_jitter * gap * unit(rng);
  }
  return out;
}

inline double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace authalic::testing
