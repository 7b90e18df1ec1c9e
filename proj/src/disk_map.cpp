#include "authalic/disk_map.hpp"

#include <cmath>
#include <numbers>

namespace authalic {

DiskMap::DiskMap(int n_interior, int n_boundary)
    : n_interior_(n_interior), n_boundary_(n_boundary), packed_(Eigen::VectorXd::Zero(2 * n_interior + n_boundary)) {}

DiskMap::DiskMap(int n_interior, int n_boundary, Eigen::VectorXd packed)
    : n_interior_(n_interior), n_boundary_(n_boundary), packed_(std::move(packed)) {
  if (packed_.size() != 2 * n_interior + n_boundary) {
    throw ValidationError("packed disk map has wrong length");
  }
}

DiskMap DiskMap::from_positions(const IndexPartition& partition, std::span<const Vec2> positions) {
  if (static_cast<int>(positions.size()) != partition.n_vertices()) {
    throw ValidationError("position count does not match the mesh");
  }
  DiskMap map(partition.n_interior(), partition.n_boundary());
  for (int i = 0; i < partition.n_interior(); ++i) {
    const Vec2& p = positions[partition.interior[i]];
    map.packed_[i] = p.x();
    map.packed_[map.n_interior_ + i] = p.y();
  }
  for (int i = 0; i < partition.n_boundary(); ++i) {
    const Vec2& p = positions[partition.boundary[i]];
    map.packed_[2 * map.n_interior_ + i] = std::atan2(p.y(), p.x());
  }
  return map;
}

Vec2 DiskMap::boundary_point(int i) const {
  const double t = packed_[2 * n_interior_ + i];
  return {std::cos(t), std::sin(t)};
}

void DiskMap::vertex_positions(const IndexPartition& partition, std::vector<Vec2>& out) const {
  out.resize(partition.n_vertices());
  for (int i = 0; i < n_interior_; ++i) out[partition.interior[i]] = interior_point(i);
  for (int i = 0; i < n_boundary_; ++i) out[partition.boundary[i]] = boundary_point(i);
}

std::vector<Vec2> DiskMap::vertex_positions(const IndexPartition& partition) const {
  std::vector<Vec2> out;
  vertex_positions(partition, out);
  return out;
}

bool boundary_order_preserved(const Eigen::Ref<const Eigen::VectorXd>& theta) {
  const Eigen::Index n = theta.size();
  if (n < 3) return false;
  constexpr double two_pi = 2 * std::numbers::pi;
  double winding = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = std::fmod(theta[(i + 1) % n] - theta[i], two_pi);
    if (d < 0) d += two_pi;
    if (d <= 0.0) return false;
    winding += d;
  }
  return std::abs(winding - two_pi) < 1e-9;
}

}  // namespace authalic
