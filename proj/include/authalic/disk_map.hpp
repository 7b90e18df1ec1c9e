#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "authalic/common.hpp"
#include "authalic/mesh.hpp"

namespace authalic {

// Simplicial map onto the unit disk in packed form
//   (u_I, v_I, theta)  of length 2 n_I + n_B,
// where interior vertices carry free planar coordinates and boundary vertex
// i (in boundary-loop order) sits at (cos theta_i, sin theta_i).
class DiskMap {
 public:
  DiskMap() = default;
  DiskMap(int n_interior, int n_boundary);
  DiskMap(int n_interior, int n_boundary, Eigen::VectorXd packed);

  // Interior coordinates are copied; boundary angles come from atan2 of the
  // boundary positions (their radius is discarded).
  static DiskMap from_positions(const IndexPartition& partition, std::span<const Vec2> positions);

  int n_interior() const { return n_interior_; }
  int n_boundary() const { return n_boundary_; }
  int size() const { return static_cast<int>(packed_.size()); }

  const Eigen::VectorXd& packed() const { return packed_; }
  Eigen::VectorXd& packed() { return packed_; }

  auto u() { return packed_.segment(0, n_interior_); }
  auto v() { return packed_.segment(n_interior_, n_interior_); }
  auto theta() { return packed_.segment(2 * n_interior_, n_boundary_); }
  auto u() const { return packed_.segment(0, n_interior_); }
  auto v() const { return packed_.segment(n_interior_, n_interior_); }
  auto theta() const { return packed_.segment(2 * n_interior_, n_boundary_); }

  Vec2 interior_point(int i) const { return {packed_[i], packed_[n_interior_ + i]}; }
  Vec2 boundary_point(int i) const;

  // Image of every mesh vertex, indexed by vertex id.
  std::vector<Vec2> vertex_positions(const IndexPartition& partition) const;
  void vertex_positions(const IndexPartition& partition, std::vector<Vec2>& out) const;

 private:
  int n_interior_ = 0;
  int n_boundary_ = 0;
  Eigen::VectorXd packed_;
};

// Cyclic order check for boundary angles: every wrapped increment is
// positive and the increments wind exactly once around the circle.
bool boundary_order_preserved(const Eigen::Ref<const Eigen::VectorXd>& theta);

}  // namespace authalic
