#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "authalic/disk_map.hpp"
#include "authalic/linalg.hpp"
#include "authalic/mesh.hpp"

namespace authalic {

// Weighted cotangent Laplacian of a simplicial map f,
//   L[i,j] = -sum_k cot(angle at f(v_k)) |f(ijk)| / (2 |ijk|),  L[i,i] = -sum_j L[i,j].
//
// Rows and columns are stored in partition order: interior vertices first
// (IndexPartition::interior order), then boundary vertices in loop order.
// The four blocks are kept alongside for the solvers.
struct StretchLaplacian {
  SparseMatrix matrix;
  SparseMatrix ii, ib, bi, bb;
  int n_interior = 0;
  int n_boundary = 0;
  double scale = 1.0;     // |S| / |f(S)| for the normalized variant
  int clamped_faces = 0;  // faces whose cotangent or image area was clamped

  // |S|/|f(S)| * L.
  SparseMatrix normalized() const { return scale * matrix; }

  // Entry by original vertex ids.
  double entry(const IndexPartition& partition, int vi, int vj) const;
};

// Circulant skew operator D with (D x)_i = x_{i+1} - x_{i-1} (cyclic), so
// that the boundary polygon area is x^T D y / 2. Applied matrix-free.
struct BoundaryAreaOperator {
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double bilinear(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) const;
};

// L_S(f) for the planar image positions of every vertex.
StretchLaplacian assemble_stretch_laplacian(const TriMesh& mesh, std::span<const Vec2> image);
StretchLaplacian assemble_stretch_laplacian(const TriMesh& mesh, const DiskMap& map);

// L_S(id): cotangent weights of the surface itself (image = the 3D mesh).
StretchLaplacian identity_laplacian(const TriMesh& mesh);

// sum over faces of |f(t)|^2 / |t|.
double stretch_energy(const TriMesh& mesh, std::span<const Vec2> image);
double stretch_energy(const TriMesh& mesh, const DiskMap& map);

// (x^T L x + y^T L y) / 2 with x, y the image coordinates of all vertices.
double stretch_energy_quadratic(const StretchLaplacian& laplacian, const IndexPartition& partition,
                                std::span<const Vec2> image);

// Area of the polygon inscribed in the unit circle at the given angles:
// sum_i sin(theta_{i+1} - theta_i) / 2, cyclic.
double image_area_polar(const Eigen::Ref<const Eigen::VectorXd>& theta);

// d/dtheta of image_area_polar: -(diag(x) D x + diag(y) D y) / 2 with
// x = cos(theta), y = sin(theta).
Eigen::VectorXd polar_area_gradient(const Eigen::Ref<const Eigen::VectorXd>& theta);

// Signed shoelace area of an arbitrary closed polygon.
double shoelace_area(std::span<const Vec2> polygon);

// (|S| / A(f)) E_S(f) - A(f), with A the polar image area. Throws
// NumericError("degenerate or inverted boundary polygon") when A(f) <= 0.
double normalized_authalic_energy(const TriMesh& mesh, const DiskMap& map);

// Same value, but returns nullopt instead of throwing (line searches probe
// arbitrary points).
std::optional<double> try_normalized_authalic_energy(const TriMesh& mesh, const DiskMap& map);

// Normalized authalic energy of raw planar positions (boundary vertices not
// constrained to the circle); the image area is the shoelace area of the
// boundary polygon. Used to check the scaling law.
double normalized_authalic_energy_raw(const TriMesh& mesh, std::span<const Vec2> image);

struct AuthalicEvaluation {
  double energy = 0.0;       // normalized authalic energy
  double stretch = 0.0;      // E_S
  double image_area = 0.0;   // A(f)
  Eigen::VectorXd gradient;  // packed like DiskMap
  StretchLaplacian laplacian;
};

// Energy, gradient and the Laplacian they were built from, in one pass.
// The gradient is
//   d/du_I = (2|S|/A) (L_II u_I + L_IB x_B)            (same for v)
//   d/dtheta = (2|S|/A) (x_B o (L_BI v_I + L_BB y_B) - y_B o (L_BI u_I + L_BB x_B))
//            + (1/2 + |S| E_S / (2 A^2)) (x_B o D x_B + y_B o D y_B)
// with L = L_S(f) at the current map.
AuthalicEvaluation evaluate_authalic(const TriMesh& mesh, const DiskMap& map);

Eigen::VectorXd grad_authalic(const TriMesh& mesh, const DiskMap& map);

// Gradient from an already assembled Laplacian of the same map.
Eigen::VectorXd grad_authalic(const TriMesh& mesh, const DiskMap& map, const StretchLaplacian& laplacian,
                              double stretch, double image_area);

}  // namespace authalic
