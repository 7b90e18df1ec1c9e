#pragma once

#include <vector>

#include <Eigen/Core>

#include "authalic/disk_map.hpp"
#include "authalic/energy.hpp"
#include "authalic/mesh.hpp"

namespace authalic {

// Boundary angles proportional to cumulative 3D edge length along the loop,
// starting at 0. Throws ValidationError on a zero-length boundary edge.
Eigen::VectorXd arclength_boundary(const TriMesh& mesh);

// Interior coordinates -L_II^{-1} L_IB f_B for the boundary of `map`, with
// L = L_S(map) or a given Laplacian.
DiskMap sem_interior_step(const TriMesh& mesh, const DiskMap& map);
DiskMap sem_interior_step(const TriMesh& mesh, const DiskMap& map, const StretchLaplacian& laplacian);

// Row-wise -N C applied to an n_B x 2 block: subtract the column means, then
// scale every row to unit length and flip it. Throws NumericError on a zero row.
Eigen::MatrixX2d centralize_normalize(const Eigen::MatrixX2d& rows);

struct BoundaryStep {
  Eigen::VectorXd theta;      // atan2 of the rows, no reordering
  Eigen::MatrixX2d positions;  // unit rows before angle extraction
};

// Boundary update -N C L_BB^{-1} L_BI R f_I, where R inverts every interior
// point in the unit circle.
BoundaryStep sem_boundary_step(const TriMesh& mesh, const DiskMap& map, const StretchLaplacian& laplacian);

struct SemRecord {
  int iteration = 0;
  double stretch = 0.0;
  double authalic = 0.0;  // NaN when the boundary polygon is not positively oriented
  double image_area = 0.0;
};

struct SemResult {
  DiskMap map;
  std::vector<SemRecord> trace;  // one record per requested iteration
  int iterations_run = 0;        // fewer than requested after stagnation
};

// Fixed-point stretch-energy iteration from L_S(id) and the arc-length
// boundary. With update_boundary = false the boundary stays fixed (this is the
// initializer of the conjugate-gradient solver, usually with 5 iterations).
SemResult sem_run(const TriMesh& mesh, int iterations, bool update_boundary);

// Arc-length boundary, interior from `iterations` fixed-boundary steps.
DiskMap sem_initial_map(const TriMesh& mesh, int iterations = 5);

}  // namespace authalic
