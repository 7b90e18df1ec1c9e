#pragma once

#include <span>
#include <vector>

#include "authalic/common.hpp"

namespace authalic {

// Area of the 3D triangle (p, q, r); zero for collinear points.
double triangle_area(const Vec3& p, const Vec3& q, const Vec3& r);

// Split of the vertex set into boundary (in boundary-loop order) and interior
// (in increasing vertex index) vertices.
struct IndexPartition {
  std::vector<int> boundary;
  std::vector<int> interior;
  std::vector<int> slot;          // vertex -> position inside boundary or interior
  std::vector<char> on_boundary;  // vertex -> 1 if boundary

  int n_boundary() const { return static_cast<int>(boundary.size()); }
  int n_interior() const { return static_cast<int>(interior.size()); }
  int n_vertices() const { return static_cast<int>(slot.size()); }
  bool is_boundary(int v) const { return on_boundary[v] != 0; }
};

// Immutable, validated, simply connected open triangle mesh.
//
// Faces are consistently oriented on construction (flipped to agree with the
// first face when needed). The boundary loop starts at the smallest boundary
// vertex index and runs along the face orientation, so a map that preserves
// face orientation sends the loop to a counterclockwise polygon.
class TriMesh {
 public:
  // Empty mesh; build() is the only way to obtain a usable one.
  TriMesh() = default;

  // Validates and builds. Throws ValidationError on non-manifold edges or
  // vertices, disconnected input, closed surfaces ("no boundary"), several
  // boundary loops, nonzero genus, unreferenced vertices, or faces with area
  // below 1e-14 of the total.
  static TriMesh build(std::vector<Vec3> vertices, std::vector<Face> faces);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  std::span<const double> face_areas() const { return face_areas_; }
  double face_area(int f) const { return face_areas_[f]; }
  double total_area() const { return total_area_; }
  const std::vector<int>& boundary_loop() const { return partition_.boundary; }
  const IndexPartition& partition() const { return partition_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }

  // Number of input faces whose orientation was flipped during construction.
  int reoriented_faces() const { return reoriented_faces_; }

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<double> face_areas_;
  double total_area_ = 0.0;
  IndexPartition partition_;
  int reoriented_faces_ = 0;
};

struct ParameterizationReport {
  std::vector<int> all_boundary_faces;  // faces without an interior vertex
  std::vector<int> small_angle_faces;   // min angle below the tolerance
  double min_angle_tolerance = 0.0;     // radians

  bool clean() const { return all_boundary_faces.empty() && small_angle_faces.empty(); }
};

// Warnings only; never throws.
ParameterizationReport validate_for_parameterization(const TriMesh& mesh,
                                                     double min_angle_tolerance = 1e-3);

}  // namespace authalic
