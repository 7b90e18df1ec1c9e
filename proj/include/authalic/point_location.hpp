#pragma once

#include <span>
#include <vector>

#include "authalic/common.hpp"

namespace authalic {

struct Location {
  int face = -1;
  Vec3 weights = Vec3::Zero();  // barycentric, in the face's vertex order
  double distance = 0.0;        // 0 inside; distance to the nearest face otherwise
  bool inside = false;
};

// Barycentric coordinates of q in the planar triangle (a, b, c).
Vec3 barycentric(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& q);

// Point location in a fold-free planar triangulation through a uniform grid
// whose cell size is about the median edge length. Queries outside every face
// fall back to a scan for the nearest face and return the barycentric
// coordinates of the closest point on it.
class PlanarLocator {
 public:
  // Throws ValidationError for an empty triangulation.
  PlanarLocator(std::vector<Vec2> positions, std::vector<Face> faces);

  Location locate(const Vec2& q) const;

  // Exhaustive scan over all faces; the reference for locate().
  Location locate_brute_force(const Vec2& q) const;

  const std::vector<Vec2>& positions() const { return positions_; }
  const std::vector<Face>& faces() const { return faces_; }

 private:
  Location test_face(int f, const Vec2& q) const;
  Location nearest(const Vec2& q) const;

  std::vector<Vec2> positions_;
  std::vector<Face> faces_;
  Vec2 origin_ = Vec2::Zero();
  double cell_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<int> cell_start_;
  std::vector<int> cell_faces_;
};

}  // namespace authalic
