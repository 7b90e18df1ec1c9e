#include "authalic/point_location.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace authalic {

namespace {

constexpr double kInsideTol = 1e-12;

// Closest point to q on segment [a, b], as the parameter t in [0, 1].
double segment_parameter(const Vec2& a, const Vec2& b, const Vec2& q) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return 0.0;
  return std::clamp((q - a).dot(d) / len2, 0.0, 1.0);
}

}  // namespace

Vec3 barycentric(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& q) {
  const double total = signed_area2(a, b, c);
  const double wa = signed_area2(q, b, c) / total;
  const double wb = signed_area2(a, q, c) / total;
  return {wa, wb, 1.0 - wa - wb};
}

PlanarLocator::PlanarLocator(std::vector<Vec2> positions, std::vector<Face> faces)
    : positions_(std::move(positions)), faces_(std::move(faces)) {
  if (faces_.empty() || positions_.empty()) throw ValidationError("point location on an empty triangulation");

  Vec2 lo = positions_[0];
  Vec2 hi = positions_[0];
  for (const Vec2& p : positions_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  std::vector<double> lengths;
  lengths.reserve(faces_.size() * 3);
  for (const Face& t : faces_) {
    for (int k = 0; k < 3; ++k) lengths.push_back((positions_[t[k]] - positions_[t[(k + 1) % 3]]).norm());
  }
  std::nth_element(lengths.begin(), lengths.begin() + lengths.size() / 2, lengths.end());
  const double extent = std::max((hi - lo).maxCoeff(), 1e-300);
  // Cap on the number of cells keeps memory linear in the face count.
  const double min_cell = extent / std::sqrt(4.0 * static_cast<double>(faces_.size()) + 1.0);
  cell_ = std::max(lengths[lengths.size() / 2], min_cell);
  origin_ = lo;
  nx_ = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / cell_)) + 1);
  ny_ = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / cell_)) + 1);

  auto cell_range = [&](const Face& t, int& x0, int& x1, int& y0, int& y1) {
    Vec2 a = positions_[t[0]].cwiseMin(positions_[t[1]]).cwiseMin(positions_[t[2]]);
    Vec2 b = positions_[t[0]].cwiseMax(positions_[t[1]]).cwiseMax(positions_[t[2]]);
    x0 = std::clamp(static_cast<int>(std::floor((a.x() - origin_.x()) / cell_)), 0, nx_ - 1);
    x1 = std::clamp(static_cast<int>(std::floor((b.x() - origin_.x()) / cell_)), 0, nx_ - 1);
    y0 = std::clamp(static_cast<int>(std::floor((a.y() - origin_.y()) / cell_)), 0, ny_ - 1);
    y1 = std::clamp(static_cast<int>(std::floor((b.y() - origin_.y()) / cell_)), 0, ny_ - 1);
  };
  std::vector<int> count(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  for (const Face& t : faces_) {
    int x0, x1, y0, y1;
    cell_range(t, x0, x1, y0, y1);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) ++count[static_cast<std::size_t>(y) * nx_ + x + 1];
  }
  for (std::size_t i = 1; i < count.size(); ++i) count[i] += count[i - 1];
  cell_start_ = count;
  cell_faces_.resize(count.back());
  for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
    int x0, x1, y0, y1;
    cell_range(faces_[f], x0, x1, y0, y1);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) cell_faces_[count[static_cast<std::size_t>(y) * nx_ + x]++] = f;
  }
}

Location PlanarLocator::test_face(int f, const Vec2& q) const {
  const Face& t = faces_[f];
  Location loc;
  loc.face = f;
  loc.weights = barycentric(positions_[t[0]], positions_[t[1]], positions_[t[2]], q);
  loc.inside = loc.weights.minCoeff() >= -kInsideTol;
  return loc;
}

Location PlanarLocator::nearest(const Vec2& q) const {
  Location best;
  best.distance = std::numeric_limits<double>::infinity();
  for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
    const Location loc = test_face(f, q);
    if (loc.inside) return loc;
    const Face& t = faces_[f];
    for (int k = 0; k < 3; ++k) {
      const Vec2& a = positions_[t[k]];
      const Vec2& b = positions_[t[(k + 1) % 3]];
      const double s = segment_parameter(a, b, q);
      const double d = (a + s * (b - a) - q).norm();
      if (d < best.distance) {
        best.face = f;
        best.distance = d;
        best.inside = false;
        best.weights = Vec3::Zero();
        best.weights[k] = 1.0 - s;
        best.weights[(k + 1) % 3] = s;
      }
    }
  }
  return best;
}

Location PlanarLocator::locate_brute_force(const Vec2& q) const {
  Location best;
  for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
    const Location loc = test_face(f, q);
    if (loc.inside && (best.face < 0 || loc.weights.minCoeff() > best.weights.minCoeff())) best = loc;
  }
  return best.face >= 0 ? best : nearest(q);
}

Location PlanarLocator::locate(const Vec2& q) const {
  const double fx = (q.x() - origin_.x()) / cell_;
  const double fy = (q.y() - origin_.y()) / cell_;
  if (fx >= 0.0 && fy >= 0.0 && fx < nx_ && fy < ny_) {
    const std::size_t cell = static_cast<std::size_t>(fy) * nx_ + static_cast<std::size_t>(fx);
    Location best;
    for (int i = cell_start_[cell]; i < cell_start_[cell + 1]; ++i) {
      const Location loc = test_face(cell_faces_[i], q);
      if (loc.inside && (best.face < 0 || loc.weights.minCoeff() > best.weights.minCoeff())) best = loc;
    }
    if (best.face >= 0) return best;
  }
  return locate_brute_force(q);
}

}  // namespace authalic
