#include "authalic/energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "authalic/parallel.hpp"

namespace authalic {

namespace {

constexpr double kCotClamp = 1e8;
constexpr double kMinImageArea = 1e-14;
constexpr std::size_t kFaceChunk = 2048;

// Planar or spatial twice-area of the triangle spanned by edge vectors a, b.
double cross_norm(const Vec2& a, const Vec2& b) { return std::abs(cross2(a, b)); }
double cross_norm(const Vec3& a, const Vec3& b) { return a.cross(b).norm(); }

struct FaceWeights {
  // Weight of the edge opposite corner k, i.e. edge (k+1, k+2).
  std::array<double, 3> w;
  bool clamped;
};

template <typename P>
FaceWeights face_weights(const P& p0, const P& p1, const P& p2, double source_area) {
  const std::array<const P*, 3> p = {&p0, &p1, &p2};
  FaceWeights out{{0.0, 0.0, 0.0}, false};
  double image_area = 0.5 * cross_norm(P(p1 - p0), P(p2 - p0));
  if (!(image_area >= kMinImageArea)) {
    image_area = kMinImageArea;
    out.clamped = true;
  }
  for (int k = 0; k < 3; ++k) {
    const P a = *p[(k + 1) % 3] - *p[k];
    const P b = *p[(k + 2) % 3] - *p[k];
    const double twice = std::max(cross_norm(a, b), 2.0 * kMinImageArea);
    double cot = a.dot(b) / twice;
    if (cot > kCotClamp || cot < -kCotClamp) {
      cot = std::clamp(cot, -kCotClamp, kCotClamp);
      out.clamped = true;
    }
    out.w[k] = cot * image_area / (2.0 * source_area);
  }
  return out;
}

template <typename P>
StretchLaplacian assemble(const TriMesh& mesh, std::span<const P> image, double area_scale) {
  const IndexPartition& part = mesh.partition();
  const int n = part.n_vertices();
  if (static_cast<int>(image.size()) != n) throw ValidationError("image size does not match the mesh");
  const int ni = part.n_interior();
  const int nb = part.n_boundary();
  const auto& faces = mesh.faces();
  const std::size_t m = faces.size();

  std::vector<FaceWeights> weights(m);
  parallel_chunks(m, kFaceChunk, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f) {
      const Face& t = faces[f];
      weights[f] = face_weights(image[t[0]], image[t[1]], image[t[2]], area_scale * mesh.face_area(f));
    }
  });

  auto index = [&](int v) { return part.is_boundary(v) ? ni + part.slot[v] : part.slot[v]; };

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> full;
  full.reserve(6 * m + n);
  std::vector<double> diag(n, 0.0);
  StretchLaplacian out;
  out.n_interior = ni;
  out.n_boundary = nb;
  for (std::size_t f = 0; f < m; ++f) {
    const Face& t = faces[f];
    if (weights[f].clamped) ++out.clamped_faces;
    for (int k = 0; k < 3; ++k) {
      const int i = index(t[(k + 1) % 3]);
      const int j = index(t[(k + 2) % 3]);
      const double w = weights[f].w[k];
      full.emplace_back(i, j, -w);
      full.emplace_back(j, i, -w);
      diag[i] += w;
      diag[j] += w;
    }
  }
  for (int i = 0; i < n; ++i) full.emplace_back(i, i, diag[i]);

  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(full.begin(), full.end());
  out.matrix.makeCompressed();
  out.ii = out.matrix.block(0, 0, ni, ni);
  out.ib = out.matrix.block(0, ni, ni, nb);
  out.bi = out.matrix.block(ni, 0, nb, ni);
  out.bb = out.matrix.block(ni, ni, nb, nb);
  return out;
}

// Image coordinates of all vertices, reordered to partition order.
void partition_coordinates(const IndexPartition& part, std::span<const Vec2> image, Eigen::VectorXd& x,
                           Eigen::VectorXd& y) {
  const int ni = part.n_interior();
  const int n = part.n_vertices();
  x.resize(n);
  y.resize(n);
  for (int i = 0; i < ni; ++i) {
    x[i] = image[part.interior[i]].x();
    y[i] = image[part.interior[i]].y();
  }
  for (int i = 0; i < part.n_boundary(); ++i) {
    x[ni + i] = image[part.boundary[i]].x();
    y[ni + i] = image[part.boundary[i]].y();
  }
}

}  // namespace

double StretchLaplacian::entry(const IndexPartition& partition, int vi, int vj) const {
  auto index = [&](int v) { return partition.is_boundary(v) ? n_interior + partition.slot[v] : partition.slot[v]; };
  return matrix.coeff(index(vi), index(vj));
}

Eigen::VectorXd BoundaryAreaOperator::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::Index n = x.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = x[(i + 1) % n] - x[(i + n - 1) % n];
  return out;
}

double BoundaryAreaOperator::bilinear(const Eigen::Ref<const Eigen::VectorXd>& x,
                                      const Eigen::Ref<const Eigen::VectorXd>& y) const {
  return x.dot(apply(y));
}

StretchLaplacian assemble_stretch_laplacian(const TriMesh& mesh, std::span<const Vec2> image) {
  StretchLaplacian l = assemble<Vec2>(mesh, image, 1.0);
  double image_area = 0.0;
  for (const Face& t : mesh.faces()) image_area += 0.5 * std::abs(signed_area2(image[t[0]], image[t[1]], image[t[2]]));
  l.scale = image_area > 0.0 ? mesh.total_area() / image_area : 1.0;
  return l;
}

StretchLaplacian assemble_stretch_laplacian(const TriMesh& mesh, const DiskMap& map) {
  const auto image = map.vertex_positions(mesh.partition());
  StretchLaplacian l = assemble<Vec2>(mesh, image, 1.0);
  const double area = image_area_polar(map.theta());
  l.scale = area > 0.0 ? mesh.total_area() / area : 1.0;
  return l;
}

StretchLaplacian identity_laplacian(const TriMesh& mesh) {
  return assemble<Vec3>(mesh, std::span<const Vec3>(mesh.vertices()), 1.0);
}

double stretch_energy(const TriMesh& mesh, std::span<const Vec2> image) {
  const auto& faces = mesh.faces();
  return parallel_sum(faces.size(), [&](std::size_t f) {
    const Face& t = faces[f];
    const double a = 0.5 * signed_area2(image[t[0]], image[t[1]], image[t[2]]);
    return a * a / mesh.face_area(f);
  });
}

double stretch_energy(const TriMesh& mesh, const DiskMap& map) {
  return stretch_energy(mesh, map.vertex_positions(mesh.partition()));
}

double stretch_energy_quadratic(const StretchLaplacian& laplacian, const IndexPartition& partition,
                                std::span<const Vec2> image) {
  Eigen::VectorXd x, y;
  partition_coordinates(partition, image, x, y);
  return 0.5 * (x.dot(laplacian.matrix * x) + y.dot(laplacian.matrix * y));
}

double image_area_polar(const Eigen::Ref<const Eigen::VectorXd>& theta) {
  const Eigen::Index n = theta.size();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) sum += std::sin(theta[(i + 1) % n] - theta[i]);
  return 0.5 * sum;
}

Eigen::VectorXd polar_area_gradient(const Eigen::Ref<const Eigen::VectorXd>& theta) {
  const Eigen::VectorXd x = theta.array().cos();
  const Eigen::VectorXd y = theta.array().sin();
  const BoundaryAreaOperator d;
  return -0.5 * (x.cwiseProduct(d.apply(x)) + y.cwiseProduct(d.apply(y)));
}

double shoelace_area(std::span<const Vec2> polygon) {
  const std::size_t n = polygon.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += cross2(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * sum;
}

std::optional<double> try_normalized_authalic_energy(const TriMesh& mesh, const DiskMap& map) {
  const double area = image_area_polar(map.theta());
  if (!(area > 0.0) || !map.packed().allFinite()) return std::nullopt;
  return mesh.total_area() / area * stretch_energy(mesh, map) - area;
}

double normalized_authalic_energy(const TriMesh& mesh, const DiskMap& map) {
  const double area = image_area_polar(map.theta());
  if (!(area > 0.0)) throw NumericError("degenerate or inverted boundary polygon");
  return mesh.total_area() / area * stretch_energy(mesh, map) - area;
}

double normalized_authalic_energy_raw(const TriMesh& mesh, std::span<const Vec2> image) {
  const auto& loop = mesh.boundary_loop();
  std::vector<Vec2> polygon(loop.size());
  for (std::size_t i = 0; i < loop.size(); ++i) polygon[i] = image[loop[i]];
  const double area = shoelace_area(polygon);
  if (!(area > 0.0)) throw NumericError("degenerate or inverted boundary polygon");
  return mesh.total_area() / area * stretch_energy(mesh, image) - area;
}

Eigen::VectorXd grad_authalic(const TriMesh& mesh, const DiskMap& map, const StretchLaplacian& l, double stretch,
                              double image_area) {
  const int ni = map.n_interior();
  const int nb = map.n_boundary();
  const double s = mesh.total_area();
  const double c = 2.0 * s / image_area;
  const Eigen::VectorXd x = map.theta().array().cos();
  const Eigen::VectorXd y = map.theta().array().sin();
  const Eigen::VectorXd u = map.u();
  const Eigen::VectorXd v = map.v();

  Eigen::VectorXd g(map.size());
  g.segment(0, ni) = c * (l.ii * u + l.ib * x);
  g.segment(ni, ni) = c * (l.ii * v + l.ib * y);
  const Eigen::VectorXd lx = l.bi * u + l.bb * x;
  const Eigen::VectorXd ly = l.bi * v + l.bb * y;
  const BoundaryAreaOperator d;
  const double area_coeff = 0.5 + s * stretch / (2.0 * image_area * image_area);
  g.segment(2 * ni, nb) = c * (x.cwiseProduct(ly) - y.cwiseProduct(lx)) +
                          area_coeff * (x.cwiseProduct(d.apply(x)) + y.cwiseProduct(d.apply(y)));
  return g;
}

AuthalicEvaluation evaluate_authalic(const TriMesh& mesh, const DiskMap& map) {
  AuthalicEvaluation e;
  e.image_area = image_area_polar(map.theta());
  if (!(e.image_area > 0.0)) throw NumericError("degenerate or inverted boundary polygon");
  const auto image = map.vertex_positions(mesh.partition());
  e.stretch = stretch_energy(mesh, image);
  e.energy = mesh.total_area() / e.image_area * e.stretch - e.image_area;
  e.laplacian = assemble<Vec2>(mesh, std::span<const Vec2>(image), 1.0);
  e.laplacian.scale = mesh.total_area() / e.image_area;
  e.gradient = grad_authalic(mesh, map, e.laplacian, e.stretch, e.image_area);
  return e;
}

Eigen::VectorXd grad_authalic(const TriMesh& mesh, const DiskMap& map) { return evaluate_authalic(mesh, map).gradient; }

}  // namespace authalic
