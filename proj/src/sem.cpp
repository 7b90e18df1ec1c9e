#include "authalic/sem.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "authalic/linalg.hpp"

namespace authalic {

namespace {

constexpr double kStagnation = 1e-12;

SemRecord make_record(const TriMesh& mesh, const DiskMap& map, int iteration) {
  SemRecord r;
  r.iteration = iteration;
  r.stretch = stretch_energy(mesh, map);
  r.image_area = image_area_polar(map.theta());
  r.authalic = r.image_area > 0.0 ? mesh.total_area() / r.image_area * r.stretch - r.image_area
                                  : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace

Eigen::VectorXd arclength_boundary(const TriMesh& mesh) {
  const auto& loop = mesh.boundary_loop();
  const auto& v = mesh.vertices();
  const std::size_t nb = loop.size();
  if (nb == 0) throw ValidationError("mesh has no boundary");
  Eigen::VectorXd length(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    length[i] = (v[loop[(i + 1) % nb]] - v[loop[i]]).norm();
    if (!(length[i] > 0.0)) throw ValidationError("zero-length boundary edge at loop position " + std::to_string(i));
  }
  const double total = length.sum();
  Eigen::VectorXd theta(nb);
  double acc = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    theta[i] = 2.0 * std::numbers::pi * acc / total;
    acc += length[i];
  }
  return theta;
}

DiskMap sem_interior_step(const TriMesh&, const DiskMap& map, const StretchLaplacian& l) {
  const CholeskyFactor factor = CholeskyFactor::factorize(l.ii);
  const Eigen::VectorXd x = map.theta().array().cos();
  const Eigen::VectorXd y = map.theta().array().sin();
  DiskMap out = map;
  out.u() = factor.solve(-(l.ib * x));
  out.v() = factor.solve(-(l.ib * y));
  return out;
}

DiskMap sem_interior_step(const TriMesh& mesh, const DiskMap& map) {
  return sem_interior_step(mesh, map, assemble_stretch_laplacian(mesh, map));
}

Eigen::MatrixX2d centralize_normalize(const Eigen::MatrixX2d& rows) {
  Eigen::MatrixX2d c = rows.rowwise() - rows.colwise().mean();
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    const double norm = c.row(i).norm();
    if (!(norm > 0.0)) throw NumericError("zero-norm boundary row in normalization");
    c.row(i) /= -norm;
  }
  return c;
}

BoundaryStep sem_boundary_step(const TriMesh&, const DiskMap& map, const StretchLaplacian& l) {
  const int ni = map.n_interior();
  Eigen::MatrixX2d inverted(ni, 2);
  for (int i = 0; i < ni; ++i) {
    const Vec2 p = map.interior_point(i);
    const double r2 = p.squaredNorm();
    if (!(r2 > 0.0)) throw NumericError("interior vertex at the origin cannot be inverted");
    inverted.row(i) = p.transpose() / r2;
  }
  const CholeskyFactor factor = CholeskyFactor::factorize(l.bb);
  Eigen::MatrixX2d w(map.n_boundary(), 2);
  w.col(0) = factor.solve(l.bi * inverted.col(0));
  w.col(1) = factor.solve(l.bi * inverted.col(1));

  BoundaryStep step;
  step.positions = centralize_normalize(w);
  step.theta.resize(step.positions.rows());
  for (Eigen::Index i = 0; i < step.positions.rows(); ++i) {
    step.theta[i] = std::atan2(step.positions(i, 1), step.positions(i, 0));
  }
  return step;
}

SemResult sem_run(const TriMesh& mesh, int iterations, bool update_boundary) {
  if (iterations < 1) throw ValidationError("iterations must be at least 1");
  const IndexPartition& part = mesh.partition();
  SemResult result;
  result.map = DiskMap(part.n_interior(), part.n_boundary());
  result.map.theta() = arclength_boundary(mesh);
  StretchLaplacian l = identity_laplacian(mesh);

  for (int k = 1; k <= iterations; ++k) {
    DiskMap next = sem_interior_step(mesh, result.map, l);
    if (update_boundary) next.theta() = sem_boundary_step(mesh, next, l).theta;
    const double change = (next.packed() - result.map.packed()).lpNorm<Eigen::Infinity>();
    result.map = std::move(next);
    result.trace.push_back(make_record(mesh, result.map, k));
    result.iterations_run = k;
    if (change < kStagnation) {
      for (int pad = k + 1; pad <= iterations; ++pad) {
        SemRecord r = result.trace.back();
        r.iteration = pad;
        result.trace.push_back(r);
      }
      break;
    }
    if (k < iterations) l = assemble_stretch_laplacian(mesh, result.map);
  }
  return result;
}

DiskMap sem_initial_map(const TriMesh& mesh, int iterations) { return sem_run(mesh, iterations, false).map; }

}  // namespace authalic
