#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "authalic/energy.hpp"
#include "authalic/generators.hpp"
#include "authalic/linalg.hpp"
#include "authalic/sem.hpp"
#include "support.hpp"

using namespace authalic;
using namespace authalic::testing;

namespace {

// Boundary loop of `n` vertices with the given 3D edge lengths along the x
// axis and a fan to an apex, so the loop is the polygon itself.
TriMesh polygon_fan(const std::vector<Vec3>& loop) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : loop) c += p;
  c /= static_cast<double>(loop.size());
  c.z() = 0.5;
  std::vector<Vec3> v{c};
  v.insert(v.end(), loop.begin(), loop.end());
  std::vector<Face> f;
  const int n = static_cast<int>(loop.size());
  for (int i = 0; i < n; ++i) f.push_back({0, 1 + i, 1 + (i + 1) % n});
  return TriMesh::build(v, f);
}

}  // namespace

TEST_CASE("arc-length boundary") {
  const Eigen::VectorXd sq = arclength_boundary(polygon_fan({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}));
  REQUIRE(sq.size() == 4);
  CHECK(sq[0] == 0.0);
  CHECK(sq[1] == doctest::Approx(M_PI / 2));
  CHECK(sq[2] == doctest::Approx(M_PI));
  CHECK(sq[3] == doctest::Approx(3 * M_PI / 2));

  const TriMesh tri = polygon_fan({{0, 0, 0}, {1, 0, 0}, {1, 0, 1}});
  const Eigen::VectorXd t = arclength_boundary(tri);
  const auto& loop = tri.boundary_loop();
  double total = 0.0;
  std::vector<double> len;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    len.push_back((tri.vertices()[loop[(i + 1) % loop.size()]] - tri.vertices()[loop[i]]).norm());
    total += len.back();
  }
  for (std::size_t i = 1; i < loop.size(); ++i) CHECK(t[i] - t[i - 1] == doctest::Approx(2 * M_PI * len[i - 1] / total));
  CHECK(t[0] + 2 * M_PI - t[loop.size() - 1] == doctest::Approx(2 * M_PI * len.back() / total));
}

TEST_CASE("arc-length angles for edge lengths 1, 1, 2") {
  // Flat fan whose rim is a 4-gon with one vertex at the midpoint of the long side.
  const TriMesh m = polygon_fan({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {1, 1.7320508075688772, 0}});
  const Eigen::VectorXd t = arclength_boundary(m);
  // Loop lengths 1, 1, 2, 2 after the split; check proportionality directly.
  CHECK(t[1] == doctest::Approx(2 * M_PI / 6));
  CHECK(t[2] == doctest::Approx(2 * M_PI * 2 / 6));
  CHECK(t[3] == doctest::Approx(2 * M_PI * 4 / 6));
}

TEST_CASE("first interior step is the harmonic map of L_S(id)") {
  const TriMesh m = generate_cap(CapKind::hemisphere, 500);
  const DiskMap step = sem_initial_map(m, 1);
  const StretchLaplacian l0 = identity_laplacian(m);
  const CholeskyFactor f = CholeskyFactor::factorize(l0.ii);
  const Eigen::VectorXd theta = arclength_boundary(m);
  const Eigen::VectorXd bx = theta.array().cos(), by = theta.array().sin();
  CHECK((step.u() - f.solve(-(l0.ib * bx))).norm() <= 1e-12 * step.u().norm());
  CHECK((step.v() - f.solve(-(l0.ib * by))).norm() <= 1e-12 * step.v().norm());
  CHECK(step.theta() == theta);
  // Residual of the interior systems.
  CHECK((l0.ii * step.u() + l0.ib * bx).norm() <= 1e-8 * (l0.ib * bx).norm());
}

TEST_CASE("planar disk identity is a fixed point of the interior step") {
  const TriMesh flat = generate_cap(CapKind::flat_disk, 500);
  const DiskMap id = identity_map(flat);
  const DiskMap next = sem_interior_step(flat, id);
  CHECK(max_abs(next.packed() - id.packed()) < 1e-8);
}

TEST_CASE("interior step is idempotent at stagnation") {
  const TriMesh m = generate_cap(CapKind::paraboloid, 37);
  DiskMap f = sem_initial_map(m, 1);
  for (int k = 0; k < 20000; ++k) {
    DiskMap next = sem_interior_step(m, f);
    const double change = max_abs(next.packed() - f.packed());
    f = std::move(next);
    if (change < 1e-10) break;
  }
  const DiskMap again = sem_interior_step(m, f);
  CHECK(max_abs(again.packed() - f.packed()) <= 1e-9);
}

TEST_CASE("centralize and normalize") {
  Eigen::MatrixX2d rows(4, 2);
  rows << 1, 0, 0, 2, -3, 0, 0, -1;
  const Eigen::MatrixX2d out = centralize_normalize(rows);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(out.row(i).norm() - 1.0) <= 1e-12);
  Eigen::MatrixX2d shifted = rows;
  shifted.col(0).array() += 5.0;
  shifted.col(1).array() -= 2.0;
  CHECK((centralize_normalize(shifted) - out).cwiseAbs().maxCoeff() <= 1e-12);
  const Eigen::RowVector2d centered = rows.row(0) - rows.colwise().mean();
  CHECK((out.row(0) + centered / centered.norm()).norm() <= 1e-12);
  Eigen::MatrixX2d same(3, 2);
  same << 1, 1, 1, 1, 1, 1;
  CHECK_THROWS_WITH_AS(centralize_normalize(same), doctest::Contains("zero-norm"), NumericError);
}

TEST_CASE("boundary step produces unit rows") {
  const TriMesh m = generate_cap(CapKind::hemisphere, 500);
  const DiskMap f = sem_initial_map(m);
  const BoundaryStep b = sem_boundary_step(m, f, assemble_stretch_laplacian(m, f));
  REQUIRE(b.theta.size() == m.partition().n_boundary());
  for (int i = 0; i < b.positions.rows(); ++i) {
    CHECK(std::abs(b.positions.row(i).norm() - 1.0) <= 1e-12);
    CHECK(std::atan2(b.positions(i, 1), b.positions(i, 0)) == b.theta[i]);
  }
}

TEST_CASE("sem_run") {
  const TriMesh m = generate_cap(CapKind::hemisphere, 1000);
  CHECK_THROWS_AS(sem_run(m, 0, true), ValidationError);

  const SemResult init = sem_run(m, 5, false);
  CHECK(init.trace.size() == 5);
  CHECK(init.map.theta() == arclength_boundary(m));
  CHECK(init.map.packed() == sem_initial_map(m, 5).packed());
  CHECK(sem_run(m, 5, false).map.packed() == init.map.packed());

  const SemResult five = sem_run(m, 5, true);
  const SemResult hundred = sem_run(m, 100, true);
  CHECK(hundred.trace.size() == 100);
  CHECK(hundred.trace.back().authalic < five.trace.back().authalic);
  for (const SemRecord& r : hundred.trace) {
    CHECK(r.image_area > 0.0);
    CHECK(r.authalic >= -1e-10 * m.total_area());
  }
  CHECK(hundred.trace.back().authalic == doctest::Approx(normalized_authalic_energy(m, hundred.map)).epsilon(1e-12));
}

TEST_CASE("sem_run pads the trace after stagnation") {
  const TriMesh flat = generate_cap(CapKind::flat_disk, 200);
  const SemResult r = sem_run(flat, 50, false);
  CHECK(r.trace.size() == 50);
  CHECK(r.iterations_run < 5);
  CHECK(r.trace.back().authalic == r.trace[r.iterations_run - 1].authalic);
  CHECK(std::abs(r.trace.back().authalic) <= 1e-10);
}
