#include "authalic/aem.hpp"

#include <cmath>

#include "authalic/energy.hpp"
#include "authalic/metrics.hpp"
#include "authalic/sem.hpp"

namespace authalic {

Preconditioner::Preconditioner(CholeskyFactor interior, CholeskyFactor boundary, SparseMatrix m1, SparseMatrix m2)
    : interior_(std::move(interior)),
      boundary_(std::move(boundary)),
      m1_(std::move(m1)),
      m2_(std::move(m2)),
      ni_(static_cast<int>(m1_.rows())),
      nb_(static_cast<int>(m2_.rows())) {}

Eigen::VectorXd Preconditioner::solve(const Eigen::VectorXd& g) const {
  if (g.size() != 2 * ni_ + nb_) throw ValidationError("preconditioner: dimension mismatch");
  Eigen::VectorXd h(g.size());
  h.segment(0, ni_) = interior_.solve(g.segment(0, ni_));
  h.segment(ni_, ni_) = interior_.solve(g.segment(ni_, ni_));
  h.segment(2 * ni_, nb_) = boundary_.solve(g.segment(2 * ni_, nb_));
  return h;
}

Eigen::VectorXd Preconditioner::apply(const Eigen::VectorXd& x) const {
  if (x.size() != 2 * ni_ + nb_) throw ValidationError("preconditioner: dimension mismatch");
  Eigen::VectorXd y(x.size());
  y.segment(0, ni_) = m1_ * x.segment(0, ni_);
  y.segment(ni_, ni_) = m1_ * x.segment(ni_, ni_);
  y.segment(2 * ni_, nb_) = m2_ * x.segment(2 * ni_, nb_);
  return y;
}

Preconditioner build_preconditioner(const TriMesh& mesh, const DiskMap& init_map) {
  const StretchLaplacian l = assemble_stretch_laplacian(mesh, init_map);
  return Preconditioner(CholeskyFactor::factorize(l.ii), CholeskyFactor::factorize(l.bb), l.ii, l.bb);
}

double fr_beta(const Eigen::VectorXd& g_new, const Eigen::VectorXd& h_new, double lambda_old) {
  if (!(lambda_old > 0.0)) return 0.0;
  return h_new.dot(g_new) / lambda_old;
}

AemResult aem_run_from(const TriMesh& mesh, const DiskMap& start, const AemOptions& options) {
  if (options.max_iters < 1) throw ValidationError("max_iters must be at least 1");
  const int ni = start.n_interior();
  const int nb = start.n_boundary();
  const Preconditioner precond = build_preconditioner(mesh, start);

  NcgProblem problem;
  problem.value = [&](const Eigen::VectorXd& x) {
    return try_normalized_authalic_energy(mesh, DiskMap(ni, nb, x));
  };
  problem.evaluate = [&](const Eigen::VectorXd& x) -> std::optional<NcgEvaluation> {
    const DiskMap map(ni, nb, x);
    if (!(image_area_polar(map.theta()) > 0.0) || !x.allFinite()) return std::nullopt;
    AuthalicEvaluation e = evaluate_authalic(mesh, map);
    return NcgEvaluation{e.energy, std::move(e.gradient), e.laplacian.clamped_faces};
  };
  problem.precondition = [&](const Eigen::VectorXd& g) { return precond.solve(g); };

  NcgOptions ncg;
  ncg.line_search = options.line_search;
  ncg.max_iters = options.max_iters;
  ncg.grad_tol = options.grad_tol ? *options.grad_tol : 1e-8 * std::sqrt(static_cast<double>(2 * ni + nb));
  ncg.restart_period = 2 * (2 * ni + nb);

  PreconditionedNcg solver(problem, ncg);
  solver.initialize(start.packed());

  AemResult result;
  result.initial = start;
  result.initial_energy = solver.initial_energy();
  result.initial_grad_norm = solver.initial_grad_norm();
  result.grad_tol = ncg.grad_tol;
  std::vector<Vec2> image;
  while (!solver.finished()) {
    AemRecord rec;
    rec.step = solver.step();
    DiskMap(ni, nb, solver.state().x).vertex_positions(mesh.partition(), image);
    rec.foldings = folding_count(mesh, image);
    result.trace.push_back(rec);
  }
  result.map = DiskMap(ni, nb, solver.state().x);
  result.converged = solver.converged();
  result.restarts = solver.restarts();
  result.descent_failures = solver.descent_failures();
  result.boundary_order_preserved = boundary_order_preserved(result.map.theta());
  return result;
}

AemResult aem_run(const TriMesh& mesh, const AemOptions& options) {
  if (options.init_iterations < 1) throw ValidationError("initializer needs at least one iteration");
  return aem_run_from(mesh, sem_initial_map(mesh, options.init_iterations), options);
}

}  // namespace authalic
