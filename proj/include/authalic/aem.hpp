#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "authalic/disk_map.hpp"
#include "authalic/linalg.hpp"
#include "authalic/line_search.hpp"
#include "authalic/mesh.hpp"
#include "authalic/ncg.hpp"

namespace authalic {

// M = blkdiag(L_II, L_II, L_BB) of L_S at the starting map, factorized once.
class Preconditioner {
 public:
  Preconditioner() = default;
  Preconditioner(CholeskyFactor interior, CholeskyFactor boundary, SparseMatrix m1, SparseMatrix m2);

  // M^{-1} g for a packed (u_I, v_I, theta) vector.
  Eigen::VectorXd solve(const Eigen::VectorXd& g) const;
  // M x.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  const CholeskyFactor& interior() const { return interior_; }
  const CholeskyFactor& boundary() const { return boundary_; }

 private:
  CholeskyFactor interior_, boundary_;
  SparseMatrix m1_, m2_;
  int ni_ = 0;
  int nb_ = 0;
};

Preconditioner build_preconditioner(const TriMesh& mesh, const DiskMap& init_map);

// Fletcher-Reeves ratio h_new^T g_new / lambda_old; 0 (restart) when
// lambda_old <= 0.
double fr_beta(const Eigen::VectorXd& g_new, const Eigen::VectorXd& h_new, double lambda_old);

struct AemOptions {
  LineSearchConfig line_search;
  int max_iters = 100;
  std::optional<double> grad_tol;  // default 1e-8 sqrt(2 n_I + n_B)
  int init_iterations = 5;
};

struct AemRecord {
  NcgRecord step;
  int foldings = 0;
};

struct AemResult {
  DiskMap initial;
  DiskMap map;
  std::vector<AemRecord> trace;
  double initial_energy = 0.0;
  double initial_grad_norm = 0.0;
  double grad_tol = 0.0;
  bool converged = false;
  int restarts = 0;
  int descent_failures = 0;
  bool boundary_order_preserved = true;
};

// Initializer (fixed-boundary SEM steps), fixed preconditioner, and the
// preconditioned nonlinear CG loop on the normalized authalic energy.
AemResult aem_run(const TriMesh& mesh, const AemOptions& options = {});

// Same loop from a given starting map.
AemResult aem_run_from(const TriMesh& mesh, const DiskMap& start, const AemOptions& options = {});

}  // namespace authalic
