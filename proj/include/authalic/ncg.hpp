#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "authalic/line_search.hpp"

namespace authalic {

struct NcgEvaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;
  int clamps = 0;  // diagnostics forwarded to the trace
};

// Objective seen by the preconditioned Fletcher-Reeves solver.
struct NcgProblem {
  // Objective only; nullopt where it is undefined.
  std::function<std::optional<double>(const Eigen::VectorXd&)> value;
  // Objective and gradient; nullopt where undefined.
  std::function<std::optional<NcgEvaluation>(const Eigen::VectorXd&)> evaluate;
  // h = M^{-1} g for the fixed preconditioner M.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> precondition;
};

struct NcgOptions {
  LineSearchConfig line_search;
  int max_iters = 100;
  double grad_tol = 0.0;    // on sqrt(g^T M^{-1} g); a non-finite value disables the test
  int restart_period = 0;   // beta reset every this many iterations; 0 means never
};

// Solver state between iterations.
struct CgState {
  Eigen::VectorXd x;
  Eigen::VectorXd g;      // gradient at x
  Eigen::VectorXd h;      // M^{-1} g
  Eigen::VectorXd p;      // search direction
  double energy = 0.0;
  double lambda = 0.0;    // h^T g
  double alpha_prev = 0.0;
  int iteration = 0;
  int clamps = 0;
};

struct NcgRecord {
  int iteration = 0;
  double energy = 0.0;        // after the step
  double grad_norm = 0.0;     // sqrt(g^T M^{-1} g) after the step
  double alpha = 0.0;
  double beta = 0.0;
  double descent_ratio = 0.0;  // g^T p / g^T M^{-1} g before the step
  double phi0 = 0.0;
  double dphi0 = 0.0;
  double phi_alpha = 0.0;
  double dphi_alpha = 0.0;
  WolfeFlags wolfe;
  StepRule rule = StepRule::model;
  int backtracks = 0;
  int evaluations = 0;
  bool restarted = false;      // direction reset to -h before the step
  int clamps = 0;
};

class PreconditionedNcg {
 public:
  PreconditionedNcg(NcgProblem problem, NcgOptions options);

  // Evaluates x0 and sets p = -M^{-1} g. Throws NumericError if the objective
  // is undefined at x0.
  const CgState& initialize(Eigen::VectorXd x0);

  bool converged() const;
  bool finished() const { return converged() || state_.iteration >= options_.max_iters; }

  // One iteration: step size, update, new gradient, new direction. Throws
  // NumericError when no finite step can be found.
  NcgRecord step();

  // Iterates until finished().
  std::vector<NcgRecord> run();

  const CgState& state() const { return state_; }
  int restarts() const { return restarts_; }
  int descent_failures() const { return descent_failures_; }
  double initial_energy() const { return initial_energy_; }
  double initial_grad_norm() const { return initial_grad_norm_; }

 private:
  std::optional<double> value_at(double alpha) const;

  NcgProblem problem_;
  NcgOptions options_;
  CgState state_;
  int since_restart_ = 0;
  int restarts_ = 0;
  int descent_failures_ = 0;
  double initial_energy_ = 0.0;
  double initial_grad_norm_ = 0.0;
};

}  // namespace authalic
