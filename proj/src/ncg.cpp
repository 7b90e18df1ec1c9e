#include "authalic/ncg.hpp"

#include <cmath>
#include <limits>

#include "authalic/common.hpp"

namespace authalic {

namespace {

constexpr double kMaxRise = 0.1;

}  // namespace

PreconditionedNcg::PreconditionedNcg(NcgProblem problem, NcgOptions options)
    : problem_(std::move(problem)), options_(options) {
  options_.line_search.validate();
  if (options_.max_iters < 0) throw ValidationError("max_iters must be nonnegative");
}

const CgState& PreconditionedNcg::initialize(Eigen::VectorXd x0) {
  auto eval = problem_.evaluate(x0);
  if (!eval || !std::isfinite(eval->value)) throw NumericError("objective is undefined at the starting point");
  state_ = CgState{};
  state_.x = std::move(x0);
  state_.energy = eval->value;
  state_.g = std::move(eval->gradient);
  state_.h = problem_.precondition(state_.g);
  state_.p = -state_.h;
  state_.lambda = state_.h.dot(state_.g);
  state_.alpha_prev = options_.line_search.alpha0;
  state_.clamps = eval->clamps;
  since_restart_ = 0;
  restarts_ = 0;
  descent_failures_ = 0;
  initial_energy_ = state_.energy;
  initial_grad_norm_ = std::sqrt(std::max(state_.lambda, 0.0));
  return state_;
}

bool PreconditionedNcg::converged() const {
  return std::isfinite(options_.grad_tol) && std::sqrt(std::max(state_.lambda, 0.0)) <= options_.grad_tol;
}

std::optional<double> PreconditionedNcg::value_at(double alpha) const {
  const Eigen::VectorXd x = state_.x + alpha * state_.p;
  auto v = problem_.value(x);
  if (v && !std::isfinite(*v)) return std::nullopt;
  return v;
}

NcgRecord PreconditionedNcg::step() {
  const LineSearchConfig& ls = options_.line_search;
  NcgRecord rec;
  rec.iteration = state_.iteration + 1;

  if (state_.lambda == 0.0) {
    // Exact stationary point: nothing to move along.
    state_.iteration += 1;
    rec.energy = rec.phi0 = rec.phi_alpha = state_.energy;
    rec.wolfe = {true, true};
    rec.clamps = state_.clamps;
    return rec;
  }
  double dphi0 = state_.g.dot(state_.p);
  if (!(dphi0 < 0.0)) {
    state_.p = -state_.h;
    dphi0 = -state_.lambda;
    rec.restarted = true;
    ++restarts_;
    ++descent_failures_;
    since_restart_ = 0;
  }
  if (!(dphi0 < 0.0)) throw NumericError("not a descent direction: preconditioned gradient vanished");
  rec.descent_ratio = dphi0 / state_.lambda;
  rec.phi0 = state_.energy;
  rec.dphi0 = dphi0;

  // Quadratic-model step from the previous step length (or alpha0).
  auto model_step = [&](double sample) {
    const auto phi_s = value_at(sample);
    const QuadraticModel model = QuadraticModel::fit(
        state_.energy, dphi0, sample, phi_s ? *phi_s : std::numeric_limits<double>::infinity());
    return quadratic_step(model);
  };

  double alpha = 0.0;
  std::optional<NcgEvaluation> eval;
  if (ls.mode == LineSearchMode::quadratic) {
    StepChoice choice;
    if (state_.iteration == 0 && ls.first_step == FirstStep::direct) {
      choice = {ls.alpha0, StepRule::initial};
    } else {
      choice = model_step(state_.iteration == 0 ? ls.alpha0 : state_.alpha_prev);
    }
    rec.evaluations += choice.rule == StepRule::initial ? 0 : 1;
    alpha = choice.alpha;
    rec.rule = choice.rule;
    const double limit = state_.energy + kMaxRise * std::abs(state_.energy);
    for (;;) {
      const auto v = value_at(alpha);
      ++rec.evaluations;
      if (v && *v <= limit) break;
      if (rec.backtracks >= ls.max_backtracks) {
        if (v) break;
        throw NumericError("non-finite energy after " + std::to_string(rec.backtracks) + " step reductions");
      }
      alpha *= 0.5;
      ++rec.backtracks;
    }
    eval = problem_.evaluate(state_.x + alpha * state_.p);
    ++rec.evaluations;
    if (!eval || !std::isfinite(eval->value)) throw NumericError("non-finite energy at the accepted step");
  } else {
    StepChoice guess{ls.alpha0, StepRule::initial};
    if (state_.iteration > 0) guess = model_step(state_.alpha_prev);
    rec.rule = guess.rule;
    std::vector<std::pair<double, NcgEvaluation>> cache;
    const LineFunction phi = [&](double a) -> std::optional<LineSample> {
      auto e = problem_.evaluate(state_.x + a * state_.p);
      if (!e || !std::isfinite(e->value)) return std::nullopt;
      const LineSample s{e->value, e->gradient.dot(state_.p)};
      cache.emplace_back(a, std::move(*e));
      return s;
    };
    const WolfeResult found = strong_wolfe_search(phi, state_.energy, dphi0, guess.alpha, ls.c1, ls.c2);
    rec.evaluations += found.evaluations;
    if (!(found.alpha > 0.0)) throw NumericError("line search found no step with sufficient decrease");
    alpha = found.alpha;
    for (auto& [a, e] : cache) {
      if (a == alpha) eval = std::move(e);
    }
    if (!eval) throw NumericError("line search lost its accepted evaluation");
  }

  const Eigen::VectorXd p_old = state_.p;
  state_.x += alpha * p_old;
  state_.energy = eval->value;
  state_.g = std::move(eval->gradient);
  state_.h = problem_.precondition(state_.g);
  state_.clamps = eval->clamps;
  const double lambda_old = state_.lambda;
  state_.lambda = state_.h.dot(state_.g);
  state_.alpha_prev = alpha;
  state_.iteration += 1;

  double beta = lambda_old > 0.0 ? state_.lambda / lambda_old : 0.0;
  if (++since_restart_ >= options_.restart_period && options_.restart_period > 0) {
    beta = 0.0;
    since_restart_ = 0;
    ++restarts_;
  }
  state_.p = -state_.h + beta * p_old;

  rec.energy = state_.energy;
  rec.grad_norm = std::sqrt(std::max(state_.lambda, 0.0));
  rec.alpha = alpha;
  rec.beta = beta;
  rec.phi_alpha = state_.energy;
  rec.dphi_alpha = state_.g.dot(p_old);
  rec.wolfe = wolfe_check(rec.phi0, rec.dphi0, rec.phi_alpha, rec.dphi_alpha, ls.c1, ls.c2, alpha);
  rec.clamps = state_.clamps;
  return rec;
}

std::vector<NcgRecord> PreconditionedNcg::run() {
  std::vector<NcgRecord> trace;
  while (!finished()) trace.push_back(step());
  return trace;
}

}  // namespace authalic
