#pragma once

#include <functional>
#include <optional>
#include <string>

namespace authalic {

// Quadratic a2 x^2 + a1 x + a0 through Phi(0), Phi'(0) and Phi(sample).
struct QuadraticModel {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double sample_step = 0.0;
  double phi0 = 0.0;
  double dphi0 = 0.0;
  double phi_sample = 0.0;

  static QuadraticModel fit(double phi0, double dphi0, double sample_step, double phi_sample);
  double operator()(double alpha) const { return (a2 * alpha + a1) * alpha + a0; }
};

enum class StepRule {
  initial,      // first step, taken as alpha0 without a model fit
  model,        // stationary point of the quadratic model
  concave,      // a2 <= 0: half the sample step
  clamped,      // model step outside (0, 100 * sample]: the sample step
};

std::string to_string(StepRule rule);

struct StepChoice {
  double alpha = 0.0;
  StepRule rule = StepRule::model;
};

// -alpha_{k-1}^2 Phi'(0) / (2 (Phi(alpha_{k-1}) - Phi(0) - alpha_{k-1} Phi'(0))),
// with fallbacks for the concave and out-of-range cases. Throws NumericError
// ("not a descent direction") if Phi'(0) >= 0.
StepChoice quadratic_step(const QuadraticModel& model);

struct WolfeFlags {
  bool sufficient_decrease = false;
  bool curvature = false;
  bool both() const { return sufficient_decrease && curvature; }
};

// Strong Wolfe conditions at step alpha:
//   Phi(alpha) <= Phi(0) + c1 alpha Phi'(0)  and  |Phi'(alpha)| <= c2 |Phi'(0)|.
WolfeFlags wolfe_check(double phi0, double dphi0, double phi_alpha, double dphi_alpha, double c1, double c2,
                       double alpha);

enum class LineSearchMode { quadratic, wolfe };

LineSearchMode parse_line_search_mode(const std::string& text);
std::string to_string(LineSearchMode mode);

// How the very first step is chosen in quadratic mode.
enum class FirstStep {
  direct,  // alpha = alpha0
  fitted,  // fit the model with alpha0 as the sample step
};

struct LineSearchConfig {
  LineSearchMode mode = LineSearchMode::quadratic;
  double c1 = 1e-4;
  double c2 = 0.4;
  double alpha0 = 2.0;
  int max_backtracks = 30;
  FirstStep first_step = FirstStep::direct;

  // Throws ValidationError unless 0 < c1 < c2 < 1/2, alpha0 > 0 and
  // max_backtracks >= 0.
  void validate() const;
};

// One sample of Phi(alpha) = E(x + alpha p): value and directional derivative.
struct LineSample {
  double phi = 0.0;
  double dphi = 0.0;
};

// Returns nullopt where the objective is undefined.
using LineFunction = std::function<std::optional<LineSample>(double alpha)>;

struct WolfeResult {
  double alpha = 0.0;
  LineSample sample;
  WolfeFlags flags;
  int evaluations = 0;
};

// Bracketing and zoom search for a step satisfying the strong Wolfe
// conditions, trying `initial` first. If no such step is found within
// `max_evaluations`, returns the best step with sufficient decrease seen
// (flags reflect what actually holds), or alpha = 0 when there is none.
WolfeResult strong_wolfe_search(const LineFunction& phi, double phi0, double dphi0, double initial, double c1,
                                double c2, int max_evaluations = 60);

}  // namespace authalic
