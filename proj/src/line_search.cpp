#include "authalic/line_search.hpp"

#include <cmath>
#include <limits>

#include "authalic/common.hpp"

namespace authalic {

namespace {

constexpr double kMaxGrowth = 100.0;

struct Point {
  double alpha = 0.0;
  double phi = 0.0;
  double dphi = 0.0;
  bool defined = true;
};

// Minimizer of the quadratic through (lo.phi, lo.dphi) and hi.phi, kept at
// least 10% of the interval away from both ends; bisection otherwise.
double interpolate(const Point& lo, const Point& hi) {
  const double d = hi.alpha - lo.alpha;
  const double left = std::min(lo.alpha, hi.alpha) + 0.1 * std::abs(d);
  const double right = std::max(lo.alpha, hi.alpha) - 0.1 * std::abs(d);
  double a = 0.5 * (lo.alpha + hi.alpha);
  if (hi.defined && std::isfinite(hi.phi)) {
    const double curvature = hi.phi - lo.phi - lo.dphi * d;
    if (curvature > 0.0) a = lo.alpha - lo.dphi * d * d / (2.0 * curvature);
  }
  if (!std::isfinite(a) || a < left || a > right) a = 0.5 * (lo.alpha + hi.alpha);
  return a;
}

}  // namespace

QuadraticModel QuadraticModel::fit(double phi0, double dphi0, double sample_step, double phi_sample) {
  QuadraticModel m;
  m.phi0 = phi0;
  m.dphi0 = dphi0;
  m.sample_step = sample_step;
  m.phi_sample = phi_sample;
  m.a0 = phi0;
  m.a1 = dphi0;
  m.a2 = (phi_sample - phi0 - sample_step * dphi0) / (sample_step * sample_step);
  return m;
}

std::string to_string(StepRule rule) {
  switch (rule) {
    case StepRule::initial: return "initial";
    case StepRule::model: return "model";
    case StepRule::concave: return "concave";
    case StepRule::clamped: return "clamped";
  }
  return "unknown";
}

StepChoice quadratic_step(const QuadraticModel& model) {
  if (!(model.dphi0 < 0.0)) throw NumericError("not a descent direction");
  const double prev = model.sample_step;
  const double denom = 2.0 * (model.phi_sample - model.phi0 - prev * model.dphi0);
  if (!std::isfinite(model.phi_sample) || !(denom > 0.0)) return {0.5 * prev, StepRule::concave};
  const double alpha = -prev * prev * model.dphi0 / denom;
  if (!(alpha > 0.0) || alpha > kMaxGrowth * prev || !std::isfinite(alpha)) return {prev, StepRule::clamped};
  return {alpha, StepRule::model};
}

WolfeFlags wolfe_check(double phi0, double dphi0, double phi_alpha, double dphi_alpha, double c1, double c2,
                       double alpha) {
  WolfeFlags flags;
  flags.sufficient_decrease = phi_alpha <= phi0 + c1 * alpha * dphi0;
  flags.curvature = std::abs(dphi_alpha) <= c2 * std::abs(dphi0);
  return flags;
}

LineSearchMode parse_line_search_mode(const std::string& text) {
  if (text == "quadratic") return LineSearchMode::quadratic;
  if (text == "wolfe") return LineSearchMode::wolfe;
  throw ValidationError("unknown line-search mode '" + text + "' (expected quadratic or wolfe)");
}

std::string to_string(LineSearchMode mode) { return mode == LineSearchMode::wolfe ? "wolfe" : "quadratic"; }

void LineSearchConfig::validate() const {
  if (!(c1 > 0.0 && c1 < c2 && c2 < 0.5)) throw ValidationError("line search requires 0 < c1 < c2 < 1/2");
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) throw ValidationError("alpha0 must be positive and finite");
  if (max_backtracks < 0) throw ValidationError("max_backtracks must be nonnegative");
}

WolfeResult strong_wolfe_search(const LineFunction& phi, double phi0, double dphi0, double initial, double c1,
                                double c2, int max_evaluations) {
  WolfeResult result;
  Point best{0.0, phi0, dphi0, true};
  bool have_best = false;

  auto sample = [&](double alpha) {
    Point p;
    p.alpha = alpha;
    ++result.evaluations;
    if (auto s = phi(alpha)) {
      p.phi = s->phi;
      p.dphi = s->dphi;
      p.defined = std::isfinite(p.phi) && std::isfinite(p.dphi);
    } else {
      p.defined = false;
    }
    if (!p.defined) p.phi = std::numeric_limits<double>::infinity();
    return p;
  };
  auto armijo = [&](const Point& p) { return p.defined && p.phi <= phi0 + c1 * p.alpha * dphi0; };
  auto accept = [&](const Point& p) {
    result.alpha = p.alpha;
    result.sample = {p.phi, p.dphi};
    result.flags = wolfe_check(phi0, dphi0, p.phi, p.dphi, c1, c2, p.alpha);
  };
  auto remember = [&](const Point& p) {
    if (armijo(p) && (!have_best || p.phi < best.phi)) {
      best = p;
      have_best = true;
    }
  };
  auto finish_best = [&]() -> WolfeResult {
    if (have_best) {
      accept(best);
    } else {
      result.alpha = 0.0;
      result.sample = {phi0, dphi0};
      result.flags = WolfeFlags{};
    }
    return result;
  };

  auto zoom = [&](Point lo, Point hi) -> WolfeResult {
    while (result.evaluations < max_evaluations) {
      if (std::abs(hi.alpha - lo.alpha) <= 1e-14 * std::max(1.0, std::abs(lo.alpha))) break;
      const Point p = sample(interpolate(lo, hi));
      remember(p);
      if (!armijo(p) || p.phi >= lo.phi) {
        hi = p;
      } else {
        if (std::abs(p.dphi) <= -c2 * dphi0) {
          accept(p);
          return result;
        }
        if (p.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = p;
      }
    }
    return finish_best();
  };

  Point prev{0.0, phi0, dphi0, true};
  double alpha = initial > 0.0 && std::isfinite(initial) ? initial : 1.0;
  for (int i = 0; result.evaluations < max_evaluations; ++i) {
    const Point p = sample(alpha);
    remember(p);
    if (!armijo(p) || (i > 0 && p.phi >= prev.phi)) return zoom(prev, p);
    if (std::abs(p.dphi) <= -c2 * dphi0) {
      accept(p);
      return result;
    }
    if (p.dphi >= 0.0) return zoom(p, prev);
    prev = p;
    alpha *= 2.0;
  }
  return finish_best();
}

}  // namespace authalic
