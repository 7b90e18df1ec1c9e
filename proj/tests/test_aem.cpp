#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <random>

#include "authalic/aem.hpp"
#include "authalic/energy.hpp"
#include "authalic/generators.hpp"
#include "authalic/line_search.hpp"
#include "authalic/metrics.hpp"
#include "authalic/ncg.hpp"
#include "authalic/sem.hpp"
#include "support.hpp"

using namespace authalic;
using namespace authalic::testing;

namespace {

// phi(alpha) = a2 alpha^2 + a1 alpha + a0.
struct Parabola {
  double a0, a1, a2;
  double operator()(double x) const { return (a2 * x + a1) * x + a0; }
  double d(double x) const { return 2 * a2 * x + a1; }
};

// f(x) = (x - x*)^T A (x - x*) / 2 with the given preconditioner. The
// minimum value is 0 so energy differences stay resolvable near x*.
NcgProblem quadratic_problem(const Eigen::MatrixXd& a, const Eigen::VectorXd& xstar, const Eigen::MatrixXd& m) {
  NcgProblem p;
  p.value = [=](const Eigen::VectorXd& x) -> std::optional<double> { return 0.5 * (x - xstar).dot(a * (x - xstar)); };
  p.evaluate = [=](const Eigen::VectorXd& x) -> std::optional<NcgEvaluation> {
    return NcgEvaluation{0.5 * (x - xstar).dot(a * (x - xstar)), a * (x - xstar), 0};
  };
  const Eigen::MatrixXd minv = m.inverse();
  p.precondition = [=](const Eigen::VectorXd& g) -> Eigen::VectorXd { return minv * g; };
  return p;
}

}  // namespace

TEST_CASE("quadratic model interpolates its samples") {
  const QuadraticModel m = QuadraticModel::fit(1.5, -3.0, 0.7, 0.2);
  CHECK(m(0.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(m.a1 == -3.0);
  CHECK(m(0.7) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("quadratic step examples") {
  StepChoice s = quadratic_step(QuadraticModel::fit(0.0, -2.0, 1.0, -1.0));
  CHECK(s.alpha == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.rule == StepRule::model);
  CHECK(QuadraticModel::fit(0.0, -2.0, 1.0, -1.0).a2 == doctest::Approx(1.0));

  // Phi = alpha^2 - 2 alpha sampled at 2: a2 = 1 and the minimizer is 1.
  s = quadratic_step(QuadraticModel::fit(0.0, -2.0, 2.0, 0.0));
  CHECK(QuadraticModel::fit(0.0, -2.0, 2.0, 0.0).a2 == doctest::Approx(1.0));
  CHECK(s.alpha == doctest::Approx(1.0).epsilon(1e-15));

  s = quadratic_step(QuadraticModel::fit(0.0, -2.0, 2.0, -5.0));
  CHECK(s.rule == StepRule::concave);
  CHECK(s.alpha == 1.0);

  // Nearly linear sample: the model minimizer lies far beyond 100 samples.
  s = quadratic_step(QuadraticModel::fit(0.0, -1.0, 1.0, -1.0 + 1e-6));
  CHECK(s.rule == StepRule::clamped);
  CHECK(s.alpha == 1.0);

  s = quadratic_step(QuadraticModel::fit(0.0, -1.0, 1.0, std::numeric_limits<double>::infinity()));
  CHECK(s.rule == StepRule::concave);
  CHECK(s.alpha == 0.5);

  CHECK_THROWS_WITH_AS(quadratic_step(QuadraticModel::fit(0.0, 0.0, 1.0, 1.0)),
                       doctest::Contains("not a descent direction"), NumericError);
  CHECK_THROWS_AS(quadratic_step(QuadraticModel::fit(0.0, 1.0, 1.0, 1.0)), NumericError);
}

TEST_CASE("quadratic step recovers exact minimizers") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Parabola p{2 * u(rng) - 1, -(0.1 + 10 * u(rng)), 0.1 + 10 * u(rng)};
    const double sample = 0.1 + 5 * u(rng);
    const double expected = -p.a1 / (2 * p.a2);
    const StepChoice s = quadratic_step(QuadraticModel::fit(p(0), p.d(0), sample, p(sample)));
    CHECK(std::abs(s.alpha - expected) <= 1e-12 * expected);
  }
}

TEST_CASE("beta") {
  const Eigen::Vector2d g(1, 0);
  CHECK(fr_beta(g, g, g.dot(g)) == 1.0);
  CHECK(fr_beta(Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), 1.0) == 0.0);
  CHECK(fr_beta(Eigen::Vector2d(0, 2), Eigen::Vector2d(0, 2), 1.0) == 4.0);
  CHECK(fr_beta(g, g, 0.0) == 0.0);
  CHECK(fr_beta(g, g, -1.0) == 0.0);
}

TEST_CASE("Wolfe conditions") {
  const Parabola p{0.0, -2.0, 1.0};
  WolfeFlags f = wolfe_check(p(0), p.d(0), p(0), p.d(0), 1e-4, 0.4, 0.0);
  CHECK(f.sufficient_decrease);
  f = wolfe_check(p(0), p.d(0), p(1), p.d(1), 1e-4, 0.4, 1.0);
  CHECK(f.both());
  f = wolfe_check(p(0), p.d(0), p(10), p.d(10), 1e-4, 0.4, 10.0);
  CHECK_FALSE(f.sufficient_decrease);
  f = wolfe_check(p(0), p.d(0), p(0.1), p.d(0.1), 1e-4, 0.4, 0.1);
  CHECK(f.sufficient_decrease);
  CHECK_FALSE(f.curvature);
}

TEST_CASE("strong Wolfe search") {
  const double c1 = 1e-4, c2 = 0.4;
  SUBCASE("parabola from a short and a long guess") {
    const Parabola p{1.0, -3.0, 0.5};
    const LineFunction phi = [&](double a) -> std::optional<LineSample> { return LineSample{p(a), p.d(a)}; };
    for (double guess : {0.01, 1.0, 50.0, 1e4}) {
      const WolfeResult r = strong_wolfe_search(phi, p(0), p.d(0), guess, c1, c2);
      CHECK(r.flags.both());
      CHECK(wolfe_check(p(0), p.d(0), p(r.alpha), p.d(r.alpha), c1, c2, r.alpha).both());
    }
  }
  SUBCASE("nonconvex with an undefined region") {
    // phi(a) = (a - 2)^4 - 4 a, undefined for a > 6.
    const auto f = [](double a) { return std::pow(a - 2, 4) - 4 * a; };
    const auto df = [](double a) { return 4 * std::pow(a - 2, 3) - 4; };
    const LineFunction phi = [&](double a) -> std::optional<LineSample> {
      if (a > 6) return std::nullopt;
      return LineSample{f(a), df(a)};
    };
    for (double guess : {0.5, 5.0, 20.0}) {
      const WolfeResult r = strong_wolfe_search(phi, f(0), df(0), guess, c1, c2);
      CHECK(r.alpha > 0.0);
      CHECK(r.flags.both());
    }
  }
}

TEST_CASE("line search configuration") {
  LineSearchConfig c;
  CHECK_NOTHROW(c.validate());
  c.c2 = 0.6;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.c1 = 0.5;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.alpha0 = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK(parse_line_search_mode("wolfe") == LineSearchMode::wolfe);
  CHECK(to_string(LineSearchMode::quadratic) == "quadratic");
  CHECK_THROWS_AS(parse_line_search_mode("armijo"), ValidationError);
}

TEST_CASE("NCG on a convex quadratic") {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> n01;
  const int n = 12;
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n * n; ++i) r.data()[i] = n01(rng);
  const Eigen::MatrixXd a = r * r.transpose() + n * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = n01(rng);
  const Eigen::VectorXd xstar = a.ldlt().solve(b);

  SUBCASE("first direction is the preconditioned steepest descent") {
    PreconditionedNcg cg(quadratic_problem(a, xstar, a.diagonal().asDiagonal()), {});
    const CgState& s = cg.initialize(Eigen::VectorXd::Zero(n));
    CHECK(s.p == -s.h);
    CHECK((s.h - a.diagonal().asDiagonal().inverse() * s.g).norm() <= 1e-14 * s.h.norm());
  }
  SUBCASE("exact preconditioner converges in one model step") {
    NcgOptions o;
    o.line_search.first_step = FirstStep::fitted;
    o.max_iters = 5;
    o.grad_tol = 1e-10;
    PreconditionedNcg cg(quadratic_problem(a, xstar, a), o);
    cg.initialize(Eigen::VectorXd::Zero(n));
    const auto trace = cg.run();
    CHECK(trace.front().alpha == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((cg.state().x - xstar).norm() <= 1e-9 * xstar.norm());
    CHECK(cg.converged());
  }
  for (LineSearchMode mode : {LineSearchMode::quadratic, LineSearchMode::wolfe}) {
    CAPTURE(to_string(mode));
    NcgOptions o;
    o.line_search.mode = mode;
    o.max_iters = 200;
    o.grad_tol = 1e-10;
    o.restart_period = n;
    PreconditionedNcg cg(quadratic_problem(a, xstar, Eigen::MatrixXd::Identity(n, n)), o);
    cg.initialize(Eigen::VectorXd::Zero(n));
    const auto trace = cg.run();
    CHECK(cg.converged());
    CHECK((cg.state().x - xstar).norm() <= 1e-8 * xstar.norm());
    for (const NcgRecord& rec : trace) CHECK(rec.dphi0 < 0.0);
  }
  SUBCASE("grad_tol of infinity runs every iteration") {
    NcgOptions o;
    o.max_iters = 7;
    o.grad_tol = std::numeric_limits<double>::infinity();
    PreconditionedNcg cg(quadratic_problem(a, xstar, Eigen::MatrixXd::Identity(n, n)), o);
    cg.initialize(Eigen::VectorXd::Zero(n));
    CHECK(cg.run().size() == 7);
    PreconditionedNcg at_min(quadratic_problem(a, xstar, a), o);
    at_min.initialize(xstar);
    const auto idle = at_min.run();
    CHECK(idle.size() == 7);
    CHECK(idle.back().alpha == 0.0);
    CHECK(at_min.state().x == xstar);
  }
}

TEST_CASE("NCG restarts on ascent directions") {
  // A preconditioner that is not positive definite yields g^T p > 0 after
  // the first update; the solver falls back to -M^{-1} g and counts it.
  NcgProblem p;
  p.value = [](const Eigen::VectorXd& x) -> std::optional<double> { return x.squaredNorm(); };
  p.evaluate = [](const Eigen::VectorXd& x) -> std::optional<NcgEvaluation> {
    return NcgEvaluation{x.squaredNorm(), 2 * x, 0};
  };
  p.precondition = [](const Eigen::VectorXd& g) -> Eigen::VectorXd { return g; };
  NcgOptions o;
  o.max_iters = 3;
  PreconditionedNcg cg(p, o);
  cg.initialize(Eigen::Vector2d(1.0, -2.0));
  const auto trace = cg.run();
  for (const NcgRecord& r : trace) CHECK(r.energy <= r.phi0);
  CHECK(cg.state().energy < 5.0);
}

TEST_CASE("preconditioner") {
  const TriMesh m = generate_cap(CapKind::hemisphere, 1000);
  const DiskMap init = sem_initial_map(m);
  const Preconditioner pc = build_preconditioner(m, init);
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n01;
  Eigen::VectorXd g(init.size());
  for (int i = 0; i < g.size(); ++i) g[i] = n01(rng);
  CHECK((pc.apply(pc.solve(g)) - g).norm() <= 1e-8 * g.norm());
  CHECK((pc.solve(pc.apply(g)) - g).norm() <= 1e-8 * g.norm());

  const int ni = init.n_interior();
  Eigen::VectorXd only_interior = g;
  only_interior.tail(init.n_boundary()).setZero();
  const Eigen::VectorXd h = pc.solve(only_interior);
  CHECK(max_abs(h.tail(init.n_boundary())) == 0.0);
  Eigen::VectorXd only_u = Eigen::VectorXd::Zero(g.size());
  only_u.head(ni) = g.head(ni);
  CHECK(max_abs(pc.solve(only_u).segment(ni, ni)) == 0.0);
  CHECK((pc.solve(g).head(ni) - pc.solve(only_interior).head(ni)).norm() == 0.0);
  CHECK_THROWS_AS(pc.solve(Eigen::VectorXd::Ones(3)), ValidationError);
}

TEST_CASE("aem_run on the hemisphere") {
  const TriMesh m = generate_cap(CapKind::hemisphere, 1000);
  const AemResult r = aem_run(m);
  const SemResult sem = sem_run(m, 100, true);
  CHECK(r.trace.size() == 100);
  CHECK(normalized_authalic_energy(m, r.map) < sem.trace.back().authalic);
  CHECK(r.trace.back().step.energy == doctest::Approx(normalized_authalic_energy(m, r.map)).epsilon(1e-12));
  CHECK(folding_count(m, r.map) == 0);
  CHECK(r.boundary_order_preserved);
  CHECK(r.grad_tol == doctest::Approx(1e-8 * std::sqrt(2.0 * m.partition().n_interior() + m.partition().n_boundary())));
  CHECK(r.initial.packed() == sem_initial_map(m, 5).packed());
  for (const AemRecord& rec : r.trace) {
    CHECK(rec.step.energy >= -1e-10 * m.total_area());
    CHECK(std::isfinite(rec.step.alpha));
    CHECK(rec.foldings == 0);
  }
  CHECK(r.trace.front().step.rule == StepRule::initial);
  CHECK(r.trace.front().step.alpha == 2.0);
  CHECK(r.trace.front().step.descent_ratio == doctest::Approx(-1.0).epsilon(1e-12));

  const AemResult again = aem_run(m);
  REQUIRE(again.trace.size() == r.trace.size());
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    CHECK(again.trace[i].step.energy == r.trace[i].step.energy);
    CHECK(again.trace[i].step.alpha == r.trace[i].step.alpha);
  }
  CHECK(again.map.packed() == r.map.packed());
}

TEST_CASE("aem_run stopping rules") {
  const TriMesh m = generate_cap(CapKind::paraboloid, 300);
  AemOptions o;
  o.max_iters = 17;
  o.grad_tol = std::numeric_limits<double>::infinity();
  CHECK(aem_run(m, o).trace.size() == 17);
  o.max_iters = 0;
  CHECK_THROWS_AS(aem_run(m, o), ValidationError);

  const TriMesh flat = generate_cap(CapKind::flat_disk, 300);
  AemOptions d;
  const AemResult r = aem_run_from(flat, identity_map(flat), d);
  CHECK(r.trace.empty());
  CHECK(r.converged);
  CHECK(std::abs(normalized_authalic_energy(flat, r.map)) <= 1e-10);
}

TEST_CASE("Wolfe mode invariants") {
  const TriMesh m = generate_cap(CapKind::hemisphere, 500);
  AemOptions o;
  o.line_search.mode = LineSearchMode::wolfe;
  const AemResult r = aem_run(m, o);
  const double c2 = o.line_search.c2;
  const double lo = -1.0 / (1.0 - c2), hi = (2.0 * c2 - 1.0) / (1.0 - c2);
  CHECK(r.descent_failures == 0);
  for (const AemRecord& rec : r.trace) {
    CHECK(rec.step.wolfe.both());
    CHECK(rec.step.dphi0 < 0.0);
    CHECK(rec.step.descent_ratio >= lo - 1e-8);
    CHECK(rec.step.descent_ratio <= hi + 1e-8);
    CHECK(rec.step.energy <= rec.step.phi0);
  }
}
