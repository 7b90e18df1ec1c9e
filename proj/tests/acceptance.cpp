// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "authalic/aem.hpp"
#include "authalic/energy.hpp"
#include "authalic/generators.hpp"
#include "authalic/line_search.hpp"
#include "authalic/metrics.hpp"
#include "authalic/registration.hpp"
#include "authalic/sem.hpp"
#include "support.hpp"

using namespace authalic;
using namespace authalic::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Outcome energy_identities() {
  const auto start = Clock::now();
  const TriMesh m = generate_cap(CapKind::bumpy_disk, 500, 0);
  const DiskMap base = sem_initial_map(m);
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const DiskMap f = perturbed(base, rng, 0.02, 0.4);
    const std::vector<Vec2> p = f.vertex_positions(m.partition());
    const StretchLaplacian l = assemble_stretch_laplacian(m, p);
    const double sum = stretch_energy(m, p);
    worst = std::max(worst, std::abs(stretch_energy_quadratic(l, m.partition(), p) - sum) / std::abs(sum));
  }
  const double t = seconds_since(start);
  return {worst <= 1e-10 && t < 5.0, fmt("n=%d, max rel diff %.2e (<= 1e-10), %.2f s (< 5 s)", m.num_vertices(), worst, t)};
}

Outcome energy_floor() {
  const TriMesh m = generate_cap(CapKind::paraboloid, 500);
  const DiskMap base = sem_initial_map(m);
  std::mt19937_64 rng(103);
  double lowest = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 1000; ++trial) {
    const double jitter = 0.002 * (1 + trial % 50);
    const DiskMap f = perturbed(base, rng, jitter, 0.45);
    lowest = std::min(lowest, normalized_authalic_energy(m, f) / m.total_area());
  }
  double preserving = 0.0;
  for (int res : {100, 500, 2000}) {
    const TriMesh flat = generate_cap(CapKind::flat_disk, res);
    for (double angle : {0.0, 0.5, 2.0, -1.3}) {
      preserving = std::max(preserving, normalized_authalic_energy(flat, rotated(identity_map(flat), angle)));
    }
  }
  return {lowest >= -1e-10 && preserving <= 1e-12,
          fmt("min E/|S| over 1000 maps %.3e (>= -1e-10); max on area-preserving maps %.2e (<= 1e-12)", lowest,
              preserving)};
}

Outcome gradient_check() {
  const TriMesh m = generate_cap(CapKind::hemisphere, 500);
  AemOptions o;
  o.max_iters = 500;
  const DiskMap best = aem_run(m, o).map;
  std::mt19937_64 rng(107);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const DiskMap f = perturbed(best, rng, 1e-3, 0.05);
    const Eigen::VectorXd g = grad_authalic(m, f);
    Eigen::VectorXd fd(f.size());
    for (int k = 0; k < f.size(); ++k) {
      DiskMap plus = f, minus = f;
      plus.packed()[k] += h;
      minus.packed()[k] -= h;
      fd[k] = (normalized_authalic_energy(m, plus) - normalized_authalic_energy(m, minus)) / (2 * h);
    }
    worst = std::max(worst, (g - fd).norm() / g.norm());
  }
  std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
  double polar = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd t(60);
    for (int i = 0; i < t.size(); ++i) t[i] = u(rng);
    const Eigen::VectorXd g = polar_area_gradient(t);
    for (int k = 0; k < t.size(); ++k) {
      Eigen::VectorXd p = t, q = t;
      p[k] += h;
      q[k] -= h;
      polar = std::max(polar, std::abs((image_area_polar(p) - image_area_polar(q)) / (2 * h) - g[k]));
    }
  }
  return {worst <= 1e-6 && polar <= 1e-8,
          fmt("authalic gradient rel err %.2e (<= 1e-6, 20 configs); polar area gradient abs err %.2e (<= 1e-8)",
              worst, polar)};
}

Outcome quadratic_exactness() {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double a0 = 2 * u(rng) - 1, a1 = -(0.01 + 10 * u(rng)), a2 = 0.01 + 10 * u(rng);
    const auto phi = [&](double x) { return (a2 * x + a1) * x + a0; };
    const double sample = 0.05 + 5 * u(rng);
    const double exact = -a1 / (2 * a2);
    const StepChoice s = quadratic_step(QuadraticModel::fit(phi(0), a1, sample, phi(sample)));
    worst = std::max(worst, s.rule == StepRule::model ? std::abs(s.alpha - exact) / exact : 1.0);
  }
  return {worst <= 1e-12, fmt("max rel err %.2e over 100 quadratics (<= 1e-12)", worst)};
}

struct Comparison {
  std::string name;
  double e_aem, e_sem, sd_aem, sd_sem, t_aem, t_sem;
  int folds;
};

std::vector<Comparison> run_comparisons() {
  std::vector<Comparison> out;
  for (CapKind kind : {CapKind::hemisphere, CapKind::paraboloid, CapKind::bumpy_disk}) {
    const TriMesh m = generate_cap(kind, 2000, 0);
    auto t0 = Clock::now();
    const SemResult sem = sem_run(m, 100, true);
    const double t_sem = seconds_since(t0);
    t0 = Clock::now();
    const AemResult aem = aem_run(m);
    const double t_aem = seconds_since(t0);
    const DistortionReport ra = distortion_report(m, aem.map), rs = distortion_report(m, sem.map);
    out.push_back({to_string(kind), ra.authalic_energy, rs.authalic_energy, ra.sd_ratio, rs.sd_ratio, t_aem, t_sem,
                   ra.folding_count});
  }
  return out;
}

Outcome comparative(const std::vector<Comparison>& rows) {
  bool ok = true;
  std::string detail;
  for (const Comparison& c : rows) {
    const double re = c.e_aem / c.e_sem, rsd = c.sd_aem / c.sd_sem;
    ok = ok && re <= 0.5 && rsd <= 0.7 && c.t_aem < 30.0 && c.t_sem < 30.0;
    detail += fmt("%s E %.2e/%.2e=%.3f SD %.2e/%.2e=%.3f t %.2f/%.2f s; ", c.name.c_str(), c.e_aem, c.e_sem, re,
                  c.sd_aem, c.sd_sem, rsd, c.t_aem, c.t_sem);
  }
  return {ok, detail + "(energy ratio <= 0.5, SD ratio <= 0.7, < 30 s)"};
}

Outcome bijectivity(const std::vector<Comparison>& rows) {
  bool ok = true;
  std::string detail = "foldings:";
  for (const Comparison& c : rows) {
    ok = ok && c.folds == 0;
    detail += fmt(" %s %d", c.name.c_str(), c.folds);
  }
  return {ok, detail + " (all 0)"};
}

Outcome wolfe_invariants() {
  const TriMesh m = generate_cap(CapKind::hemisphere, 2000);
  AemOptions o;
  o.line_search.mode = LineSearchMode::wolfe;
  o.line_search.c1 = 1e-4;
  o.line_search.c2 = 0.4;
  o.grad_tol = std::numeric_limits<double>::infinity();
  const AemResult r = aem_run(m, o);
  const double c2 = o.line_search.c2;
  const double lo = -1.0 / (1.0 - c2), hi = (2.0 * c2 - 1.0) / (1.0 - c2);
  int violations = 0;
  double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin;
  for (const AemRecord& rec : r.trace) {
    const NcgRecord& s = rec.step;
    const WolfeFlags w = wolfe_check(s.phi0, s.dphi0, s.phi_alpha, s.dphi_alpha, o.line_search.c1, c2, s.alpha);
    if (!w.both()) ++violations;
    if (s.descent_ratio < lo - 1e-8 || s.descent_ratio > hi + 1e-8) ++violations;
    rmin = std::min(rmin, s.descent_ratio);
    rmax = std::max(rmax, s.descent_ratio);
  }
  const bool ok = violations == 0 && r.trace.size() == 100;
  return {ok, fmt("%zu iterations, %d violations; g^T p / |g|^2 in [%.3f, %.3f] within [%.3f, %.3f]", r.trace.size(),
                  violations, rmin, rmax, lo, hi)};
}

Outcome scaling_law() {
  const TriMesh m = generate_cap(CapKind::bumpy_disk, 1000, 2);
  const std::vector<Vec2> p = aem_run(m).map.vertex_positions(m.partition());
  const double e1 = normalized_authalic_energy_raw(m, p);
  double worst = 0.0;
  for (double s : {0.5, 2.0, 10.0}) {
    std::vector<Vec2> q = p;
    for (Vec2& x : q) x *= s;
    worst = std::max(worst, std::abs(normalized_authalic_energy_raw(m, q) - s * s * e1) / std::abs(s * s * e1));
  }
  return {worst <= 1e-10, fmt("max rel err %.2e for s in {0.5, 2, 10} (<= 1e-10)", worst)};
}

Outcome registration() {
  const TriMesh s = generate_cap(CapKind::hemisphere, 1000);
  const DiskMap f = aem_run(s).map;
  LandmarkSet lm;
  const auto& interior = s.partition().interior;
  for (int i = 0; i < 10; ++i) lm.pairs.emplace_back(interior[(2 * i + 1) * interior.size() / 20], 0);
  for (auto& [a, b] : lm.pairs) b = a;

  const RegistrationOutcome self = register_surfaces(s, f, s, f, lm);

  // Target: the same surface with shuffled vertex ids, parameterized by f
  // rotated through a known angle.
  const double angle = 0.9;
  std::vector<int> perm(s.num_vertices());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(113));
  std::vector<Vec3> tv(s.num_vertices());
  for (int v = 0; v < s.num_vertices(); ++v) tv[perm[v]] = s.vertices()[v];
  std::vector<Face> tf = s.faces();
  for (Face& t : tf) {
    for (int& v : t) v = perm[v];
  }
  const TriMesh t = TriMesh::build(tv, tf);
  const std::vector<Vec2> fp = rotated(f, angle).vertex_positions(s.partition());
  std::vector<Vec2> gp(s.num_vertices());
  for (int v = 0; v < s.num_vertices(); ++v) gp[perm[v]] = fp[v];
  const DiskMap g = DiskMap::from_positions(t.partition(), gp);
  LandmarkSet moved;
  for (const auto& [a, b] : lm.pairs) moved.pairs.emplace_back(a, perm[b]);
  const RegistrationOutcome rot = register_surfaces(s, f, t, g, moved);
  const double angle_err = std::abs(std::remainder(rot.rotation.angle - angle, 2 * M_PI));

  const std::vector<double> ts{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const auto frames = homotopy_frames(s, rot.composition.points, ts);
  const bool endpoints = frames.front() == s.vertices() && frames.back() == rot.composition.points;

  const bool ok = self.final.landmark_rms <= 1e-10 && angle_err <= 1e-6 && rot.landmark_mean_error <= 1e-3 && endpoints;
  return {ok, fmt("self RMS %.2e (<= 1e-10); rotation error %.2e rad (<= 1e-6); mean landmark error %.2e (<= 1e-3); "
                  "homotopy endpoints %s",
                  self.final.landmark_rms, angle_err, rot.landmark_mean_error, endpoints ? "exact" : "differ")};
}

Outcome performance() {
  auto timed = [](int n) {
    const TriMesh m = generate_cap(CapKind::bumpy_disk, n, 0);
    const auto t0 = Clock::now();
    AemOptions o;
    o.grad_tol = std::numeric_limits<double>::infinity();
    const AemResult r = aem_run(m, o);
    const double t = seconds_since(t0);
    return std::pair<int, double>{m.num_vertices(), r.trace.size() == 100 ? t : 1e9};
  };
  const auto [n10, t10] = timed(10000);
  std::vector<std::pair<int, double>> pts{timed(1000), timed(4000), timed(16000)};
  // Least-squares slope in log-log.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [n, t] : pts) {
    const double x = std::log(n), y = std::log(t);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(pts.size());
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return {t10 < 60.0 && slope <= 1.5,
          fmt("n=%d: %.2f s (< 60 s); times %.3f/%.3f/%.3f s at n=%d/%d/%d, exponent %.2f (<= 1.5)", n10, t10,
              pts[0].second, pts[1].second, pts[2].second, pts[0].first, pts[1].first, pts[2].first, slope)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };
  report(1, "energy identities", energy_identities);
  report(2, "energy floor", energy_floor);
  report(3, "gradient correctness", gradient_check);
  report(4, "quadratic step exactness", quadratic_exactness);
  std::vector<Comparison> rows;
  try {
    rows = run_comparisons();
  } catch (const std::exception& e) {
    std::printf("comparison runs failed: %s\n", e.what());
  }
  report(5, "AEM vs SEM distortion", [&] { return rows.size() == 3 ? comparative(rows) : Outcome{false, "no runs"}; });
  report(6, "bijectivity", [&] { return rows.size() == 3 ? bijectivity(rows) : Outcome{false, "no runs"}; });
  report(7, "Wolfe-mode invariants", wolfe_invariants);
  report(8, "scaling law", scaling_law);
  report(9, "registration", registration);
  report(10, "performance", performance);
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
