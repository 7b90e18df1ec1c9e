#include "authalic/registration.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>

#include <Eigen/SVD>

#include "authalic/energy.hpp"
#include "authalic/linalg.hpp"
#include "authalic/parallel.hpp"
#include "authalic/point_location.hpp"

namespace authalic {

namespace {

// Interior landmark data: D_II diagonal and P^T g restricted to I.
struct InteriorPenalty {
  Eigen::VectorXd d;
  Eigen::VectorXd gx, gy;
};

InteriorPenalty interior_penalty(const RegistrationProblem& p) {
  const IndexPartition& part = p.domain.partition();
  InteriorPenalty out{Eigen::VectorXd::Zero(part.n_interior()), Eigen::VectorXd::Zero(part.n_interior()),
                      Eigen::VectorXd::Zero(part.n_interior())};
  for (std::size_t i = 0; i < p.landmark_sources.size(); ++i) {
    const int v = p.landmark_sources[i];
    if (part.is_boundary(v)) continue;
    const int s = part.slot[v];
    out.d[s] += 1.0;
    out.gx[s] += p.targets[i].x();
    out.gy[s] += p.targets[i].y();
  }
  return out;
}

SparseMatrix shifted_block(const SparseMatrix& ii, double lambda, const Eigen::VectorXd& d) {
  if (lambda == 0.0) return ii;
  SparseMatrix diag(ii.rows(), ii.cols());
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] != 0.0) t.emplace_back(i, i, lambda * d[i]);
  }
  diag.setFromTriplets(t.begin(), t.end());
  return ii + diag;
}

// Positions of every vertex with the interior taken from (x, y) and the
// boundary from b.
void fill_positions(const RegistrationProblem& p, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y, std::vector<Vec2>& out) {
  const IndexPartition& part = p.domain.partition();
  out.resize(part.n_vertices());
  for (int i = 0; i < part.n_interior(); ++i) out[part.interior[i]] = {x[i], y[i]};
  for (int i = 0; i < part.n_boundary(); ++i) out[part.boundary[i]] = {p.bx[i], p.by[i]};
}

RegistrationMap make_map(const RegistrationProblem& p, std::vector<Vec2> positions) {
  RegistrationMap m;
  m.lambda = p.lambda;
  m.energy = penalized_energy(p, positions);
  m.landmark_rms = landmark_rms(p, positions);
  m.positions = std::move(positions);
  return m;
}

}  // namespace

void LandmarkSet::validate(int n_source, int n_target) const {
  if (pairs.empty()) throw ValidationError("landmark set is empty");
  std::unordered_set<int> seen;
  for (const auto& [s, t] : pairs) {
    if (s < 0 || s >= n_source) throw ValidationError("landmark source index " + std::to_string(s) + " out of range");
    if (t < 0 || t >= n_target) throw ValidationError("landmark target index " + std::to_string(t) + " out of range");
    if (!seen.insert(s).second) throw ValidationError("duplicate landmark source index " + std::to_string(s));
  }
}

LandmarkSet LandmarkSet::read(std::istream& in) {
  LandmarkSet set;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long s = 0;
    long long t = 0;
    if (!(fields >> s)) continue;
    std::string rest;
    if (!(fields >> t) || (fields >> rest)) {
      throw IoError("landmark file line " + std::to_string(line_no) + ": expected 'src dst'");
    }
    set.pairs.emplace_back(static_cast<int>(s), static_cast<int>(t));
  }
  return set;
}

LandmarkSet LandmarkSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open landmark file " + path.string());
  return read(in);
}

Rotation2 optimal_rotation(std::span<const Vec2> src, std::span<const Vec2> dst) {
  if (src.size() != dst.size() || src.empty()) throw ValidationError("optimal_rotation needs matching nonempty sets");
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  double scale = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    h += src[i] * dst[i].transpose();
    scale += src[i].norm() * dst[i].norm();
  }
  Rotation2 r;
  if (!(h.norm() > 1e-14 * scale) || scale == 0.0) {
    r.degenerate = true;
    return r;
  }
  const Eigen::JacobiSVD<Eigen::Matrix2d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix2d correction = Eigen::Matrix2d::Identity();
  correction(1, 1) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  r.matrix = svd.matrixV() * correction * svd.matrixU().transpose();
  r.angle = std::atan2(r.matrix(1, 0), r.matrix(0, 0));
  return r;
}

RegistrationProblem make_registration_problem(const TriMesh& source, const DiskMap& f,
                                              std::span<const int> landmark_sources,
                                              std::span<const Vec2> targets, double lambda,
                                              const Eigen::Matrix2d& rotation) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be finite and nonnegative");
  if (landmark_sources.size() != targets.size()) throw ValidationError("landmark and target counts differ");
  const IndexPartition& part = source.partition();
  const std::vector<Vec2> image = f.vertex_positions(part);
  std::vector<Vec3> planar(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) planar[i] = {image[i].x(), image[i].y(), 0.0};

  RegistrationProblem p{TriMesh::build(std::move(planar), source.faces()), {}, {}, lambda, {}, {}};
  if (p.domain.partition().boundary != part.boundary || p.domain.partition().interior != part.interior) {
    throw NumericError("source parameterization is not orientation preserving");
  }
  p.landmark_sources.assign(landmark_sources.begin(), landmark_sources.end());
  p.targets.assign(targets.begin(), targets.end());
  const int nb = part.n_boundary();
  p.bx.resize(nb);
  p.by.resize(nb);
  for (int i = 0; i < nb; ++i) {
    const Vec2 b = rotation * f.boundary_point(i);
    p.bx[i] = b.x();
    p.by[i] = b.y();
  }
  return p;
}

double penalized_energy(const RegistrationProblem& p, std::span<const Vec2> h) {
  double penalty = 0.0;
  for (std::size_t i = 0; i < p.landmark_sources.size(); ++i) {
    penalty += (h[p.landmark_sources[i]] - p.targets[i]).squaredNorm();
  }
  return stretch_energy(p.domain, h) + p.lambda * penalty;
}

double landmark_rms(const RegistrationProblem& p, std::span<const Vec2> h) {
  if (p.landmark_sources.empty()) return 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < p.landmark_sources.size(); ++i) {
    ss += (h[p.landmark_sources[i]] - p.targets[i]).squaredNorm();
  }
  return std::sqrt(ss / static_cast<double>(p.landmark_sources.size()));
}

double landmark_mean_error(const RegistrationProblem& p, std::span<const Vec2> h) {
  if (p.landmark_sources.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.landmark_sources.size(); ++i) sum += (h[p.landmark_sources[i]] - p.targets[i]).norm();
  return sum / static_cast<double>(p.landmark_sources.size());
}

RegistrationMap registration_fixed_point(const RegistrationProblem& p, int iterations) {
  if (iterations < 1) throw ValidationError("iterations must be at least 1");
  const InteriorPenalty pen = interior_penalty(p);
  const double lambda = p.lambda;
  StretchLaplacian l = identity_laplacian(p.domain);
  std::vector<Vec2> positions;
  Eigen::VectorXd hx, hy;
  for (int k = 1; k <= iterations; ++k) {
    const CholeskyFactor factor = CholeskyFactor::factorize(shifted_block(l.ii, lambda, pen.d));
    if (lambda == 0.0) {
      hx = factor.solve(-(l.ib * p.bx));
      hy = factor.solve(-(l.ib * p.by));
    } else {
      hx = factor.solve(lambda * pen.gx - l.ib * p.bx);
      hy = factor.solve(lambda * pen.gy - l.ib * p.by);
    }
    fill_positions(p, hx, hy, positions);
    if (k < iterations) l = assemble_stretch_laplacian(p.domain, std::span<const Vec2>(positions));
  }
  return make_map(p, std::move(positions));
}

RefineResult registration_refine(const RegistrationProblem& p, const RegistrationMap& init, int max_iters,
                                 const LineSearchConfig& line_search, double grad_tol) {
  if (max_iters < 0) throw ValidationError("max_iters must be nonnegative");
  const IndexPartition& part = p.domain.partition();
  const int ni = part.n_interior();
  const InteriorPenalty pen = interior_penalty(p);
  const double lambda = p.lambda;

  RefineResult result;
  if (ni == 0) {
    result.map = init;
    return result;
  }
  const StretchLaplacian l0 = assemble_stretch_laplacian(p.domain, std::span<const Vec2>(init.positions));
  const CholeskyFactor precond = CholeskyFactor::factorize(shifted_block(l0.ii, lambda, pen.d));

  auto positions_of = [&](const Eigen::VectorXd& x) {
    std::vector<Vec2> pos;
    fill_positions(p, x.segment(0, ni), x.segment(ni, ni), pos);
    return pos;
  };

  NcgProblem problem;
  problem.value = [&](const Eigen::VectorXd& x) -> std::optional<double> {
    if (!x.allFinite()) return std::nullopt;
    return penalized_energy(p, positions_of(x));
  };
  problem.evaluate = [&](const Eigen::VectorXd& x) -> std::optional<NcgEvaluation> {
    if (!x.allFinite()) return std::nullopt;
    const std::vector<Vec2> pos = positions_of(x);
    const StretchLaplacian l = assemble_stretch_laplacian(p.domain, std::span<const Vec2>(pos));
    const auto hx = x.segment(0, ni);
    const auto hy = x.segment(ni, ni);
    NcgEvaluation e;
    e.value = penalized_energy(p, pos);
    e.gradient.resize(2 * ni);
    e.gradient.segment(0, ni) = 2.0 * (l.ii * hx + l.ib * p.bx) + 2.0 * lambda * (pen.d.cwiseProduct(hx) - pen.gx);
    e.gradient.segment(ni, ni) = 2.0 * (l.ii * hy + l.ib * p.by) + 2.0 * lambda * (pen.d.cwiseProduct(hy) - pen.gy);
    e.clamps = l.clamped_faces;
    return e;
  };
  problem.precondition = [&](const Eigen::VectorXd& g) {
    Eigen::VectorXd h(g.size());
    h.segment(0, ni) = precond.solve(g.segment(0, ni));
    h.segment(ni, ni) = precond.solve(g.segment(ni, ni));
    return h;
  };

  NcgOptions options;
  options.line_search = line_search;
  options.max_iters = max_iters;
  options.grad_tol = grad_tol;
  options.restart_period = 2 * (2 * ni);

  Eigen::VectorXd x0(2 * ni);
  for (int i = 0; i < ni; ++i) {
    x0[i] = init.positions[part.interior[i]].x();
    x0[ni + i] = init.positions[part.interior[i]].y();
  }
  PreconditionedNcg solver(problem, options);
  solver.initialize(x0);
  while (!solver.finished()) {
    RegistrationRecord rec;
    rec.step = solver.step();
    rec.landmark_rms = landmark_rms(p, positions_of(solver.state().x));
    result.trace.push_back(rec);
  }
  result.map = make_map(p, positions_of(solver.state().x));
  return result;
}

Composition compose_registration(const TriMesh& target, const DiskMap& g, std::span<const Vec2> h) {
  const IndexPartition& part = target.partition();
  std::vector<Vec2> positions = g.vertex_positions(part);
  double sagitta = 0.0;
  for (int i = 0; i < part.n_boundary(); ++i) {
    const Vec2 mid = 0.5 * (positions[part.boundary[i]] + positions[part.boundary[(i + 1) % part.n_boundary()]]);
    sagitta = std::max(sagitta, 1.0 - mid.norm());
  }
  const PlanarLocator locator(std::move(positions), target.faces());

  Composition out;
  out.tolerance = 1e-9 + sagitta;
  out.points.resize(h.size());
  std::vector<double> distance(h.size(), 0.0);
  parallel_chunks(h.size(), 1024, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      const Location loc = locator.locate(h[v]);
      const Face& t = target.faces()[loc.face];
      out.points[v] = loc.weights[0] * target.vertices()[t[0]] + loc.weights[1] * target.vertices()[t[1]] +
                      loc.weights[2] * target.vertices()[t[2]];
      distance[v] = loc.distance;
    }
  });
  for (std::size_t v = 0; v < h.size(); ++v) {
    out.max_distance = std::max(out.max_distance, distance[v]);
    if (distance[v] > out.tolerance) out.flagged.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::vector<Vec3>> homotopy_frames(const TriMesh& source, std::span<const Vec3> composed,
                                               std::span<const double> t_values) {
  const auto& s = source.vertices();
  if (composed.size() != s.size()) throw ValidationError("composed surface does not match the source mesh");
  std::vector<std::vector<Vec3>> frames;
  frames.reserve(t_values.size());
  for (double t : t_values) {
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("homotopy parameter outside [0, 1]");
    std::vector<Vec3> frame(s.size());
    for (std::size_t v = 0; v < s.size(); ++v) frame[v] = (1.0 - t) * s[v] + t * composed[v];
    frames.push_back(std::move(frame));
  }
  return frames;
}

RegistrationOutcome register_surfaces(const TriMesh& source, const DiskMap& f, const TriMesh& target,
                                      const DiskMap& g, const LandmarkSet& landmarks,
                                      const RegistrationOptions& options) {
  landmarks.validate(source.num_vertices(), target.num_vertices());
  const std::vector<Vec2> fpos = f.vertex_positions(source.partition());
  const std::vector<Vec2> gpos = g.vertex_positions(target.partition());
  std::vector<int> sources;
  std::vector<Vec2> src, dst;
  for (const auto& [s, t] : landmarks.pairs) {
    sources.push_back(s);
    src.push_back(fpos[s]);
    dst.push_back(gpos[t]);
  }

  RegistrationOutcome out;
  out.rotation = optimal_rotation(src, dst);
  out.problem = make_registration_problem(source, f, sources, dst, options.lambda, out.rotation.matrix);
  out.initial = registration_fixed_point(out.problem, options.init_iterations);
  if (options.refine_iterations > 0) {
    RefineResult refined = registration_refine(out.problem, out.initial, options.refine_iterations, options.line_search);
    out.final = std::move(refined.map);
    out.trace = std::move(refined.trace);
  } else {
    out.final = out.initial;
  }
  out.landmark_mean_error = landmark_mean_error(out.problem, out.final.positions);
  out.composition = compose_registration(target, g, out.final.positions);
  double sum = 0.0;
  for (const auto& [s, t] : landmarks.pairs) sum += (out.composition.points[s] - target.vertices()[t]).norm();
  out.landmark_mean_error_3d = sum / static_cast<double>(landmarks.size());
  return out;
}

}  // namespace authalic
