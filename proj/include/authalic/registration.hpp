#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "authalic/aem.hpp"
#include "authalic/disk_map.hpp"
#include "authalic/line_search.hpp"
#include "authalic/mesh.hpp"
#include "authalic/ncg.hpp"

namespace authalic {

// Landmark pairs (source vertex on S, target vertex on T).
struct LandmarkSet {
  std::vector<std::pair<int, int>> pairs;

  int size() const { return static_cast<int>(pairs.size()); }
  // Throws ValidationError for out-of-range indices, duplicate source
  // indices or an empty set.
  void validate(int n_source, int n_target) const;

  // Text lines "src dst"; '#' starts a comment.
  static LandmarkSet read(std::istream& in);
  static LandmarkSet load(const std::filesystem::path& path);
};

struct Rotation2 {
  Eigen::Matrix2d matrix = Eigen::Matrix2d::Identity();
  double angle = 0.0;       // radians, counterclockwise
  bool degenerate = false;  // zero cross-covariance; identity returned
};

// argmin over SO(2) of sum |R src_i - dst_i|^2, through the SVD of the 2x2
// cross-covariance with the reflection corrected.
Rotation2 optimal_rotation(std::span<const Vec2> src, std::span<const Vec2> dst);

// Registration of the disk onto itself, posed on the source parameterization:
// the domain is f(S) as a planar mesh, so its face areas are |f(t)|.
struct RegistrationProblem {
  TriMesh domain;
  std::vector<int> landmark_sources;  // vertex ids of S
  std::vector<Vec2> targets;          // g at the matching target vertices
  double lambda = 0.0;
  Eigen::VectorXd bx, by;             // prescribed boundary, loop order
};

// b = R f_B. Throws ValidationError on lambda < 0 or mismatched sizes.
RegistrationProblem make_registration_problem(const TriMesh& source, const DiskMap& f,
                                              std::span<const int> landmark_sources,
                                              std::span<const Vec2> targets, double lambda,
                                              const Eigen::Matrix2d& rotation);

struct RegistrationMap {
  std::vector<Vec2> positions;  // h at every source vertex
  double lambda = 0.0;
  double energy = 0.0;          // E_S(h) + lambda sum |h(p_i) - q_i|^2
  double landmark_rms = 0.0;
};

double penalized_energy(const RegistrationProblem& problem, std::span<const Vec2> h);
double landmark_rms(const RegistrationProblem& problem, std::span<const Vec2> h);
double landmark_mean_error(const RegistrationProblem& problem, std::span<const Vec2> h);

// Solves (L_II + lambda D_II) h_I = lambda [P^T g]_I - L_IB b per coordinate,
// refreshing L = L_S(h) after every solve and starting from L_S(id).
RegistrationMap registration_fixed_point(const RegistrationProblem& problem, int iterations = 5);

struct RegistrationRecord {
  NcgRecord step;
  double landmark_rms = 0.0;
};

struct RefineResult {
  RegistrationMap map;
  std::vector<RegistrationRecord> trace;
};

// Preconditioned nonlinear CG on the penalized stretch energy over the
// interior coordinates (boundary frozen at b), gradient
// 2 (L h)_I + 2 lambda (D h - P^T g)_I, preconditioner I_2 (x) (L_II + lambda D_II)
// at the starting map.
RefineResult registration_refine(const RegistrationProblem& problem, const RegistrationMap& init, int max_iters,
                                 const LineSearchConfig& line_search = {}, double grad_tol = 0.0);

struct Composition {
  std::vector<Vec3> points;   // image of every source vertex on T
  std::vector<int> flagged;   // source vertices located farther than the tolerance
  double max_distance = 0.0;  // largest distance to g's triangulation
  double tolerance = 0.0;
};

// g^{-1} o h for every source vertex: each h position is located in g's planar
// triangulation of T and lifted barycentrically onto T's vertices. Points on
// the unit circle may fall slightly outside g's inscribed boundary polygon, so
// the tolerance is 1e-9 plus the largest sagitta of that polygon.
Composition compose_registration(const TriMesh& target, const DiskMap& g, std::span<const Vec2> h);

// (1 - t) S + t composed, per source vertex.
std::vector<std::vector<Vec3>> homotopy_frames(const TriMesh& source, std::span<const Vec3> composed,
                                               std::span<const double> t_values);

struct RegistrationOptions {
  double lambda = 1e4;
  int init_iterations = 5;
  int refine_iterations = 100;
  LineSearchConfig line_search;
};

struct RegistrationOutcome {
  Rotation2 rotation;
  RegistrationProblem problem;
  RegistrationMap initial;
  RegistrationMap final;
  std::vector<RegistrationRecord> trace;
  Composition composition;
  double landmark_mean_error = 0.0;     // disk, after refinement
  double landmark_mean_error_3d = 0.0;  // |phi(p_i) - T(q_i)| averaged
};

// Full pipeline from the two disk parameterizations f of S and g of T.
RegistrationOutcome register_surfaces(const TriMesh& source, const DiskMap& f, const TriMesh& target,
                                      const DiskMap& g, const LandmarkSet& landmarks,
                                      const RegistrationOptions& options = {});

}  // namespace authalic
