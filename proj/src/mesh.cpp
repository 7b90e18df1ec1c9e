#include "authalic/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <string>
#include <unordered_map>

namespace authalic {

namespace {

constexpr double kDegenerateFaceRatio = 1e-14;

std::uint64_t edge_key(int a, int b) {
  auto lo = static_cast<std::uint64_t>(std::min(a, b));
  auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

struct EdgeUse {
  int faces[2] = {-1, -1};
  int count = 0;
};

// True if face f traverses the directed edge a -> b.
bool has_directed_edge(const Face& f, int a, int b) {
  for (int k = 0; k < 3; ++k) {
    if (f[k] == a && f[(k + 1) % 3] == b) return true;
  }
  return false;
}

}  // namespace

double triangle_area(const Vec3& p, const Vec3& q, const Vec3& r) {
  return 0.5 * (q - p).cross(r - p).norm();
}

TriMesh TriMesh::build(std::vector<Vec3> vertices, std::vector<Face> faces) {
  const int n = static_cast<int>(vertices.size());
  const int m = static_cast<int>(faces.size());
  if (n == 0 || m == 0) throw ValidationError("mesh has no faces");

  std::vector<char> referenced(n, 0);
  for (int f = 0; f < m; ++f) {
    const Face& t = faces[f];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= n) {
        throw ValidationError("face " + std::to_string(f) + " references vertex " +
                              std::to_string(t[k]) + " out of range");
      }
      referenced[t[k]] = 1;
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw ValidationError("degenerate face " + std::to_string(f) + " (repeated vertex)");
    }
  }
  for (int v = 0; v < n; ++v) {
    if (!referenced[v]) throw ValidationError("vertex " + std::to_string(v) + " is not used by any face");
  }

  std::unordered_map<std::uint64_t, EdgeUse> edges;
  edges.reserve(static_cast<std::size_t>(m) * 2);
  for (int f = 0; f < m; ++f) {
    for (int k = 0; k < 3; ++k) {
      EdgeUse& use = edges[edge_key(faces[f][k], faces[f][(k + 1) % 3])];
      if (use.count == 2) {
        throw ValidationError("non-manifold edge (" + std::to_string(faces[f][k]) + ", " +
                              std::to_string(faces[f][(k + 1) % 3]) + ") used by more than two faces");
      }
      use.faces[use.count++] = f;
    }
  }

  // Propagate the orientation of face 0 across interior edges.
  TriMesh mesh;
  std::vector<char> visited(m, 0);
  std::deque<int> queue{0};
  visited[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop_front();
    for (int k = 0; k < 3; ++k) {
      const int a = faces[f][k];
      const int b = faces[f][(k + 1) % 3];
      const EdgeUse& use = edges[edge_key(a, b)];
      if (use.count != 2) continue;
      const int g = use.faces[0] == f ? use.faces[1] : use.faces[0];
      if (visited[g]) {
        if (has_directed_edge(faces[g], a, b)) {
          throw ValidationError("mesh is not orientable");
        }
        continue;
      }
      if (has_directed_edge(faces[g], a, b)) {
        std::swap(faces[g][1], faces[g][2]);
        ++mesh.reoriented_faces_;
      }
      visited[g] = 1;
      ++reached;
      queue.push_back(g);
    }
  }
  if (reached != m) throw ValidationError("mesh is not connected");

  // Boundary half-edges follow the orientation of their single face.
  std::vector<int> next(n, -1);
  int boundary_edges = 0;
  for (int f = 0; f < m; ++f) {
    for (int k = 0; k < 3; ++k) {
      const int a = faces[f][k];
      const int b = faces[f][(k + 1) % 3];
      if (edges[edge_key(a, b)].count != 1) continue;
      if (next[a] != -1) {
        throw ValidationError("non-manifold boundary vertex " + std::to_string(a));
      }
      next[a] = b;
      ++boundary_edges;
    }
  }
  if (boundary_edges == 0) throw ValidationError("closed surface: no boundary");

  int start = -1;
  for (int v = 0; v < n; ++v) {
    if (next[v] != -1) {
      start = v;
      break;
    }
  }
  std::vector<int> loop;
  loop.reserve(boundary_edges);
  for (int v = start;;) {
    loop.push_back(v);
    v = next[v];
    if (v == -1) throw ValidationError("open boundary chain");
    if (v == start) break;
    if (static_cast<int>(loop.size()) > boundary_edges) throw ValidationError("malformed boundary");
  }
  if (static_cast<int>(loop.size()) != boundary_edges) {
    throw ValidationError("multiple boundary loops: surface is not simply connected");
  }
  const long euler = static_cast<long>(n) - static_cast<long>(edges.size()) + m;
  if (euler != 1) {
    throw ValidationError("Euler characteristic " + std::to_string(euler) +
                          " != 1: surface is not a topological disk");
  }

  mesh.face_areas_.resize(m);
  double total = 0.0;
  for (int f = 0; f < m; ++f) {
    const Face& t = faces[f];
    mesh.face_areas_[f] = triangle_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    total += mesh.face_areas_[f];
  }
  for (int f = 0; f < m; ++f) {
    if (!(mesh.face_areas_[f] >= kDegenerateFaceRatio * total)) {
      throw ValidationError("degenerate face " + std::to_string(f) + " (area " +
                            std::to_string(mesh.face_areas_[f]) + ")");
    }
  }
  mesh.total_area_ = total;

  IndexPartition& part = mesh.partition_;
  part.on_boundary.assign(n, 0);
  part.slot.assign(n, -1);
  part.boundary = std::move(loop);
  for (int i = 0; i < part.n_boundary(); ++i) {
    part.on_boundary[part.boundary[i]] = 1;
    part.slot[part.boundary[i]] = i;
  }
  for (int v = 0; v < n; ++v) {
    if (part.on_boundary[v]) continue;
    part.slot[v] = part.n_interior();
    part.interior.push_back(v);
  }

  mesh.vertices_ = std::move(vertices);
  mesh.faces_ = std::move(faces);
  return mesh;
}

ParameterizationReport validate_for_parameterization(const TriMesh& mesh, double min_angle_tolerance) {
  ParameterizationReport report;
  report.min_angle_tolerance = min_angle_tolerance;
  const auto& part = mesh.partition();
  const auto& x = mesh.vertices();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.faces()[f];
    if (part.is_boundary(t[0]) && part.is_boundary(t[1]) && part.is_boundary(t[2])) {
      report.all_boundary_faces.push_back(f);
    }
    double min_angle = std::numbers::pi;
    for (int k = 0; k < 3; ++k) {
      const Vec3 a = x[t[(k + 1) % 3]] - x[t[k]];
      const Vec3 b = x[t[(k + 2) % 3]] - x[t[k]];
      min_angle = std::min(min_angle, std::atan2(a.cross(b).norm(), a.dot(b)));
    }
    if (min_angle < min_angle_tolerance) report.small_angle_faces.push_back(f);
  }
  return report;
}

}  // namespace authalic
