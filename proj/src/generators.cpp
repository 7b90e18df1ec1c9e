#include "authalic/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <vector>

namespace authalic {

namespace {

// Uniform [0, 1) from the raw engine output; std distributions are not
// reproducible across standard libraries.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int ring_start(int r) { return r == 0 ? 0 : 1 + 3 * r * (r - 1); }
int ring_size(int r) { return r == 0 ? 1 : 6 * r; }

void stitch_rings(int inner, std::vector<Face>& faces) {
  const int outer = inner + 1;
  const int na = ring_size(inner);
  const int nb = ring_size(outer);
  const int a0 = ring_start(inner);
  const int b0 = ring_start(outer);
  if (na == 1) {
    for (int j = 0; j < nb; ++j) faces.push_back({a0, b0 + j, b0 + (j + 1) % nb});
    return;
  }
  int i = 0;
  int j = 0;
  while (i < na || j < nb) {
    // Advance whichever ring's next vertex comes first in angle; compared in
    // integers so sector-boundary ties resolve identically everywhere.
    const bool outer_first = j < nb && (i == na || static_cast<long>(j + 1) * na <=
                                                       static_cast<long>(i + 1) * nb);
    if (outer_first) {
      faces.push_back({a0 + i % na, b0 + j, b0 + (j + 1) % nb});
      ++j;
    } else {
      faces.push_back({a0 + i, b0 + j % nb, a0 + (i + 1) % na});
      ++i;
    }
  }
}

struct Bump {
  double cx, cy;
};

constexpr std::array<Bump, 5> kBumps{{{0.0, 0.0}, {0.45, 0.1}, {-0.3, 0.4}, {-0.2, -0.45}, {0.35, -0.4}}};

}  // namespace

CapKind parse_cap_kind(const std::string& name) {
  if (name == "hemisphere") return CapKind::hemisphere;
  if (name == "paraboloid") return CapKind::paraboloid;
  if (name == "bumpy_disk" || name == "bumpy-disk" || name == "bumpy") return CapKind::bumpy_disk;
  if (name == "flat_disk" || name == "flat-disk" || name == "flat") return CapKind::flat_disk;
  throw ValidationError("unknown surface kind '" + name + "'");
}

std::string to_string(CapKind kind) {
  switch (kind) {
    case CapKind::hemisphere: return "hemisphere";
    case CapKind::paraboloid: return "paraboloid";
    case CapKind::bumpy_disk: return "bumpy_disk";
    case CapKind::flat_disk: return "flat_disk";
  }
  return "unknown";
}

int cap_vertex_count(int rings) { return 1 + 3 * rings * (rings + 1); }

TriMesh generate_cap(CapKind kind, int resolution, std::uint64_t seed) {
  if (resolution < 16) throw ValidationError("resolution too small (need >= 16)");
  int rings = 2;
  while (std::abs(cap_vertex_count(rings + 1) - resolution) <= std::abs(cap_vertex_count(rings) - resolution)) {
    ++rings;
  }

  std::array<double, kBumps.size()> amplitude{};
  {
    std::mt19937_64 rng(seed);
    for (double& a : amplitude) a = (unit_uniform(rng) < 0.5 ? -1.0 : 1.0) * (0.3 + 0.3 * unit_uniform(rng));
  }
  constexpr double kBumpWidth = 0.22;

  auto lift = [&](double rho, double phi) -> Vec3 {
    const double x = rho * std::cos(phi);
    const double y = rho * std::sin(phi);
    switch (kind) {
      case CapKind::hemisphere:
        return {x, y, std::sqrt(std::max(0.0, 1.0 - rho * rho))};
      case CapKind::paraboloid:
        return {x, y, x * x + 2.0 * y * y};
      case CapKind::bumpy_disk: {
        double z = 0.0;
        for (std::size_t k = 0; k < kBumps.size(); ++k) {
          const double dx = x - kBumps[k].cx;
          const double dy = y - kBumps[k].cy;
          z += amplitude[k] * std::exp(-(dx * dx + dy * dy) / (2 * kBumpWidth * kBumpWidth));
        }
        return {x, y, z};
      }
      case CapKind::flat_disk:
        return {x, y, 0.0};
    }
    return {x, y, 0.0};
  };

  std::vector<Vec3> vertices;
  vertices.reserve(cap_vertex_count(rings));
  vertices.push_back(lift(0.0, 0.0));
  for (int r = 1; r <= rings; ++r) {
    const double rho = static_cast<double>(r) / rings;
    for (int k = 0; k < ring_size(r); ++k) {
      vertices.push_back(lift(rho, 2 * std::numbers::pi * k / ring_size(r)));
    }
  }
  std::vector<Face> faces;
  faces.reserve(6 * rings * rings);
  for (int r = 0; r < rings; ++r) stitch_rings(r, faces);
  return TriMesh::build(std::move(vertices), std::move(faces));
}

}  // namespace authalic
