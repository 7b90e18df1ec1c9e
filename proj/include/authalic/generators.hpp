#pragma once

#include <cstdint>
#include <string>

#include "authalic/mesh.hpp"

namespace authalic {

enum class CapKind { hemisphere, paraboloid, bumpy_disk, flat_disk };

CapKind parse_cap_kind(const std::string& name);
std::string to_string(CapKind kind);

// Synthetic disk-topology surface: a ring triangulation of the unit disk
// (one center vertex, ring r holding 6r vertices) lifted by a height
// function. The ring count is chosen so the vertex count is closest to
// `resolution`. Heights over (x, y) in the unit disk:
//   hemisphere  sqrt(1 - x^2 - y^2)
//   paraboloid  x^2 + 2 y^2
//   bumpy_disk  five Gaussian bumps (width 0.22) whose signed amplitudes,
//               |a| in [0.3, 0.6), are the only thing the seed drives
//   flat_disk   0, so boundary vertices sit on the unit circle
// Throws ValidationError("resolution too small") below 16.
TriMesh generate_cap(CapKind kind, int resolution, std::uint64_t seed = 0);

// Number of vertices generate_cap produces for the given ring count.
int cap_vertex_count(int rings);

}  // namespace authalic
