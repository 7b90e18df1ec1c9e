#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "authalic/mesh.hpp"

namespace authalic {

enum class MeshFormat { off, obj };

// Parses "off" / "obj" (case-insensitive). Throws ValidationError otherwise.
MeshFormat parse_mesh_format(const std::string& name);

// Format implied by the file extension, if recognized.
std::optional<MeshFormat> format_from_extension(const std::filesystem::path& path);

// Unvalidated indexed triangle soup, as read from disk.
struct TriangleSoup {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
};

// Readers reject non-triangle faces. Errors are IoError for malformed text.
TriangleSoup read_off(std::istream& in);
TriangleSoup read_obj(std::istream& in);

// Loads and validates. Missing or unreadable files raise IoError; topology
// problems raise ValidationError.
TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriMesh load_mesh(const std::filesystem::path& path);

void write_off(std::ostream& out, std::span<const Vec3> vertices, std::span<const Face> faces);
// When uv is non-empty it must hold one point per vertex; faces then
// reference matching `vt` entries.
void write_obj(std::ostream& out, std::span<const Vec3> vertices, std::span<const Face> faces,
               std::span<const Vec2> uv = {});

void write_mesh(const std::filesystem::path& path, const TriMesh& mesh, MeshFormat format,
                std::span<const Vec2> uv = {});
void write_mesh(const std::filesystem::path& path, std::span<const Vec3> vertices,
                std::span<const Face> faces, MeshFormat format, std::span<const Vec2> uv = {});

}  // namespace authalic
