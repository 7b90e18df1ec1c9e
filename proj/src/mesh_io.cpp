#include "authalic/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace authalic {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Next line that is neither blank nor a '#' comment, with trailing comments
// removed.
bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

int parse_obj_index(const std::string& token, int vertex_count, int line_no) {
  const std::string head = token.substr(0, token.find('/'));
  int index = 0;
  try {
    std::size_t used = 0;
    index = std::stoi(head, &used);
    if (used != head.size()) throw std::invalid_argument(head);
  } catch (const std::exception&) {
    throw IoError("obj line " + std::to_string(line_no) + ": bad face index '" + token + "'");
  }
  if (index < 0) return vertex_count + index;
  if (index == 0) throw IoError("obj line " + std::to_string(line_no) + ": face index 0");
  return index - 1;
}

void write_point(std::ostream& out, const Vec3& p) {
  out << p.x() << ' ' << p.y() << ' ' << p.z();
}

}  // namespace

MeshFormat parse_mesh_format(const std::string& name) {
  const std::string s = lowercase(name);
  if (s == "off") return MeshFormat::off;
  if (s == "obj") return MeshFormat::obj;
  throw ValidationError("unknown mesh format '" + name + "'");
}

std::optional<MeshFormat> format_from_extension(const std::filesystem::path& path) {
  const std::string ext = lowercase(path.extension().string());
  if (ext == ".off") return MeshFormat::off;
  if (ext == ".obj") return MeshFormat::obj;
  return std::nullopt;
}

TriangleSoup read_off(std::istream& in) {
  TriangleSoup soup;
  std::string line;
  if (!next_content_line(in, line)) throw IoError("off: empty input");
  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic != "OFF") throw IoError("off: missing OFF header");
  long nv = -1, nf = -1, ne = 0;
  if (!(header >> nv)) {
    if (!next_content_line(in, line)) throw IoError("off: missing counts");
    std::istringstream counts(line);
    counts >> nv;
    counts >> nf >> ne;
  } else {
    header >> nf >> ne;
  }
  if (nv < 0 || nf < 0) throw IoError("off: bad vertex/face counts");

  soup.vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    if (!next_content_line(in, line)) throw IoError("off: truncated vertex list");
    std::istringstream row(line);
    double x, y, z;
    if (!(row >> x >> y >> z)) throw IoError("off: bad vertex " + std::to_string(i));
    soup.vertices.emplace_back(x, y, z);
  }
  soup.faces.reserve(nf);
  for (long i = 0; i < nf; ++i) {
    if (!next_content_line(in, line)) throw IoError("off: truncated face list");
    std::istringstream row(line);
    int k = 0;
    if (!(row >> k)) throw IoError("off: bad face " + std::to_string(i));
    if (k != 3) {
      throw ValidationError("off: face " + std::to_string(i) + " has " + std::to_string(k) +
                            " vertices; only triangles are accepted");
    }
    Face f;
    if (!(row >> f[0] >> f[1] >> f[2])) throw IoError("off: bad face " + std::to_string(i));
    soup.faces.push_back(f);
  }
  return soup;
}

TriangleSoup read_obj(std::istream& in) {
  TriangleSoup soup;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::string tag;
    if (!(row >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(row >> x >> y >> z)) throw IoError("obj line " + std::to_string(line_no) + ": bad vertex");
      soup.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<std::string> tokens;
      for (std::string t; row >> t;) tokens.push_back(t);
      if (tokens.size() != 3) {
        throw ValidationError("obj line " + std::to_string(line_no) + ": face with " +
                              std::to_string(tokens.size()) + " vertices; only triangles are accepted");
      }
      const int count = static_cast<int>(soup.vertices.size());
      soup.faces.push_back({parse_obj_index(tokens[0], count, line_no),
                            parse_obj_index(tokens[1], count, line_no),
                            parse_obj_index(tokens[2], count, line_no)});
    }
  }
  return soup;
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file '" + path.string() + "'");
  TriangleSoup soup = format == MeshFormat::off ? read_off(in) : read_obj(in);
  return TriMesh::build(std::move(soup.vertices), std::move(soup.faces));
}

TriMesh load_mesh(const std::filesystem::path& path) {
  auto format = format_from_extension(path);
  if (!format) throw IoError("cannot infer mesh format from '" + path.string() + "'");
  return load_mesh(path, *format);
}

void write_off(std::ostream& out, std::span<const Vec3> vertices, std::span<const Face> faces) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "OFF\n" << vertices.size() << ' ' << faces.size() << " 0\n";
  for (const Vec3& p : vertices) {
    write_point(out, p);
    out << '\n';
  }
  for (const Face& f : faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

void write_obj(std::ostream& out, std::span<const Vec3> vertices, std::span<const Face> faces,
               std::span<const Vec2> uv) {
  if (!uv.empty() && uv.size() != vertices.size()) {
    throw ValidationError("obj writer: uv count does not match vertex count");
  }
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const Vec3& p : vertices) {
    out << "v ";
    write_point(out, p);
    out << '\n';
  }
  for (const Vec2& t : uv) out << "vt " << t.x() << ' ' << t.y() << '\n';
  for (const Face& f : faces) {
    out << 'f';
    for (int k = 0; k < 3; ++k) {
      out << ' ' << f[k] + 1;
      if (!uv.empty()) out << '/' << f[k] + 1;
    }
    out << '\n';
  }
}

void write_mesh(const std::filesystem::path& path, std::span<const Vec3> vertices,
                std::span<const Face> faces, MeshFormat format, std::span<const Vec2> uv) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  if (format == MeshFormat::off) {
    write_off(out, vertices, faces);
  } else {
    write_obj(out, vertices, faces, uv);
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_mesh(const std::filesystem::path& path, const TriMesh& mesh, MeshFormat format,
                std::span<const Vec2> uv) {
  write_mesh(path, mesh.vertices(), mesh.faces(), format, uv);
}

}  // namespace authalic
