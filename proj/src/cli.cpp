#include "authalic/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "authalic/aem.hpp"
#include "authalic/generators.hpp"
#include "authalic/mesh_io.hpp"
#include "authalic/metrics.hpp"
#include "authalic/registration.hpp"
#include "authalic/sem.hpp"
#include "authalic/trace_io.hpp"

namespace authalic {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr const char* kSyntheticPrefix = "synthetic:";
constexpr int kDefaultSyntheticResolution = 2000;

// Bad flag values detected after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::string output;
  std::string algorithm = "aem";
  int iterations = 100;
  std::string line_search = "quadratic";
  double c1 = 1e-4;
  double c2 = 0.4;
  double alpha0 = 2.0;
  double lambda = 1e4;
  std::uint64_t seed = 0;
  std::string report_dir;
  std::string format;
  int bins = 100;
  int param_iterations = 100;
};

LineSearchConfig line_search_config(const RunConfig& c) {
  LineSearchConfig ls;
  try {
    ls.mode = parse_line_search_mode(c.line_search);
    ls.c1 = c.c1;
    ls.c2 = c.c2;
    ls.alpha0 = c.alpha0;
    ls.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  return ls;
}

void check_algorithm(const RunConfig& c) {
  if (c.algorithm != "aem" && c.algorithm != "sem") throw UsageError("--alg must be aem or sem");
}

// "synthetic:<kind>[:<resolution>]" generates a cap with the run's seed;
// anything else is a mesh file.
TriMesh load_input(const std::string& where, const RunConfig& c) {
  if (where.rfind(kSyntheticPrefix, 0) == 0) {
    std::string rest = where.substr(std::string(kSyntheticPrefix).size());
    int resolution = kDefaultSyntheticResolution;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      try {
        resolution = std::stoi(rest.substr(colon + 1));
      } catch (const std::exception&) {
        throw UsageError("bad synthetic resolution in '" + where + "'");
      }
      rest.erase(colon);
    }
    return generate_cap(parse_cap_kind(rest), resolution, c.seed);
  }
  if (!c.format.empty()) return load_mesh(where, parse_mesh_format(c.format));
  return load_mesh(where);
}

fs::path report_dir(const RunConfig& c, const fs::path& fallback) {
  fs::path dir = c.report_dir.empty() ? fallback : fs::path(c.report_dir);
  if (dir.empty()) dir = ".";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create report directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out = open_output(path);
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json mesh_json(const TriMesh& mesh) {
  return {{"vertices", mesh.num_vertices()},
          {"faces", mesh.num_faces()},
          {"boundary_vertices", mesh.partition().n_boundary()},
          {"interior_vertices", mesh.partition().n_interior()},
          {"total_area", mesh.total_area()}};
}

void warn_for_parameterization(const TriMesh& mesh, std::ostream& err) {
  const ParameterizationReport rep = validate_for_parameterization(mesh);
  if (!rep.all_boundary_faces.empty()) {
    err << "warning: " << rep.all_boundary_faces.size() << " face(s) have no interior vertex\n";
  }
  if (!rep.small_angle_faces.empty()) {
    err << "warning: " << rep.small_angle_faces.size() << " face(s) have an angle below "
        << rep.min_angle_tolerance << " rad\n";
  }
}

// Parameterization by the selected algorithm, with a uniform summary.
struct Parameterized {
  DiskMap map;
  double seconds = 0.0;
  int iterations = 0;
  bool converged = false;
  int restarts = 0;
  int clamped_faces = 0;
  std::optional<AemResult> aem;
  std::optional<SemResult> sem;
};

Parameterized parameterize(const TriMesh& mesh, const RunConfig& c, int iterations) {
  Parameterized p;
  const auto start = Clock::now();
  if (c.algorithm == "aem") {
    AemOptions options;
    options.line_search = line_search_config(c);
    options.max_iters = iterations;
    AemResult r = aem_run(mesh, options);
    p.seconds = seconds_since(start);
    p.map = r.map;
    p.iterations = static_cast<int>(r.trace.size());
    p.converged = r.converged;
    p.restarts = r.restarts;
    p.clamped_faces = r.trace.empty() ? 0 : r.trace.back().step.clamps;
    p.aem = std::move(r);
  } else {
    SemResult r = sem_run(mesh, iterations, true);
    p.seconds = seconds_since(start);
    p.map = r.map;
    p.iterations = r.iterations_run;
    p.sem = std::move(r);
  }
  return p;
}

std::vector<Vec2> planar_positions(const TriMesh& mesh, const DiskMap& map) {
  return map.vertex_positions(mesh.partition());
}

std::vector<Vec3> lifted(std::span<const Vec2> uv) {
  std::vector<Vec3> out(uv.size());
  for (std::size_t i = 0; i < uv.size(); ++i) out[i] = {uv[i].x(), uv[i].y(), 0.0};
  return out;
}

int cmd_parameterize(const RunConfig& c, std::ostream& out, std::ostream& err) {
  check_algorithm(c);
  line_search_config(c);
  const TriMesh mesh = load_input(c.inputs.at(0), c);
  warn_for_parameterization(mesh, err);

  const Parameterized p = parameterize(mesh, c, c.iterations);
  const DistortionReport rep = distortion_report(mesh, p.map, c.bins);

  const fs::path output(c.output);
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  const std::vector<Vec2> uv = planar_positions(mesh, p.map);
  if (format_from_extension(output) == MeshFormat::off) {
    write_mesh(output, lifted(uv), mesh.faces(), MeshFormat::off);
  } else {
    write_mesh(output, mesh, MeshFormat::obj, uv);
  }

  const fs::path dir = report_dir(c, output.parent_path());
  const std::string stem = output.stem().string();
  json summary = json::parse(summary_json(rep));
  summary["command"] = "parameterize";
  summary["algorithm"] = c.algorithm;
  summary["input"] = c.inputs.at(0);
  summary["mesh"] = mesh_json(mesh);
  summary["iterations"] = p.iterations;
  summary["converged"] = p.converged;
  summary["restarts"] = p.restarts;
  summary["clamped_faces"] = p.clamped_faces;
  summary["line_search"] = c.algorithm == "aem" ? c.line_search : "none";
  summary["wall_time_seconds"] = p.seconds;
  write_text(dir / (stem + ".summary.json"), summary.dump(2) + "\n");
  {
    std::ofstream trace = open_output(dir / (stem + ".trace.csv"));
    std::ofstream lines = open_output(dir / (stem + ".trace.jsonl"));
    if (p.aem) {
      write_aem_trace_csv(trace, *p.aem);
      write_aem_trace_jsonl(lines, *p.aem);
    } else {
      write_sem_trace_csv(trace, *p.sem);
      write_sem_trace_jsonl(lines, *p.sem);
    }
  }
  {
    std::ofstream ratios = open_output(dir / (stem + ".ratios.csv"));
    write_ratios_csv(ratios, rep);
    std::ofstream hist = open_output(dir / (stem + ".histogram.dat"));
    write_histogram(hist, rep.histogram);
  }

  out << c.algorithm << ": energy " << rep.authalic_energy << ", SD " << rep.sd_ratio << ", foldings "
      << rep.folding_count << ", " << p.iterations << " iterations, " << p.seconds << " s\n";
  if (!rep.boundary_order_preserved) err << "warning: boundary angles are not in cyclic order\n";
  return kExitOk;
}

int cmd_compare(const RunConfig& c, std::ostream& out, std::ostream& err) {
  line_search_config(c);
  const TriMesh mesh = load_input(c.inputs.at(0), c);
  warn_for_parameterization(mesh, err);

  struct Row {
    std::string name;
    DistortionReport rep;
    double seconds;
  };
  std::vector<Row> rows;
  for (const char* alg : {"sem", "aem"}) {
    RunConfig rc = c;
    rc.algorithm = alg;
    const Parameterized p = parameterize(mesh, rc, c.iterations);
    rows.push_back({alg, distortion_report(mesh, p.map, c.bins), p.seconds});
  }

  const fs::path dir = report_dir(c, ".");
  std::ofstream csv = open_output(dir / "compare.csv");
  csv << "algorithm,sd_ratio,authalic_energy,time_seconds,foldings\n" << std::setprecision(17);
  for (const Row& r : rows) {
    csv << r.name << ',' << r.rep.sd_ratio << ',' << r.rep.authalic_energy << ',' << r.seconds << ','
        << r.rep.folding_count << '\n';
  }

  out << std::left << std::setw(10) << "algorithm" << std::right << std::setw(14) << "SD ratio" << std::setw(14)
      << "energy" << std::setw(12) << "time (s)" << std::setw(10) << "foldings" << '\n';
  for (const Row& r : rows) {
    out << std::left << std::setw(10) << r.name << std::right << std::scientific << std::setprecision(4)
        << std::setw(14) << r.rep.sd_ratio << std::setw(14) << r.rep.authalic_energy << std::fixed
        << std::setprecision(3) << std::setw(12) << r.seconds << std::setw(10) << r.rep.folding_count << '\n';
  }
  out.unsetf(std::ios::floatfield);
  return kExitOk;
}

int cmd_register(const RunConfig& c, std::ostream& out, std::ostream& err) {
  check_algorithm(c);
  const LineSearchConfig ls = line_search_config(c);
  if (!(c.lambda >= 0.0)) throw UsageError("--lambda must be nonnegative");
  const TriMesh source = load_input(c.inputs.at(0), c);
  const TriMesh target = load_input(c.inputs.at(1), c);
  const LandmarkSet landmarks = LandmarkSet::load(c.inputs.at(2));
  landmarks.validate(source.num_vertices(), target.num_vertices());

  const auto start = Clock::now();
  const Parameterized f = parameterize(source, c, c.param_iterations);
  const Parameterized g = parameterize(target, c, c.param_iterations);
  RegistrationOptions options;
  options.lambda = c.lambda;
  options.refine_iterations = c.iterations;
  options.line_search = ls;
  const RegistrationOutcome reg = register_surfaces(source, f.map, target, g.map, landmarks, options);
  const double seconds = seconds_since(start);

  const fs::path dir(c.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  write_mesh(dir / "registration_map.obj", source, MeshFormat::obj, reg.final.positions);
  write_mesh(dir / "composed.obj", reg.composition.points, source.faces(), MeshFormat::obj);
  const std::vector<double> schedule = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const auto frames = homotopy_frames(source, reg.composition.points, schedule);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "homotopy_%02zu.obj", i);
    write_mesh(dir / name, frames[i], source.faces(), MeshFormat::obj);
  }
  {
    std::ofstream trace = open_output(dir / "registration_trace.csv");
    write_registration_trace_csv(trace, reg.trace);
  }

  json report = {{"command", "register"},
                 {"source", c.inputs.at(0)},
                 {"target", c.inputs.at(1)},
                 {"landmarks", landmarks.size()},
                 {"lambda", c.lambda},
                 {"rotation_angle", reg.rotation.angle},
                 {"rotation_degenerate", reg.rotation.degenerate},
                 {"initial_landmark_rms", reg.initial.landmark_rms},
                 {"landmark_rms", reg.final.landmark_rms},
                 {"landmark_mean_error", reg.landmark_mean_error},
                 {"landmark_mean_error_3d", reg.landmark_mean_error_3d},
                 {"initial_energy", reg.initial.energy},
                 {"energy", reg.final.energy},
                 {"refine_iterations", reg.trace.size()},
                 {"flagged_vertices", reg.composition.flagged},
                 {"max_location_distance", reg.composition.max_distance},
                 {"homotopy_t", schedule},
                 {"wall_time_seconds", seconds}};
  write_text(dir / "landmark_report.json", report.dump(2) + "\n");

  if (reg.rotation.degenerate) err << "warning: landmark cross-covariance vanished; identity rotation used\n";
  if (!reg.composition.flagged.empty()) {
    err << "warning: " << reg.composition.flagged.size() << " vertex image(s) fell outside the target disk\n";
  }
  out << "registration: landmark RMS " << reg.final.landmark_rms << " (initial " << reg.initial.landmark_rms
      << "), rotation " << reg.rotation.angle << " rad, " << seconds << " s\n";
  return kExitOk;
}

int cmd_generate(const RunConfig& c, std::ostream& out) {
  const TriMesh mesh = generate_cap(parse_cap_kind(c.inputs.at(0)), std::stoi(c.inputs.at(1)), c.seed);
  const fs::path output(c.output);
  MeshFormat format = MeshFormat::off;
  if (!c.format.empty()) {
    format = parse_mesh_format(c.format);
  } else if (auto f = format_from_extension(output)) {
    format = *f;
  }
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  write_mesh(output, mesh, format);
  out << "wrote " << mesh.num_vertices() << " vertices, " << mesh.num_faces() << " faces to " << output.string()
      << '\n';
  return kExitOk;
}

void add_solver_flags(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--alg", c.algorithm, "Algorithm: aem (conjugate gradient) or sem (fixed point)")
      ->check(CLI::IsMember({"aem", "sem"}));
  cmd->add_option("--line-search", c.line_search, "Step rule: quadratic or wolfe")
      ->check(CLI::IsMember({"quadratic", "wolfe"}));
  cmd->add_option("--c1", c.c1, "Sufficient-decrease constant");
  cmd->add_option("--c2", c.c2, "Curvature constant");
  cmd->add_option("--alpha0", c.alpha0, "Initial step length");
  cmd->add_option("--seed", c.seed, "Seed for synthetic inputs");
  cmd->add_option("--format", c.format, "Input mesh format override (off or obj)")
      ->check(CLI::IsMember({"off", "obj"}));
  cmd->add_option("--report-dir", c.report_dir, "Directory for reports");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Area-preserving disk parameterization and landmark registration of triangle meshes"};
  app.require_subcommand(1);

  auto* param = app.add_subcommand("parameterize", "Map a disk-topology mesh onto the unit disk");
  c.inputs.resize(1);
  param->add_option("input", c.inputs[0], "Input mesh (.off/.obj) or synthetic:<kind>[:<n>]")->required();
  param->add_option("output", c.output, "Output mesh; OBJ carries the disk map as vt coordinates")->required();
  param->add_option("--iters", c.iterations, "Iteration count")->check(CLI::PositiveNumber);
  param->add_option("--bins", c.bins, "Histogram bins")->check(CLI::PositiveNumber);
  add_solver_flags(param, c);

  auto* compare = app.add_subcommand("compare", "Run both algorithms with the same budget");
  std::string compare_input;
  compare->add_option("input", compare_input, "Input mesh or synthetic:<kind>[:<n>]")->required();
  compare->add_option("--iters", c.iterations, "Iteration count")->check(CLI::PositiveNumber);
  add_solver_flags(compare, c);

  auto* reg = app.add_subcommand("register", "Landmark-aligned area-preserving registration");
  std::string src, dst, lm;
  reg->add_option("source", src, "Source mesh")->required();
  reg->add_option("target", dst, "Target mesh")->required();
  reg->add_option("landmarks", lm, "Landmark file: lines 'src dst'")->required();
  reg->add_option("output_dir", c.output, "Output directory")->required();
  reg->add_option("--lambda", c.lambda, "Landmark penalty weight");
  reg->add_option("--iters", c.iterations, "Refinement iterations")->check(CLI::NonNegativeNumber);
  reg->add_option("--param-iters", c.param_iterations, "Parameterization iterations")->check(CLI::PositiveNumber);
  add_solver_flags(reg, c);

  auto* gen = app.add_subcommand("generate", "Write a synthetic disk-topology surface");
  std::string kind, resolution;
  gen->add_option("kind", kind, "hemisphere, paraboloid, bumpy_disk or flat_disk")->required();
  gen->add_option("resolution", resolution, "Target vertex count")->required()->check(CLI::PositiveNumber);
  gen->add_option("output", c.output, "Output mesh path")->required();
  gen->add_option("--seed", c.seed, "Seed for bump amplitudes");
  gen->add_option("--format", c.format, "Output format (off or obj)")->check(CLI::IsMember({"off", "obj"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (param->parsed()) return cmd_parameterize(c, out, err);
    if (compare->parsed()) {
      c.inputs = {compare_input};
      return cmd_compare(c, out, err);
    }
    if (reg->parsed()) {
      c.inputs = {src, dst, lm};
      return cmd_register(c, out, err);
    }
    if (gen->parsed()) {
      c.inputs = {kind, resolution};
      return cmd_generate(c, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace authalic
