#include "authalic/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

#include <json.hpp>

#include "authalic/energy.hpp"

namespace authalic {

namespace {

double image_area(const std::vector<Vec2>& image, const Face& t) {
  return 0.5 * std::abs(signed_area2(image[t[0]], image[t[1]], image[t[2]]));
}

double population_sd(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

}  // namespace

double area_ratio(const TriMesh& mesh, const DiskMap& map, int face) {
  const auto& t = mesh.faces().at(face);
  const auto& part = mesh.partition();
  auto point = [&](int v) {
    return part.is_boundary(v) ? map.boundary_point(part.slot[v]) : map.interior_point(part.slot[v]);
  };
  return 0.5 * std::abs(signed_area2(point(t[0]), point(t[1]), point(t[2]))) / mesh.face_area(face);
}

int folding_count(const TriMesh& mesh, std::span<const Vec2> image) {
  int folds = 0;
  for (const Face& t : mesh.faces()) {
    if (signed_area2(image[t[0]], image[t[1]], image[t[2]]) < 0.0) ++folds;
  }
  return folds;
}

int folding_count(const TriMesh& mesh, const DiskMap& map) {
  return folding_count(mesh, map.vertex_positions(mesh.partition()));
}

Histogram make_histogram(std::span<const double> values, int bins, double lo, double hi) {
  if (bins < 1) throw ValidationError("histogram needs at least one bin");
  if (!(hi > lo)) throw ValidationError("histogram range is empty");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  const double w = h.bin_width();
  for (double v : values) {
    if (v < lo) {
      ++h.below;
    } else if (v > hi) {
      ++h.above;
    } else {
      // The small offset keeps values sitting on a bin edge (up to roundoff)
      // in the upper bin.
      auto idx = static_cast<long>(std::floor((v - lo) / w + 1e-9));
      idx = std::clamp<long>(idx, 0, bins - 1);
      ++h.counts[idx];
    }
  }
  return h;
}

DistortionReport distortion_report(const TriMesh& mesh, const DiskMap& map, int bins) {
  if (bins < 1) throw ValidationError("bins must be at least 1");
  const auto image = map.vertex_positions(mesh.partition());
  const auto& faces = mesh.faces();
  const std::size_t m = faces.size();

  DistortionReport r;
  r.raw_ratios.resize(m);
  double image_total = 0.0;
  for (std::size_t f = 0; f < m; ++f) {
    const double a = image_area(image, faces[f]);
    image_total += a;
    r.raw_ratios[f] = a / mesh.face_area(f);
  }
  r.kappa = image_total / mesh.total_area();
  r.area_ratios.resize(m);
  double weighted = 0.0;
  double plain = 0.0;
  for (std::size_t f = 0; f < m; ++f) {
    r.area_ratios[f] = r.kappa > 0.0 ? r.raw_ratios[f] / r.kappa : 0.0;
    weighted += mesh.face_area(f) * r.area_ratios[f];
    plain += r.area_ratios[f];
  }
  r.mean_ratio = weighted / mesh.total_area();
  r.mean_ratio_unweighted = plain / static_cast<double>(m);
  r.sd_ratio = population_sd(r.area_ratios);
  r.sd_raw = population_sd(r.raw_ratios);
  const auto [mn, mx] = std::minmax_element(r.area_ratios.begin(), r.area_ratios.end());
  r.min_ratio = *mn;
  r.max_ratio = *mx;
  const auto energy = try_normalized_authalic_energy(mesh, map);
  r.authalic_energy = energy ? *energy : std::numeric_limits<double>::quiet_NaN();
  r.folding_count = folding_count(mesh, image);
  r.boundary_order_preserved = boundary_order_preserved(map.theta());
  r.histogram = make_histogram(r.area_ratios, bins);
  return r;
}

void write_ratios_csv(std::ostream& out, const DistortionReport& report) {
  out << "face,raw_ratio,normalized_ratio\n" << std::setprecision(17);
  for (std::size_t f = 0; f < report.raw_ratios.size(); ++f) {
    out << f << ',' << report.raw_ratios[f] << ',' << report.area_ratios[f] << '\n';
  }
}

void write_histogram(std::ostream& out, const Histogram& h) {
  out << "# bin_center count  (range [" << h.lo << ", " << h.hi << "], below " << h.below << ", above " << h.above
      << ")\n";
  out << std::setprecision(10);
  for (std::size_t i = 0; i < h.counts.size(); ++i) out << h.bin_center(i) << ' ' << h.counts[i] << '\n';
}

std::string summary_json(const DistortionReport& r, int indent) {
  nlohmann::json j;
  auto number = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  j["faces"] = r.area_ratios.size();
  j["authalic_energy"] = number(r.authalic_energy);
  j["sd_ratio"] = r.sd_ratio;
  j["sd_raw_ratio"] = r.sd_raw;
  j["mean_ratio"] = r.mean_ratio;
  j["mean_ratio_unweighted"] = r.mean_ratio_unweighted;
  j["min_ratio"] = r.min_ratio;
  j["max_ratio"] = r.max_ratio;
  j["kappa"] = r.kappa;
  j["folding_count"] = r.folding_count;
  j["boundary_order_preserved"] = r.boundary_order_preserved;
  j["histogram"] = {{"lo", r.histogram.lo},
                    {"hi", r.histogram.hi},
                    {"counts", r.histogram.counts},
                    {"below", r.histogram.below},
                    {"above", r.histogram.above}};
  return j.dump(indent);
}

}  // namespace authalic
