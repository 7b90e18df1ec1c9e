#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "authalic/disk_map.hpp"
#include "authalic/mesh.hpp"

namespace authalic {

// |f(t)| / |t| for one face.
double area_ratio(const TriMesh& mesh, const DiskMap& map, int face);

// Faces whose image has negative signed area.
int folding_count(const TriMesh& mesh, std::span<const Vec2> image);
int folding_count(const TriMesh& mesh, const DiskMap& map);

struct Histogram {
  double lo = 0.0;
  double hi = 2.0;
  std::vector<long> counts;
  long below = 0;  // values < lo
  long above = 0;  // values > hi

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double bin_center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * bin_width(); }
};

Histogram make_histogram(std::span<const double> values, int bins, double lo = 0.0, double hi = 2.0);

struct DistortionReport {
  std::vector<double> raw_ratios;         // |f(t)| / |t|
  std::vector<double> area_ratios;        // raw / kappa
  double kappa = 1.0;                     // sum |f(t)| / |S|
  double mean_ratio = 1.0;                // area-weighted mean of area_ratios
  double mean_ratio_unweighted = 1.0;
  double sd_ratio = 0.0;                  // over faces, normalized ratios
  double sd_raw = 0.0;                    // over faces, raw ratios
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double authalic_energy = 0.0;
  int folding_count = 0;
  bool boundary_order_preserved = true;
  Histogram histogram;
};

// Throws ValidationError if bins < 1.
DistortionReport distortion_report(const TriMesh& mesh, const DiskMap& map, int bins = 100);

void write_ratios_csv(std::ostream& out, const DistortionReport& report);
void write_histogram(std::ostream& out, const Histogram& histogram);
std::string summary_json(const DistortionReport& report, int indent = 2);

}  // namespace authalic
