#pragma once

#include "cptv/autodiff/tape.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cptv::harness {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool step = false;  // hold each value until the next x
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  int width = 720;
  int height = 420;
};

std::string line_chart_svg(const std::vector<Series>& series, const ChartOptions& options);

// values is rows (y axis) x cols (x axis); colour scale is linear between the
// minimum and maximum, or logarithmic when log_scale is set.
std::string heatmap_svg(const ad::Matrix& values, double x_lo, double x_hi, double y_lo, double y_hi,
                        const ChartOptions& options, bool log_scale = false);

void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace cptv::harness
