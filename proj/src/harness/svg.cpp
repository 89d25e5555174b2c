#include "cptv/harness/svg.hpp"

#include "cptv/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace cptv::harness {

namespace {

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

struct Frame {
  double left = 70, right = 20, top = 40, bottom = 50;
  double w = 0, h = 0;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool log_y = false;

  [[nodiscard]] double px(double x) const { return left + (x - x0) / (x1 - x0) * (w - left - right); }
  [[nodiscard]] double py(double y) const {
    const double v = log_y ? std::log10(y) : y;
    return top + (1.0 - (v - y0) / (y1 - y0)) * (h - top - bottom);
  }
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

void pad(double& lo, double& hi) {
  if (!(hi > lo)) {
    const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= d;
    hi += d;
  } else {
    const double d = 0.05 * (hi - lo);
    lo -= d;
    hi += d;
  }
}

void axes(std::ostringstream& o, const Frame& f, const ChartOptions& opt) {
  o << "<text x=\"" << f.w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(opt.title) << "</text>\n";
  o << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.w - f.left - f.right << "\" height=\""
    << f.h - f.top - f.bottom << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    const double x = f.px(xv);
    const double y = f.top + (1.0 - i / 4.0) * (f.h - f.top - f.bottom);
    o << "<text x=\"" << x << "\" y=\"" << f.h - f.bottom + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << fmt(xv) << "</text>\n";
    o << "<text x=\"" << f.left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
      << fmt(f.log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
  }
  o << "<text x=\"" << (f.left + f.w - f.right) / 2 << "\" y=\"" << f.h - 12
    << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(opt.x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << (f.top + f.h - f.bottom) / 2
    << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << escape(opt.y_label) << "</text>\n";
}

}  // namespace

std::string line_chart_svg(const std::vector<Series>& series, const ChartOptions& opt) {
  Frame f;
  f.w = opt.width;
  f.h = opt.height;
  f.log_y = opt.log_y;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw UsageError("line_chart_svg: x and y lengths differ in " + s.name);
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (opt.log_y && !(s.y[i] > 0.0))) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      const double v = opt.log_y ? std::log10(s.y[i]) : s.y[i];
      ylo = std::min(ylo, v);
      yhi = std::max(yhi, v);
    }
  }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  if (!(xhi > xlo)) xhi = xlo + 1.0;
  pad(ylo, yhi);
  f.x0 = xlo;
  f.x1 = xhi;
  f.y0 = ylo;
  f.y1 = yhi;

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.w << "\" height=\"" << f.h
    << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  axes(o, f, opt);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kPalette[k % kPalette.size()];
    std::ostringstream pts;
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (opt.log_y && !(s.y[i] > 0.0))) continue;
      if (s.step && !first) pts << ' ' << f.px(s.x[i]) << ',' << f.py(s.y[i - 1]);
      pts << ' ' << f.px(s.x[i]) << ',' << f.py(s.y[i]);
      first = false;
    }
    if (s.step && !s.x.empty() && s.x.back() < xhi) pts << ' ' << f.px(xhi) << ',' << f.py(s.y.back());
    o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.6\" points=\"" << pts.str() << "\"/>\n";
    const double ly = f.top + 16 + 16.0 * static_cast<double>(k);
    o << "<line x1=\"" << f.w - f.right - 120 << "\" y1=\"" << ly - 4 << "\" x2=\"" << f.w - f.right - 100 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << f.w - f.right - 95 << "\" y=\"" << ly << "\" font-size=\"11\">" << escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string heatmap_svg(const ad::Matrix& values, double x_lo, double x_hi, double y_lo, double y_hi,
                        const ChartOptions& opt, bool log_scale) {
  if (values.size() == 0) throw UsageError("heatmap_svg: empty field");
  Frame f;
  f.w = opt.width;
  f.h = opt.height;
  f.right = 90;
  f.x0 = x_lo;
  f.x1 = x_hi;
  f.y0 = y_lo;
  f.y1 = y_hi;

  auto level = [&](double v) { return log_scale ? std::log10(std::max(v, 1e-300)) : v; };
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values.data()[i];
    if (!std::isfinite(v) || (log_scale && !(v > 0.0))) continue;
    lo = std::min(lo, level(v));
    hi = std::max(hi, level(v));
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (!(hi > lo)) hi = lo + 1.0;

  // Viridis-like ramp through five anchors.
  auto colour = [&](double v) {
    static constexpr std::array<std::array<double, 3>, 5> ramp{
        {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    double s = std::clamp((level(v) - lo) / (hi - lo), 0.0, 1.0) * 4.0;
    const int i = std::min(3, static_cast<int>(s));
    s -= i;
    std::ostringstream c;
    c << "rgb(";
    for (int ch = 0; ch < 3; ++ch)
      c << static_cast<int>(std::lround(ramp[i][ch] + s * (ramp[i + 1][ch] - ramp[i][ch]))) << (ch < 2 ? "," : ")");
    return c.str();
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.w << "\" height=\"" << f.h
    << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Cap the drawn cells at roughly 200 x 150 by block averaging.
  const Eigen::Index rows = values.rows(), cols = values.cols();
  const Eigen::Index br = std::max<Eigen::Index>(1, (rows + 149) / 150);
  const Eigen::Index bc = std::max<Eigen::Index>(1, (cols + 199) / 200);
  const double cw = (f.w - f.left - f.right) / std::ceil(static_cast<double>(cols) / bc);
  const double ch = (f.h - f.top - f.bottom) / std::ceil(static_cast<double>(rows) / br);
  for (Eigen::Index r = 0, rr = 0; r < rows; r += br, ++rr) {
    for (Eigen::Index c = 0, cc = 0; c < cols; c += bc, ++cc) {
      const auto block = values.block(r, c, std::min(br, rows - r), std::min(bc, cols - c));
      const double x = f.left + cw * static_cast<double>(cc);
      const double y = f.h - f.bottom - ch * static_cast<double>(rr + 1);
      o << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw + 0.3 << "\" height=\"" << ch + 0.3
        << "\" fill=\"" << colour(block.mean()) << "\"/>\n";
    }
  }
  axes(o, f, opt);
  const double bar_x = f.w - f.right + 20;
  for (int i = 0; i < 50; ++i) {
    const double s = lo + (hi - lo) * (i + 0.5) / 50.0;
    const double v = log_scale ? std::pow(10.0, s) : s;
    const double y = f.h - f.bottom - (f.h - f.top - f.bottom) * (i + 1) / 50.0;
    o << "<rect x=\"" << bar_x << "\" y=\"" << y << "\" width=\"14\" height=\"" << (f.h - f.top - f.bottom) / 50.0 + 0.3
      << "\" fill=\"" << colour(v) << "\"/>\n";
  }
  auto label = [&](double s) { return fmt(log_scale ? std::pow(10.0, s) : s); };
  o << "<text x=\"" << bar_x + 18 << "\" y=\"" << f.top + 8 << "\" font-size=\"10\">" << label(hi) << "</text>\n";
  o << "<text x=\"" << bar_x + 18 << "\" y=\"" << f.h - f.bottom << "\" font-size=\"10\">" << label(lo) << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace cptv::harness
