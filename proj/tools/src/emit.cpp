#include "lagfront_cli/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "lagfront/errors.hpp"
#include "lagfront_cli/scene.hpp"

namespace lagfront::cli {

namespace {

constexpr double kWidth = 800.0;

void require_finite(const Vector& v) {
  if (!v.allFinite()) throw FormatError("non-finite coordinate in output");
}

template <typename Writer>
void write_file(const std::string& path, Writer&& writer) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  writer(file);
  file.flush();
  if (!file) throw IoError("write to '" + path + "' failed");
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) throw FormatError("non-finite number in output");
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows, std::size_t n, std::size_t k) {
  out << "t";
  for (std::size_t i = 1; i <= n; ++i) out << ",x" << i;
  for (std::size_t i = 1; i <= k; ++i) out << ",q" << i;
  out << ",label\n";
  for (const auto& r : rows) {
    if (static_cast<std::size_t>(r.x.size()) != n || static_cast<std::size_t>(r.q.size()) != k) {
      throw FormatError("CSV row has the wrong number of columns");
    }
    out << format_number(r.t);
    for (Eigen::Index i = 0; i < r.x.size(); ++i) out << ',' << format_number(r.x(i));
    for (Eigen::Index i = 0; i < r.q.size(); ++i) out << ',' << format_number(r.q(i));
    out << ',' << r.label << '\n';
  }
}

void emit_csv(const std::string& path, const std::vector<CsvRow>& rows, std::size_t n, std::size_t k) {
  std::ostringstream text;
  write_csv(text, rows, n, k);
  write_file(path, [&](std::ostream& f) { f << text.str(); });
}

Viewport fit_viewport(const std::vector<SvgLayer>& layers) {
  const double inf = std::numeric_limits<double>::infinity();
  Viewport v{inf, -inf, inf, -inf};
  for (const auto& layer : layers) {
    for (const auto& curve : layer.curves) {
      for (const auto& p : curve) {
        require_finite(p);
        v.x_lo = std::min(v.x_lo, p(0));
        v.x_hi = std::max(v.x_hi, p(0));
        v.y_lo = std::min(v.y_lo, p(1));
        v.y_hi = std::max(v.y_hi, p(1));
      }
    }
  }
  if (!(v.x_hi >= v.x_lo)) return {-1.0, 1.0, -1.0, 1.0};
  const double span = std::max({v.x_hi - v.x_lo, v.y_hi - v.y_lo, 1e-9});
  const double pad = 0.05 * span;
  const double cx = 0.5 * (v.x_lo + v.x_hi), cy = 0.5 * (v.y_lo + v.y_hi);
  const double hx = std::max(0.5 * (v.x_hi - v.x_lo), 0.05 * span) + pad;
  const double hy = std::max(0.5 * (v.y_hi - v.y_lo), 0.05 * span) + pad;
  return {cx - hx, cx + hx, cy - hy, cy + hy};
}

Viewport parse_viewport(const std::string& text) {
  const std::vector<double> v = parse_list(text, "--viewport");
  if (v.size() != 4 || !(v[1] > v[0]) || !(v[3] > v[2])) {
    throw UsageError("--viewport expects xmin,xmax,ymin,ymax with xmin < xmax and ymin < ymax");
  }
  return {v[0], v[1], v[2], v[3]};
}

void write_svg(std::ostream& out, const std::vector<SvgLayer>& layers, const std::optional<Viewport>& viewport) {
  const Viewport v = viewport ? *viewport : fit_viewport(layers);
  const double scale = kWidth / (v.x_hi - v.x_lo);
  const double height = std::clamp(std::round((v.y_hi - v.y_lo) * scale), 50.0, 4000.0);
  const double yscale = height / (v.y_hi - v.y_lo);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << format_number(kWidth)
      << "\" height=\"" << format_number(height) << "\" viewBox=\"0 0 " << format_number(kWidth) << ' '
      << format_number(height) << "\">\n"
      << "<style>\n"
      << ".front{fill:none;stroke:#2c5d9e;stroke-width:0.8}\n"
      << ".caustic{fill:none;stroke:#c0392b;stroke-width:2}\n"
      << ".maxwell{fill:none;stroke:#1e8449;stroke-width:2}\n"
      << ".delta{fill:none;stroke:#7d3c98;stroke-width:2}\n"
      << "</style>\n";
  for (const auto& layer : layers) {
    for (const auto& curve : layer.curves) {
      if (curve.empty()) continue;
      out << "<polyline class=\"" << layer.css_class << "\" points=\"";
      for (std::size_t i = 0; i < curve.size(); ++i) {
        require_finite(curve[i]);
        if (i) out << ' ';
        out << format_number((curve[i](0) - v.x_lo) * scale) << ',' << format_number((v.y_hi - curve[i](1)) * yscale);
      }
      out << "\"/>\n";
    }
  }
  out << "</svg>\n";
}

void emit_svg(const std::string& path, const std::vector<SvgLayer>& layers, const std::optional<Viewport>& viewport) {
  std::ostringstream text;
  write_svg(text, layers, viewport);
  write_file(path, [&](std::ostream& f) { f << text.str(); });
}

}  // namespace lagfront::cli
