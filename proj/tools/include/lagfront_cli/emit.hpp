#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lagfront/geometry.hpp"
#include "lagfront/linalg.hpp"

namespace lagfront::cli {

struct CsvRow {
  double t = 0.0;
  Vector x;
  Vector q;
  std::string label;  // front, caustic, maxwell or delta
};

// Header t,x1..xn,q1..qk,label; numbers with 9 significant digits.
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows, std::size_t n, std::size_t k);
void emit_csv(const std::string& path, const std::vector<CsvRow>& rows, std::size_t n, std::size_t k);

struct SvgLayer {
  std::string css_class;  // front, caustic, maxwell or delta
  std::vector<Polyline> curves;
};

struct Viewport {
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
};

// Bounding box of all curve points with a 5% margin.
Viewport fit_viewport(const std::vector<SvgLayer>& layers);
Viewport parse_viewport(const std::string& text);

// SVG 1.1 with one polyline per curve; the y axis points up.
void write_svg(std::ostream& out, const std::vector<SvgLayer>& layers, const std::optional<Viewport>& viewport);
void emit_svg(const std::string& path, const std::vector<SvgLayer>& layers, const std::optional<Viewport>& viewport);

std::string format_number(double v);

}  // namespace lagfront::cli
