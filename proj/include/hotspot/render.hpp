#pragma once

#include "hotspot/forest.hpp"
#include "hotspot/geo.hpp"
#include "hotspot/labeling.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hotspot {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

std::string to_hex(Rgb c);  // "#rrggbb"
Rgb parse_hex_color(std::string_view text);  // throws InvalidArgument

struct FigureSpec {
  int width = 800;
  int height = 600;
  std::vector<Rgb> ramp{{13, 8, 135}, {33, 145, 140}, {253, 231, 37}};  // dark blue -> yellow
  int margin_left = 70;
  int margin_right = 30;
  int margin_top = 40;
  int margin_bottom = 60;
  std::string title;
  std::string x_label = "longitude";
  std::string y_label = "latitude";
};

// Throws InvalidArgument for sizes below 64 px, an empty ramp, or margins
// that leave no plot area.
void validate(const FigureSpec& spec);

struct PlotArea {
  double x0, y0, x1, y1;  // pixel corners, y grows downward
};
PlotArea plot_area(const FigureSpec& spec);

// Pixel position of a point; north is up.
std::pair<double, double> project(const GeoPoint& p, const BoundingBox& bbox, const PlotArea& area);

// Linear interpolation over evenly spaced stops, t clamped to [0, 1].
Rgb ramp_color(std::span<const Rgb> ramp, double t);

// (c - min) / (max - min), or 0 when all counts are equal.
double heat_parameter(int count, int min_count, int max_count);

// SVG documents. Points outside bbox are skipped and counted in the root's
// data-clipped attribute.
std::string render_scatter(std::span<const GeoPoint> points, const BoundingBox& bbox, const FigureSpec& spec);
std::string render_grid_heatmap(const CellCounts& counts, const FigureSpec& spec);
std::string render_importance(const ImportanceReport& report, const FigureSpec& spec);

// Binary PPM (P6) of the heatmap, one cell per block of pixels, no axes.
std::string render_grid_heatmap_ppm(const CellCounts& counts, const FigureSpec& spec);

}  // namespace hotspot
